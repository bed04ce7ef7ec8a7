//! The chapters of the book under `book/src`, compiled so that their code listings run
//! as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/polygons.md")]
pub mod polygons {}
#[doc = include_str!("../../../book/src/crystals.md")]
pub mod crystals {}
#[doc = include_str!("../../../book/src/hasse.md")]
pub mod hasse {}
#[doc = include_str!("../../../book/src/mu-ordinary.md")]
pub mod mu_ordinary {}
#[doc = include_str!("../../../book/src/artinian.md")]
pub mod artinian {}
#[doc = include_str!("../../../book/src/random-suite.md")]
pub mod random_suite {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}
