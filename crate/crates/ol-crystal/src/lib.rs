//! Computations with crystals carrying Pappas-Rapoport style filtrations over
//! ramified Witt vectors: Newton, Hodge and filtration polygons, generalized Hasse
//! invariants, mu-ordinary decompositions and truncated (level one) data over
//! artinian bases.

pub mod arith;
pub mod error;
pub mod linalg;
pub mod polygon;
pub mod crystal;
pub mod hasse;
pub mod mu_ordinary;
pub mod bt1;
pub mod io;
pub mod suite;

pub use error::{Error, Result};
