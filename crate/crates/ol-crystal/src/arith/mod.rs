//! Arithmetic of the coefficient rings: integers modulo `p^N`, finite fields and the
//! ramified Witt vectors `W_{O_L,tau}(k)`.

pub mod fq;
pub mod modint;
pub mod ring;

pub use fq::{Fq, FqElem};
pub use ring::{BaseFieldDatum, Elem, LocalFieldDatum, Ring, Valuation};
