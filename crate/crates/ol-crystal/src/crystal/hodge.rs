use num_bigint::BigInt;
use num_rational::BigRational;

use super::OLCrystal;
use crate::error::Result;
use crate::linalg;
use crate::polygon::Polygon;

/// Hodge polygon of `F_tau`: normalized valuations of the elementary divisors of `Y_tau`.
pub fn hodge_polygon_tau(c: &OLCrystal, tau: usize) -> Result<Polygon> {
    let vals = linalg::elementary_divisors(&c.ring, c.frobenius(tau))?;
    let e = BigInt::from(c.e());
    Ok(Polygon::from_slopes(
        vals.into_iter()
            .map(|v| BigRational::new(BigInt::from(v), e.clone()))
            .collect(),
    ))
}

/// Mean over embeddings of the per-embedding Hodge polygons.
pub fn hodge_polygon(c: &OLCrystal) -> Result<Polygon> {
    let list = (0..c.f())
        .map(|t| hodge_polygon_tau(c, t))
        .collect::<Result<Vec<_>>>()?;
    Polygon::mean(&list)
}
