use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::PRDatum;
use crate::error::Result;
use crate::linalg::binom;
use crate::polygon::Polygon;

/// `PR_tau(j) = (1/e) sum_i max(j - h + d_{tau,i}, 0)`.
pub fn pr_polygon_tau(mu: &PRDatum, tau: usize) -> Polygon {
    let h = mu.h() as i64;
    let e = BigRational::from_integer(BigInt::from(mu.e()));
    let values: Vec<BigRational> = (0..=h)
        .map(|j| {
            let s: i64 = mu.levels()[tau % mu.f()]
                .iter()
                .map(|d| (j - h + *d as i64).max(0))
                .sum();
            BigRational::from_integer(BigInt::from(s)) / &e
        })
        .collect();
    debug_assert!(values[0].is_zero());
    Polygon::from_values(&values).expect("PR polygon values are convex")
}

/// Mean over embeddings of the per-embedding PR polygons.
pub fn pr_polygon(mu: &PRDatum) -> Polygon {
    let list: Vec<Polygon> = (0..mu.f()).map(|t| pr_polygon_tau(mu, t)).collect();
    Polygon::mean(&list).expect("datum has at least one embedding")
}

/// The datum of the `s`-th exterior power: width `C(h, s)` and `r s` levels, with
/// `d^{(s)}_{tau, i s - k} = sum_{j <= k} C(d_{tau,i}, s - j) C(h - d_{tau,i}, j)`.
pub fn exterior_datum(mu: &PRDatum, s: usize) -> Result<PRDatum> {
    let h = mu.h();
    if s == 0 || s > h {
        return Err(crate::Error::InvalidInput(format!(
            "exterior power index {s} outside [1, {h}]"
        )));
    }
    let levels = mu
        .levels()
        .iter()
        .map(|l| {
            let mut out = vec![0usize; l.len() * s];
            for (i0, &d) in l.iter().enumerate() {
                let i = i0 + 1;
                for k in 0..s {
                    let v: usize = (0..=k).map(|j| binom(d, s - j) * binom(h - d, j)).sum();
                    out[i * s - k - 1] = v;
                }
            }
            out
        })
        .collect();
    PRDatum::with_normalizer(binom(h, s), mu.e(), levels)
}
