use num_bigint::BigInt;
use num_rational::BigRational;

use super::{with_precision_retries, OLCrystal};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::polygon::Polygon;

/// Matrix `X_tau` of the `sigma^f`-semilinear `F^f` on `M_tau`:
/// `X_tau = Y_tau sigma(Y_{tau-1}) ... sigma^{f-1}(Y_{tau-f+1})`.
pub fn frobenius_power(c: &OLCrystal, tau: usize) -> Mat {
    let r = &c.ring;
    let f = c.f();
    let mut x = c.frobenius(tau).clone();
    for j in 1..f {
        let src = c.frobenius((tau + f * j - j) % f);
        let twisted = linalg::sigma_pow(r, src, j as i64);
        x = linalg::mul(r, &x, &twisted);
    }
    x
}

/// Matrix `Z = X_tau sigma^f(X_tau) ... sigma^{n-f}(X_tau)` of the linear map `F^n` on `M_tau`.
pub fn linearized_frobenius(c: &OLCrystal, tau: usize) -> Mat {
    let r = &c.ring;
    let x = frobenius_power(c, tau);
    let mut z = x.clone();
    let steps = c.n() / c.f();
    for j in 1..steps {
        let t = linalg::sigma_pow(r, &x, (j * c.f()) as i64);
        z = linalg::mul(r, &z, &t);
    }
    z
}

/// Newton polygon computed from embedding `tau` at the crystal's precision.
pub fn newton_polygon_at(c: &OLCrystal, tau: usize) -> Result<Polygon> {
    let r = &c.ring;
    let z = linearized_frobenius(c, tau);
    let cp = linalg::charpoly(r, &z);
    let h = c.h;
    // point i is (i, v(coefficient of X^{h-i})), valuations in pi-units
    let mut known: Vec<(usize, i64)> = Vec::new();
    let mut unknown: Vec<(usize, i64)> = Vec::new();
    for i in 0..=h {
        let coeff = &cp[h - i];
        match r.val(coeff) {
            Some(v) => known.push((i, v as i64)),
            None => unknown.push((i, coeff.precision() as i64)),
        }
    }
    if known.last().map(|k| k.0) != Some(h) {
        return Err(Error::PrecisionExhausted(
            "determinant of the linearized Frobenius vanishes at working precision".into(),
        ));
    }
    let hull = lower_hull(&known);
    // a coefficient that is zero at precision is harmless if its bound lies above the hull
    for (i, bound) in unknown {
        let hv = hull_value(&hull, i);
        if BigRational::from_integer(BigInt::from(bound)) < hv {
            return Err(Error::PrecisionExhausted(format!(
                "characteristic polynomial coefficient at abscissa {i} is not certified"
            )));
        }
    }
    let denom = BigInt::from((c.e() * c.n()) as u64);
    let mut slopes = Vec::with_capacity(h);
    for w in hull.windows(2) {
        let (i1, v1) = w[0];
        let (i2, v2) = w[1];
        let len = (i2 - i1) as i64;
        let s = BigRational::new(BigInt::from(v2 - v1), BigInt::from(len) * &denom);
        for _ in 0..len {
            slopes.push(s.clone());
        }
    }
    Ok(Polygon::from_slopes(slopes))
}

/// Newton polygon of the crystal (normalized so that `v(p) = 1`), computed from
/// embedding 0 with automatic precision retries.
pub fn newton_polygon(c: &OLCrystal) -> Result<Polygon> {
    with_precision_retries(c, |c| newton_polygon_at(c, 0))
}

fn lower_hull(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let (x3, y3) = pt;
            // drop the middle point if it lies on or above the segment
            let lhs = (y2 - y1) as i128 * (x3 - x1) as i128;
            let rhs = (y3 - y1) as i128 * (x2 - x1) as i128;
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

fn hull_value(hull: &[(usize, i64)], i: usize) -> BigRational {
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        if x1 <= i && i <= x2 {
            return BigRational::from_integer(BigInt::from(y1))
                + BigRational::new(
                    BigInt::from((y2 - y1) * (i - x1) as i64),
                    BigInt::from((x2 - x1) as i64),
                );
        }
    }
    BigRational::from_integer(BigInt::from(hull[0].1))
}
