use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{frobenius_power, OLCrystal};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::polygon::Polygon;

/// Independent estimate of the Newton polygon from iterated valuations.
///
/// For each `s`, the minimal entry valuation `a_m` of the `m`-th semilinear power of
/// `wedge^s F^f` is super-additive in `m`, so `a_m / m` increases to `e f Newt(s)`.
/// Powers are formed by repeated squaring of valuation-normalized matrices (so only a
/// few digits of precision are consumed per squaring), for `m` up to `m_max`.  Each
/// estimate is rounded to the nearest rational with denominator at most `e n h`; the
/// rounding must lie above the estimate within a quarter of the minimal spacing and be
/// stable over the last three squarings, otherwise `NoConvergence` is returned.
pub fn newton_oracle(c: &OLCrystal, m_max: u64) -> Result<Polygon> {
    let digits = oracle_digits(c.ring.p());
    let c = c.with_precision(digits)?;
    let r = &c.ring;
    let (e, f, n, h) = (c.e() as i64, c.f() as i64, c.n() as i64, c.h);
    let x = frobenius_power(&c, 0);
    let dmax = (e * n * h as i64) as usize;
    let mut values = vec![BigRational::zero()];
    for s in 1..=h {
        let comp = linalg::compound(r, &x, s);
        let mut acc = linalg::min_val(r, &comp).ok_or_else(|| {
            Error::NoConvergence(format!("wedge^{s} of F^f vanishes at precision"))
        })? as i128;
        let mut p = linalg::div_pi_pow(r, &comp, acc as u32)?;
        let mut m: u64 = 1;
        let mut estimates: Vec<BigRational> = vec![ratio(acc, m)];
        while m * 2 <= m_max && p.min_precision() > 8 {
            let twisted = linalg::sigma_pow(r, &p, (m as i64 % n) * f);
            let prod = linalg::mul(r, &p, &Mat { tau: 0, ..twisted });
            let Some(delta) = linalg::min_val(r, &prod) else {
                break;
            };
            p = linalg::div_pi_pow(r, &prod, delta)?;
            acc = 2 * acc + delta as i128;
            m *= 2;
            estimates.push(ratio(acc, m));
        }
        if estimates.len() < 3 {
            return Err(Error::NoConvergence(format!(
                "too few iterations for s = {s} before precision ran out"
            )));
        }
        let scale = BigRational::from_integer(BigInt::from(e * f));
        let rounded: Vec<Option<BigRational>> = estimates[estimates.len() - 3..]
            .iter()
            .map(|est| round_from_below(&(est / &scale), dmax))
            .collect();
        let first = rounded[0].clone();
        if first.is_none() || rounded.iter().any(|r| *r != first) {
            return Err(Error::NoConvergence(format!(
                "estimates for s = {s} did not settle (last {})",
                estimates.last().unwrap() / &scale
            )));
        }
        values.push(first.unwrap());
    }
    Polygon::from_values(&values)
        .map_err(|_| Error::NoConvergence("estimated polygon is not convex".into()))
}

/// Largest precision whose modulus stays below `2^63` (fast multiplication path).
fn oracle_digits(p: u64) -> u32 {
    let mut n = 0;
    let mut m: u128 = 1;
    while m * (p as u128) < (1u128 << 63) {
        m *= p as u128;
        n += 1;
    }
    n
}

fn ratio(a: i128, m: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(m))
}

/// The unique rational `c >= x` with denominator at most `d` and `c - x < 1/(4 d^2)`.
fn round_from_below(x: &BigRational, d: usize) -> Option<BigRational> {
    let mut best: Option<BigRational> = None;
    let tol = BigRational::new(BigInt::from(1), BigInt::from(4 * d * d));
    for den in 1..=d {
        let den_b = BigInt::from(den);
        let num = (x * BigRational::from_integer(den_b.clone())).ceil().to_integer();
        let cand = BigRational::new(num, den_b);
        let gap = &cand - x;
        if !gap.is_negative() && gap < tol {
            match &best {
                Some(b) if *b != cand => return None,
                _ => best = Some(cand),
            }
        }
    }
    best
}
