//! Hasse invariants attached to a PR datum over a finite field.
//!
//! Everything is computed on the Verschiebung side: `D_tau` is the Frobenius twist of
//! `M_{tau-1}`, with coordinates in `W_{O_L,tau}(k)`.  In these coordinates
//! `Fil^{[i]} D_tau = p Y_tau^{-1} Fil^{[i]} M_tau`, and `V : D_{tau+1} -> D_tau` is
//! `z -> A_tau sigma^{-1}(z)` with `A_tau = p Y_tau^{-1}`.

use crate::arith::{FqElem, Ring};
use crate::crystal::{
    embed_mat, hodge_polygon, newton_polygon, pr_polygon, OLCrystal, PRDatum, PRFiltration,
};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Matrix `A_tau = p Y_tau^{-1}` of the Verschiebung `D_{tau+1} -> D_tau`.
pub fn verschiebung_d(c: &OLCrystal, tau: usize) -> Result<Mat> {
    let r = &c.ring;
    let pid = linalg::scale(r, &r.from_int(r.p() as i128, tau), &Mat::identity(r, c.h, tau));
    linalg::solve(r, c.frobenius(tau), &pid)
}

/// Lattice basis of `Fil^{[i]} D_tau`.
pub fn d_filtration(c: &OLCrystal, fil: &PRFiltration, tau: usize, i: usize) -> Result<Mat> {
    let r = &c.ring;
    let a = verschiebung_d(c, tau)?;
    linalg::lattice_basis(r, &linalg::mul(r, &a, fil.level(tau, i)))
}

/// Matrix of the `sigma^{-f}`-semilinear `V^f` on `D_tau`: `V^f(z) = W sigma^{-f}(z)` with
/// `W = A_{tau-f} sigma^{-1}(A_{tau-f+1}) ... sigma^{-(f-1)}(A_{tau-1})`.
pub fn verschiebung_power(c: &OLCrystal, tau: usize) -> Result<Mat> {
    let r = &c.ring;
    let f = c.f();
    let mut w = verschiebung_d(c, tau % f)?;
    for j in 1..f {
        let a = verschiebung_d(c, (tau + j) % f)?;
        w = linalg::mul(r, &w, &linalg::sigma_pow(r, &a, -(j as i64)));
    }
    Ok(w)
}

/// `k_{tau,d} = sum_i max(d - d_{tau,i}, 0)`.
pub fn zeta_exponent(mu: &PRDatum, tau: usize, d: usize) -> u32 {
    mu.levels()[tau % mu.f()]
        .iter()
        .map(|di| d.saturating_sub(*di) as u32)
        .sum()
}

/// `K = sum_{tau', j} max(d_{tau,i} - d_{tau',j}, 0)`, the exponent dividing `wedge V^f`.
pub fn hasse_exponent(mu: &PRDatum, tau: usize, i: usize) -> u32 {
    let d = mu.d(tau, i);
    (0..mu.f()).map(|t| zeta_exponent(mu, t, d)).sum()
}

/// `zeta_tau^d = wedge^d V_{tau+1} / pi^{k_{tau,d}}`, as a `sigma^{-1}`-semilinear matrix.
pub fn zeta(c: &OLCrystal, mu: &PRDatum, tau: usize, d: usize) -> Result<Mat> {
    if d == 0 || d > c.h {
        return Err(Error::InvalidInput(format!("wedge degree {d} outside [1, {}]", c.h)));
    }
    let r = &c.ring;
    let a = verschiebung_d(c, tau)?;
    linalg::div_pi_pow(r, &linalg::compound(r, &a, d), zeta_exponent(mu, tau, d))
}

/// Checks the staircase behind `zeta_tau^d`: the image of `wedge^d V` lies in
/// `wedge^d Fil^{[e]}`, and `pi^{min(d, d_{tau,i})}` maps `wedge^d Fil^{[i]}` into
/// `wedge^d Fil^{[i-1]}` for every level.
pub fn staircase_check(
    c: &OLCrystal,
    fil: &PRFiltration,
    mu: &PRDatum,
    tau: usize,
    d: usize,
) -> Result<bool> {
    let r = &c.ring;
    let steps = mu.r();
    let bases: Vec<Mat> = (0..=steps)
        .map(|i| d_filtration(c, fil, tau, i).map(|b| linalg::compound(r, &b, d)))
        .collect::<Result<_>>()?;
    let image = linalg::compound(r, &verschiebung_d(c, tau)?, d);
    let top = linalg::lattice_basis(r, &bases[steps])?;
    if !linalg::contained_in(r, &image, &top)? {
        return Ok(false);
    }
    for i in (1..=steps).rev() {
        let k = d.min(mu.d(tau, i)) as u32;
        let moved = linalg::mul_pi_pow(r, &bases[i], k);
        let lower = linalg::lattice_basis(r, &bases[i - 1])?;
        if !linalg::contained_in(r, &moved, &lower)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A basis `(u_1..u_d, w_1..w_{h-d})` of `Fil^{[i]} D_tau` such that
/// `(pi u, w)` is a basis of `Fil^{[i-1]} D_tau`.  The `w` are the lowest-index
/// generators of the lower level that stay independent modulo `pi`; the `u` are the
/// lowest-index basis vectors of the upper level completing them.
pub fn adapted_basis(c: &OLCrystal, fil: &PRFiltration, tau: usize, i: usize) -> Result<(Mat, usize)> {
    let r = &c.ring;
    let upper = d_filtration(c, fil, tau, i)?;
    let lower = d_filtration(c, fil, tau, i - 1)?;
    let coords = linalg::solve(r, &upper, &lower)?;
    let res = linalg::residue(r, &coords);
    let fq = r.residue_field();
    let w_cols = linalg::fq_pivot_columns(fq, &res, c.h);
    // complete the image of the lower level by standard vectors
    let h = c.h;
    let mut ext: Vec<Vec<FqElem>> = res.iter().map(|row| w_cols.iter().map(|&j| row[j]).collect()).collect();
    for (k, row) in ext.iter_mut().enumerate() {
        for s in 0..h {
            row.push(if k == s { fq.one() } else { fq.zero() });
        }
    }
    let piv = linalg::fq_pivot_columns(fq, &ext, w_cols.len() + h);
    let u_idx: Vec<usize> = piv.into_iter().filter(|&j| j >= w_cols.len()).map(|j| j - w_cols.len()).collect();
    let d = u_idx.len();
    let u = upper.select_cols(&u_idx);
    let w = lower.select_cols(&w_cols);
    Ok((u.hstack(&w), d))
}

/// The matrix of `HA_tau^{[i]} = wedge^d V^f / pi^K` on `wedge^d Fil^{[i]} D_tau` in the
/// wedge basis of `basis`, together with `K`.  The map is `sigma^{-f}`-semilinear.
pub fn ha_endomorphism_in_basis(
    c: &OLCrystal,
    mu: &PRDatum,
    tau: usize,
    i: usize,
    basis: &Mat,
) -> Result<(Mat, u32)> {
    if !mu.is_ordered() {
        return Err(Error::OrderedDatumRequired);
    }
    let d = mu.d(tau, i);
    if d == 0 {
        return Err(Error::InvalidInput("Hasse endomorphism needs d_{tau,i} >= 1".into()));
    }
    let r = &c.ring;
    let f = c.f() as i64;
    let w = verschiebung_power(c, tau)?;
    let k = hasse_exponent(mu, tau, i);
    let adj = linalg::adjugate(r, basis);
    let det = linalg::det(r, basis);
    let twisted = linalg::sigma_pow(r, basis, -f);
    let num = linalg::mul(
        r,
        &linalg::mul(r, &linalg::compound(r, &adj, d), &linalg::compound(r, &w, d)),
        &linalg::compound(r, &twisted, d),
    );
    let denom = r.mul(&r.pow(&det, d as u64), &r.pi_pow(k, tau));
    let data = num
        .data
        .iter()
        .map(|x| r.div_exact(x, &denom))
        .collect::<Result<Vec<_>>>()?;
    Ok((Mat { data, ..num }, k))
}

/// `HA_tau^{[i]}` in the deterministic adapted basis.
pub fn ha_endomorphism(
    c: &OLCrystal,
    fil: &PRFiltration,
    mu: &PRDatum,
    tau: usize,
    i: usize,
) -> Result<(Mat, u32)> {
    if !mu.is_ordered() {
        return Err(Error::OrderedDatumRequired);
    }
    let (basis, _) = adapted_basis(c, fil, tau, i)?;
    ha_endomorphism_in_basis(c, mu, tau, i, &basis)
}

/// Coefficient of `Ha_tau^{[i]} : det Gr^{[i]} -> (det Gr^{[i]})^{(p^f)}` for the adapted
/// basis `basis` whose first `d_{tau,i}` columns are the `u`.
pub fn hasse_scalar_in_basis(
    c: &OLCrystal,
    mu: &PRDatum,
    tau: usize,
    i: usize,
    basis: &Mat,
) -> Result<FqElem> {
    if !mu.is_ordered() {
        return Err(Error::OrderedDatumRequired);
    }
    let r = &c.ring;
    if mu.d(tau, i) == 0 {
        return Ok(r.residue_field().one());
    }
    let (ha, _) = ha_endomorphism_in_basis(c, mu, tau, i, basis)?;
    let x = ha.get(0, 0);
    if x.precision() == 0 {
        return Err(Error::PrecisionExhausted(format!(
            "Hasse coefficient at ({tau}, {i}) lost all precision"
        )));
    }
    // coefficient of the linearized map det Gr -> (det Gr)^{(p^f)}
    Ok(r.residue_field().frob_pow(r.residue(x), c.f() as i64))
}

/// Coefficient of `Ha_tau^{[i]}` in the deterministic adapted basis (1 when `d_{tau,i} = 0`).
pub fn hasse_scalar(c: &OLCrystal, fil: &PRFiltration, mu: &PRDatum, tau: usize, i: usize) -> Result<FqElem> {
    if !mu.is_ordered() {
        return Err(Error::OrderedDatumRequired);
    }
    if mu.d(tau, i) == 0 {
        return Ok(c.ring.residue_field().one());
    }
    with_filtration_retries(c, fil, |c, fil| {
        let (basis, _) = adapted_basis(c, fil, tau, i)?;
        hasse_scalar_in_basis(c, mu, tau, i, &basis)
    })
}

/// One line of a Hasse report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseEntry {
    pub tau: usize,
    pub i: usize,
    pub d: usize,
    /// Exponent of `pi` divided out of `wedge^d V^f`.
    pub exponent: u32,
    /// The coefficient in the adapted-basis trivialization.
    pub scalar: FqElem,
    pub nonzero: bool,
}

/// All `Ha_tau^{[i]}` and the total invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseReport {
    pub entries: Vec<HasseEntry>,
    pub total_nonzero: bool,
}

/// Computes every `Ha_tau^{[i]}`; the total invariant is nonzero iff every factor is.
pub fn total_mu_hasse(c: &OLCrystal, fil: &PRFiltration, mu: &PRDatum) -> Result<HasseReport> {
    if !mu.is_ordered() {
        return Err(Error::OrderedDatumRequired);
    }
    with_filtration_retries(c, fil, |c, fil| {
        let fq = c.ring.residue_field();
        let mut entries = Vec::new();
        for tau in 0..c.f() {
            for i in 1..=mu.r() {
                let d = mu.d(tau, i);
                let (scalar, exponent) = if d == 0 {
                    (fq.one(), 0)
                } else {
                    let (basis, _) = adapted_basis(c, fil, tau, i)?;
                    (hasse_scalar_in_basis(c, mu, tau, i, &basis)?, hasse_exponent(mu, tau, i))
                };
                entries.push(HasseEntry {
                    tau,
                    i,
                    d,
                    exponent,
                    scalar,
                    nonzero: !fq.is_zero(scalar),
                });
            }
        }
        let total_nonzero = entries.iter().all(|e| e.nonzero);
        Ok(HasseReport {
            entries,
            total_nonzero,
        })
    })
}

/// `Newt(h - d_{tau,i}) = PR(h - d_{tau,i})`, for `0 < d_{tau,i} < h`.
pub fn contact_test(c: &OLCrystal, mu: &PRDatum, tau: usize, i: usize) -> Result<bool> {
    let d = mu.d(tau, i);
    if d == 0 || d >= c.h {
        return Err(Error::HypothesisViolated(format!(
            "contact test needs 0 < d_{{tau,i}} < h, got d = {d}, h = {}",
            c.h
        )));
    }
    let x = c.h - d;
    Ok(newton_polygon(c)?.eval(x)? == pr_polygon(mu).eval(x)?)
}

/// Newton polygon equals the PR polygon.
pub fn is_mu_ordinary(c: &OLCrystal, mu: &PRDatum) -> Result<bool> {
    Ok(newton_polygon(c)? == pr_polygon(mu))
}

/// Hodge polygon equals the PR polygon.
pub fn rapoport_test(c: &OLCrystal, mu: &PRDatum) -> Result<bool> {
    Ok(hodge_polygon(c)? == pr_polygon(mu))
}

/// Runs `op` on the crystal and filtration, retrying at doubled precision (two retries
/// at most) when precision is exhausted.
pub fn with_filtration_retries<T>(
    c: &OLCrystal,
    fil: &PRFiltration,
    mut op: impl FnMut(&OLCrystal, &PRFiltration) -> Result<T>,
) -> Result<T> {
    let max = crate::arith::modint::max_digits(c.ring.p());
    let mut digits = c.ring.digits();
    let mut cur_c = c.clone();
    let mut cur_f = fil.clone();
    for attempt in 0..3 {
        match op(&cur_c, &cur_f) {
            Err(Error::PrecisionExhausted(msg)) => {
                if attempt == 2 || digits >= max {
                    return Err(Error::PrecisionExhausted(msg));
                }
                digits = (digits * 2).min(max);
                cur_c = c.with_precision(digits)?;
                cur_f = embed_filtration(&cur_c.ring, &c.ring, fil);
            }
            other => return other,
        }
    }
    unreachable!()
}

fn embed_filtration(target: &Ring, source: &Ring, fil: &PRFiltration) -> PRFiltration {
    PRFiltration {
        levels: fil
            .levels
            .iter()
            .map(|l| l.iter().map(|m| embed_mat(target, source, m)).collect())
            .collect(),
    }
}
