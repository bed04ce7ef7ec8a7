//! Explicit mu-ordinary models, etale parts, Hodge-Newton splittings and the
//! block decomposition of mu-ordinary crystals.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::arith::{Elem, Ring};
use crate::crystal::{
    hodge_polygon, hodge_polygon_tau, linearized_frobenius, newton_polygon, random_gl, validate_pr,
    OLCrystal, PRDatum, PRFiltration,
};
use crate::hasse::is_mu_ordinary;
use crate::error::{Error, Result};
use crate::linalg::{self, subsets, Mat};
use crate::polygon::Polygon;

/// Exponents `beta_tau` of the rank-one crystal `F_tau = pi^{beta_tau} sigma`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlopeDatum {
    pub beta: Vec<usize>,
}

/// Breaks `0 = D_0 < D_1 < ... < D_r < D_{r+1} = h` and exponents `alpha_j` (`1 <= j <= r+1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakData {
    pub breaks: Vec<usize>,
    pub alpha: Vec<Vec<usize>>,
}

impl BreakData {
    /// Number of internal breaks `r`.
    pub fn r(&self) -> usize {
        self.breaks.len() - 2
    }
    /// Rank `D_j - D_{j-1}` of block `j` (`1 <= j <= r+1`).
    pub fn multiplicity(&self, j: usize) -> usize {
        self.breaks[j] - self.breaks[j - 1]
    }
}

/// Rank-one crystal with `Y_tau = pi^{beta_tau}`.
pub fn build_x_beta(ring: &Arc<Ring>, beta: &SlopeDatum) -> Result<OLCrystal> {
    if beta.beta.len() != ring.f() {
        return Err(Error::InvalidInput(format!(
            "slope datum has {} entries, expected f = {}",
            beta.beta.len(),
            ring.f()
        )));
    }
    if let Some(b) = beta.beta.iter().find(|b| **b > ring.e()) {
        return Err(Error::InvalidInput(format!("exponent {b} exceeds e = {}", ring.e())));
    }
    let y = beta
        .beta
        .iter()
        .enumerate()
        .map(|(tau, b)| Mat::diag(ring, &[ring.pi_pow(*b as u32, tau)], tau))
        .collect();
    OLCrystal::new(ring.clone(), 1, y)
}

/// `D_j` are the distinct values of `d_{tau,i}` in `[1, h-1]`;
/// `alpha_{j,tau} = #{i : d_{tau,i} >= D_j}`.
pub fn break_data(mu: &PRDatum) -> BreakData {
    let h = mu.h();
    let mut inner: Vec<usize> = mu
        .levels()
        .iter()
        .flatten()
        .copied()
        .filter(|d| *d >= 1 && *d < h)
        .collect();
    inner.sort_unstable();
    inner.dedup();
    let mut breaks = vec![0];
    breaks.extend(inner);
    breaks.push(h);
    let alpha = breaks[1..]
        .iter()
        .map(|dj| {
            mu.levels()
                .iter()
                .map(|l| l.iter().filter(|d| **d >= *dj).count())
                .collect()
        })
        .collect();
    BreakData { breaks, alpha }
}

/// The model `X^ord`: blocks `X_{alpha_j}` of rank `D_j - D_{j-1}` (block 1 first), with
/// `Fil^{[i]}` on a line of block `j` equal to
/// `pi^{alpha_{j,tau} - #{i' <= i : d_{tau,i'} >= D_j}}` times that line.
pub fn build_x_ord(ring: &Arc<Ring>, mu: &PRDatum) -> Result<(OLCrystal, PRFiltration)> {
    if mu.f() != ring.f() || mu.r() != ring.e() {
        return Err(Error::InvalidInput(format!(
            "datum shape (f = {}, levels = {}) does not match the field (f = {}, e = {})",
            mu.f(),
            mu.r(),
            ring.f(),
            ring.e()
        )));
    }
    let bd = break_data(mu);
    let mut y = Vec::with_capacity(ring.f());
    let mut levels = Vec::with_capacity(ring.f());
    for tau in 0..ring.f() {
        let mut exps: Vec<Vec<u32>> = vec![Vec::new(); mu.r() + 1];
        for j in 1..=bd.r() + 1 {
            let dj = bd.breaks[j];
            let alpha = bd.alpha[j - 1][tau];
            for _ in 0..bd.multiplicity(j) {
                let mut count = 0;
                for (i, ex) in exps.iter_mut().enumerate() {
                    if i > 0 && mu.d(tau, i) >= dj {
                        count += 1;
                    }
                    ex.push((alpha - count) as u32);
                }
            }
        }
        let mats: Vec<Mat> = exps
            .iter()
            .map(|ex| {
                let d: Vec<Elem> = ex.iter().map(|k| ring.pi_pow(*k, tau)).collect();
                Mat::diag(ring, &d, tau)
            })
            .collect();
        y.push(mats[0].clone());
        levels.push(mats);
    }
    Ok((OLCrystal::new(ring.clone(), mu.h(), y)?, PRFiltration { levels }))
}

/// Basis (identity on its pivot rows) of the stable image of the powers of a linear
/// endomorphism, i.e. the span of its slope-zero part, found by repeated squaring until
/// the unit-pivot elimination leaves no remainder and the rank stops changing.
pub fn stable_unit_image(ring: &Ring, m: &Mat) -> Result<Mat> {
    let mut p = m.clone();
    let mut last_rank: Option<usize> = None;
    for _ in 0..64 {
        p = linalg::mul(ring, &p, &p);
        let (basis, remainder_zero) = unit_pivot_basis(ring, &p)?;
        if remainder_zero && last_rank == Some(basis.cols) {
            return Ok(basis);
        }
        last_rank = if remainder_zero { Some(basis.cols) } else { None };
    }
    Err(Error::PrecisionExhausted(
        "stable image did not settle after repeated squaring".into(),
    ))
}

/// Column elimination on unit pivots.  Returns the reduced pivot columns (identity on
/// their pivot rows, ordered by pivot row) and whether the remaining columns vanish.
fn unit_pivot_basis(ring: &Ring, m: &Mat) -> Result<(Mat, bool)> {
    let h = m.rows;
    let mut cols: Vec<Vec<Elem>> = (0..m.cols).map(|j| m.col(j)).collect();
    let mut pivots: Vec<(usize, Vec<Elem>)> = Vec::new();
    loop {
        let mut found = None;
        'search: for row in 0..h {
            if pivots.iter().any(|(r, _)| *r == row) {
                continue;
            }
            for (ci, c) in cols.iter().enumerate() {
                if ring.is_unit(&c[row]) {
                    found = Some((row, ci));
                    break 'search;
                }
            }
        }
        let Some((row, ci)) = found else { break };
        let col = cols.remove(ci);
        let inv = ring.inv_unit(&col[row])?;
        let col: Vec<Elem> = col.iter().map(|x| ring.mul(x, &inv)).collect();
        for c in cols.iter_mut().chain(pivots.iter_mut().map(|(_, c)| c)) {
            let q = c[row].clone();
            if ring.is_zero(&q) {
                continue;
            }
            for k in 0..h {
                c[k] = ring.sub(&c[k], &ring.mul(&q, &col[k]));
            }
        }
        pivots.push((row, col));
    }
    pivots.sort_by_key(|(r, _)| *r);
    let remainder_zero = cols.iter().all(|c| c.iter().all(|x| ring.is_zero(x)));
    let basis: Vec<Vec<Elem>> = pivots.into_iter().map(|(_, c)| c).collect();
    Ok((Mat::from_cols(ring, h, m.tau, &basis), remainder_zero))
}

/// The slope-zero sub-crystal together with its embedding matrices `U_tau`.
#[derive(Debug, Clone)]
pub struct EtalePart {
    pub crystal: OLCrystal,
    pub embedding: Vec<Mat>,
}

/// Unit-root sub-crystal: per embedding, the stable image of `F^n`.
pub fn etale_part(c: &OLCrystal) -> Result<EtalePart> {
    let r = &c.ring;
    let us: Vec<Mat> = (0..c.f())
        .map(|tau| stable_unit_image(r, &linearized_frobenius(c, tau)))
        .collect::<Result<_>>()?;
    let rank = us[0].cols;
    if rank == 0 {
        return Err(Error::EmptyEtalePart);
    }
    if us.iter().any(|u| u.cols != rank) {
        return Err(Error::NotDecomposable("etale ranks differ across embeddings".into()));
    }
    let f = c.f();
    let mut ys = Vec::with_capacity(f);
    for tau in 0..f {
        let image = linalg::mul(r, c.frobenius(tau), &linalg::sigma(r, &us[(tau + f - 1) % f]));
        let a = coordinates_in(r, &us[tau], &image)?;
        ys.push(a);
    }
    let crystal = OLCrystal::new(r.clone(), rank, ys)?;
    Ok(EtalePart {
        crystal,
        embedding: us,
    })
}

/// Coordinates of the columns of `v` in the basis `u` (identity on its pivot rows),
/// checking that the columns really lie in the span.
fn coordinates_in(r: &Ring, u: &Mat, v: &Mat) -> Result<Mat> {
    let rows = pivot_rows(r, u);
    let a = v.select(&rows, &(0..v.cols).collect::<Vec<_>>());
    let back = linalg::mul(r, u, &a);
    if !linalg::eq_at(r, &back, v) {
        return Err(Error::NotDecomposable(
            "Frobenius does not preserve the computed submodule".into(),
        ));
    }
    Ok(a)
}

fn pivot_rows(r: &Ring, u: &Mat) -> Vec<usize> {
    (0..u.cols)
        .map(|k| {
            (0..u.rows)
                .find(|&i| r.is_unit(u.get(i, k)) && (0..u.cols).all(|k2| k2 == k || r.is_zero(u.get(i, k2))))
                .expect("basis has identity pivot rows")
        })
        .collect()
}

/// Reconstructs a basis of the rank-`i` free submodule whose top exterior power is the
/// line spanned by `omega`, using the Plücker coordinates; checks decomposability.
fn plucker_basis(r: &Ring, omega: &[Elem], h: usize, i: usize, tau: usize) -> Result<Mat> {
    let sets = subsets(h, i);
    let Some(ii) = sets.iter().position(|s| {
        let idx = linalg::subset_index(h, s);
        r.is_unit(&omega[idx])
    }) else {
        return Err(Error::NotDecomposable("etale line has no unit Plücker coordinate".into()));
    };
    let base = sets[ii].clone();
    let inv = r.inv_unit(&omega[ii])?;
    let mut b = Mat::zero(r, h, i, tau);
    for (k, &ik) in base.iter().enumerate() {
        for j in 0..h {
            if base.contains(&j) {
                b.set(j, k, if j == ik { r.one(tau) } else { r.zero(tau) });
                continue;
            }
            let mut s: Vec<usize> = base.iter().copied().filter(|x| *x != ik).collect();
            s.push(j);
            s.sort_unstable();
            let q = s.iter().position(|x| *x == j).unwrap();
            let coord = r.mul(&omega[linalg::subset_index(h, &s)], &inv);
            let sign_neg = (q as i64 - k as i64).rem_euclid(2) == 1;
            b.set(j, k, if sign_neg { r.neg(&coord) } else { coord });
        }
    }
    let check = linalg::compound(r, &b, i);
    let scaled: Vec<Elem> = omega.iter().map(|x| r.mul(x, &inv)).collect();
    for (k, x) in scaled.iter().enumerate() {
        if !r.eq_at(check.get(k, 0), x) {
            return Err(Error::NotDecomposable(
                "etale line of the exterior power is not decomposable".into(),
            ));
        }
    }
    Ok(b)
}

fn to_units(x: &BigRational, scale: i64) -> Result<u32> {
    let v = x * BigRational::from_integer(BigInt::from(scale));
    if !v.is_integer() {
        return Err(Error::NotABreakContact(0));
    }
    v.to_integer()
        .to_u32()
        .ok_or_else(|| Error::InvalidInput("negative ordinate".into()))
}

/// Result of a Hodge-Newton splitting.
#[derive(Debug, Clone)]
pub struct HnSplit {
    /// Factor carrying the `i` smallest slopes.
    pub lower: OLCrystal,
    /// Factor carrying the remaining slopes.
    pub upper: OLCrystal,
    /// Per embedding, the change of basis `[B_1 | B_2]`.
    pub basis: Vec<Mat>,
}

/// Splits the crystal at a Newton breakpoint `i` that lies on the Hodge polygon.
pub fn hn_split(c: &OLCrystal, i: usize) -> Result<HnSplit> {
    let newt = newton_polygon(c)?;
    let hdg = hodge_polygon(c)?;
    if i == 0 || i >= c.h || !newt.breakpoints().contains(&i) || newt.eval(i)? != hdg.eval(i)? {
        return Err(Error::NotABreakContact(i));
    }
    let max = crate::arith::modint::max_digits(c.ring.p());
    let mut digits = (c.ring.digits() * 2).min(max);
    let mut last_err = None;
    for _ in 0..3 {
        let boosted = c.with_precision(digits)?;
        match hn_split_at(&boosted, i, &newt) {
            Err(Error::PrecisionExhausted(m)) => last_err = Some(Error::PrecisionExhausted(m)),
            other => return other,
        }
        if digits >= max {
            break;
        }
        digits = (digits * 2).min(max);
    }
    Err(last_err.unwrap())
}

fn hn_split_at(c: &OLCrystal, i: usize, newt: &Polygon) -> Result<HnSplit> {
    let r = &c.ring;
    let h = c.h;
    let f = c.f();
    let (e, n) = (c.e() as i64, c.n() as i64);
    let lower_shift = to_units(&newt.eval(i)?, e * n).map_err(|_| Error::NotABreakContact(i))?;
    let total = newt.eval(h)?;
    let upper_slope = BigRational::from_integer(BigInt::from((h - i) as i64)) - (&total - newt.eval(i)?);
    let upper_shift = to_units(&upper_slope, e * n).map_err(|_| Error::NotABreakContact(i))?;
    let mut bases = Vec::with_capacity(f);
    for tau in 0..f {
        let z = linearized_frobenius(c, tau);
        let w1 = linalg::div_pi_pow(r, &linalg::compound(r, &z, i), lower_shift)?;
        let line1 = stable_unit_image(r, &w1)?;
        if line1.cols != 1 {
            return Err(Error::NotDecomposable(format!(
                "slope-zero part of the twisted exterior power has rank {}",
                line1.cols
            )));
        }
        let b1 = plucker_basis(r, &line1.col(0), h, i, tau)?;
        // p^n Z^{-1} carries the remaining slopes as its smallest ones
        let pn = r.pow(&r.from_int(r.p() as i128, tau), n as u64);
        let zinv = linalg::solve(r, &z, &linalg::scale(r, &pn, &Mat::identity(r, h, tau)))?;
        let w2 = linalg::div_pi_pow(r, &linalg::compound(r, &zinv, h - i), upper_shift)?;
        let line2 = stable_unit_image(r, &w2)?;
        if line2.cols != 1 {
            return Err(Error::NotDecomposable(format!(
                "slope-zero part of the dual twisted exterior power has rank {}",
                line2.cols
            )));
        }
        let b2 = plucker_basis(r, &line2.col(0), h, h - i, tau)?;
        let p = b1.hstack(&b2);
        if !r.is_unit(&linalg::det(r, &p)) {
            return Err(Error::NotDecomposable("the two factors are not complementary".into()));
        }
        bases.push(p);
    }
    let mut lower = Vec::with_capacity(f);
    let mut upper = Vec::with_capacity(f);
    let lo: Vec<usize> = (0..i).collect();
    let hi: Vec<usize> = (i..h).collect();
    for tau in 0..f {
        let rhs = linalg::mul(r, c.frobenius(tau), &linalg::sigma(r, &bases[(tau + f - 1) % f]));
        let y = linalg::solve(r, &bases[tau], &rhs)?;
        let off1 = y.select(&hi, &lo);
        let off2 = y.select(&lo, &hi);
        if !linalg::is_zero(r, &off1) || !linalg::is_zero(r, &off2) {
            return Err(Error::NotDecomposable(
                "Frobenius is not block diagonal in the split basis".into(),
            ));
        }
        lower.push(y.select(&lo, &lo));
        upper.push(y.select(&hi, &hi));
    }
    Ok(HnSplit {
        lower: OLCrystal::new(r.clone(), i, lower)?,
        upper: OLCrystal::new(r.clone(), h - i, upper)?,
        basis: bases,
    })
}

/// One certified block of a mu-ordinary decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub multiplicity: usize,
    pub slope_datum: SlopeDatum,
}

/// Splits a mu-ordinary crystal at the breaks of its PR polygon and certifies that each
/// factor, after dividing `F_tau` by `pi^{alpha_{j,tau}}`, is etale of full rank.
/// Blocks are returned in the order `j = 1, ..., r+1`.
pub fn mu_ordinary_decomposition(
    c: &OLCrystal,
    fil: &PRFiltration,
    mu: &PRDatum,
) -> Result<Vec<Block>> {
    let report = validate_pr(c, fil, mu)?;
    if let Some(msg) = report.first_failure() {
        return Err(Error::InvalidInput(msg.to_string()));
    }
    if !is_mu_ordinary(c, mu)? {
        return Err(Error::NotMuOrdinary);
    }
    let bd = break_data(mu);
    let mut blocks = Vec::new();
    let mut rest = c.clone();
    for j in (1..=bd.r() + 1).rev() {
        let m = bd.multiplicity(j);
        let factor = if j == 1 {
            rest.clone()
        } else {
            let split = hn_split(&rest, m)?;
            rest = split.upper;
            split.lower
        };
        certify_block(&factor, &bd.alpha[j - 1])?;
        blocks.push(Block {
            multiplicity: m,
            slope_datum: SlopeDatum {
                beta: bd.alpha[j - 1].clone(),
            },
        });
    }
    blocks.reverse();
    Ok(blocks)
}

fn certify_block(factor: &OLCrystal, alpha: &[usize]) -> Result<()> {
    let r = &factor.ring;
    let y = factor
        .y
        .iter()
        .enumerate()
        .map(|(tau, m)| linalg::div_pi_pow(r, m, alpha[tau] as u32))
        .collect::<Result<Vec<_>>>()
        .map_err(|_| Error::NotMuOrdinary)?;
    let twisted = OLCrystal::new(r.clone(), factor.h, y).map_err(|_| Error::NotMuOrdinary)?;
    let et = etale_part(&twisted).map_err(|e| match e {
        Error::EmptyEtalePart => Error::NotMuOrdinary,
        other => other,
    })?;
    if et.crystal.h != factor.h {
        return Err(Error::NotMuOrdinary);
    }
    Ok(())
}

/// A planted Hodge-Newton instance: a scrambled block-diagonal crystal with known blocks.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub crystal: OLCrystal,
    /// Ranks of the planted isoclinic blocks, in increasing slope order.
    pub ranks: Vec<usize>,
    /// Newton polygon of each block.
    pub block_polygons: Vec<Polygon>,
}

impl PlantedInstance {
    /// Abscissas of the internal breakpoints between planted blocks.
    pub fn internal_breaks(&self) -> Vec<usize> {
        let mut acc = 0;
        let mut out = Vec::new();
        for r in &self.ranks[..self.ranks.len() - 1] {
            acc += r;
            out.push(acc);
        }
        out
    }
}

/// Builds 2 or 3 isoclinic blocks (rank one `pi^{beta}`, or rank two and anti-diagonal at
/// the first embedding),
/// with per-embedding exponents increasing from block to block and distinct slopes,
/// then conjugates by random invertible changes of basis.
pub fn planted_hn_instance(ring: &Arc<Ring>, seed: u64) -> Result<PlantedInstance> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let e = ring.e();
    let f = ring.f();
    loop {
        let nblocks = rng.gen_range(2..=3);
        let mut floor = vec![0usize; f];
        let mut blocks: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
        let mut ok = true;
        for _ in 0..nblocks {
            let rank = rng.gen_range(1..=2);
            let mut exps = Vec::with_capacity(f);
            for fl in floor.iter_mut() {
                if *fl > e {
                    ok = false;
                    break;
                }
                let a = rng.gen_range(*fl..=e);
                let b = if rank == 2 { rng.gen_range(a..=e) } else { a };
                exps.push((a, b));
                *fl = b;
            }
            if !ok {
                break;
            }
            blocks.push((rank, exps));
        }
        if !ok {
            continue;
        }
        let slopes: Vec<BigRational> = blocks
            .iter()
            .map(|(rank, exps)| {
                let s: usize = exps.iter().map(|(a, b)| if *rank == 1 { *a } else { a + b }).sum();
                BigRational::new(BigInt::from(s), BigInt::from(rank * e * f))
            })
            .collect();
        if slopes.windows(2).any(|w| w[0] >= w[1]) {
            continue;
        }
        let h: usize = blocks.iter().map(|b| b.0).sum();
        let mut ys = Vec::with_capacity(f);
        for tau in 0..f {
            let mats: Vec<Mat> = blocks
                .iter()
                .map(|(rank, exps)| {
                    let (a, b) = exps[tau];
                    if *rank == 1 {
                        Mat::diag(ring, &[ring.pi_pow(a as u32, tau)], tau)
                    } else if tau == 0 {
                        let mut m = Mat::zero(ring, 2, 2, tau);
                        m.set(0, 1, ring.pi_pow(a as u32, tau));
                        m.set(1, 0, ring.pi_pow(b as u32, tau));
                        m
                    } else {
                        Mat::diag(ring, &[ring.pi_pow(a as u32, tau), ring.pi_pow(b as u32, tau)], tau)
                    }
                })
                .collect();
            ys.push(Mat::block_diag(ring, &mats, tau));
        }
        let qs: Vec<Mat> = (0..f).map(|tau| random_gl(ring, h, tau, false, &mut rng)).collect();
        let mut scrambled = Vec::with_capacity(f);
        for tau in 0..f {
            let rhs = linalg::mul(ring, &ys[tau], &linalg::sigma(ring, &qs[(tau + f - 1) % f]));
            scrambled.push(linalg::solve(ring, &qs[tau], &rhs)?);
        }
        let crystal = OLCrystal::new(ring.clone(), h, scrambled)?;
        let block_polygons = blocks
            .iter()
            .zip(&slopes)
            .map(|((rank, _), s)| Polygon::from_slopes(vec![s.clone(); *rank]))
            .collect();
        return Ok(PlantedInstance {
            crystal,
            ranks: blocks.iter().map(|b| b.0).collect(),
            block_polygons,
        });
    }
}

/// Per-embedding Hodge polygons of a factor (helper for split checks).
pub fn hodge_polygons(c: &OLCrystal) -> Result<Vec<Polygon>> {
    (0..c.f()).map(|t| hodge_polygon_tau(c, t)).collect()
}
