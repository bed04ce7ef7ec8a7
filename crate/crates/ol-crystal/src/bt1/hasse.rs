//! Hasse invariants of truncated data, built from `wedge^d` of Verschiebung with the
//! division by powers of `pi` replaced by multiplication by `pi` on selected factors.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

use super::{pullback_filtration, validate_bt1, Bt1Crystal, RElem, Solver, Span, Vector};
use crate::crystal::PRDatum;
use crate::error::{Error, Result};
use crate::linalg::subsets;

/// Which factors carrying a lower-level component receive the extra `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitChoice {
    First,
    Last,
}

/// How preimages under Frobenius are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreimageChoice {
    /// Free coordinates set to zero.
    Canonical,
    /// Canonical preimage plus a pseudo-random kernel element.
    Random(u64),
}

/// `coef * (v_1 ^ ... ^ v_d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeTerm {
    pub coef: RElem,
    pub vectors: Vec<Vector>,
}

/// Decomposition `v = sum_k r_k c_k + b` with `b` in the lower level.
struct Graded {
    lifts: Vec<Vector>,
    solver: Solver,
}

impl Graded {
    /// Lifts are taken greedily from `candidates`, independent modulo
    /// `lower + m_R upper`.
    fn new(b: &Bt1Crystal, upper: &Span, lower: &Span, candidates: &[Vector]) -> Result<Graded> {
        let fq = b.algebra.fq();
        let rank = b.graded_rank(upper, lower)?;
        let mut acc = lower.sum(fq, &b.max_ideal_times(upper));
        let mut lifts = Vec::new();
        for v in candidates {
            if lifts.len() == rank {
                break;
            }
            if acc.insert(fq, v) {
                lifts.push(v.clone());
            }
        }
        if lifts.len() != rank {
            return Err(Error::NotASummand("candidates do not generate the graded piece".into()));
        }
        let mut cols = Vec::new();
        for c in &lifts {
            for t in 0..b.m() {
                cols.push(b.r_mul(&b.algebra.basis_elem(t), c));
            }
        }
        cols.extend(lower.basis().iter().cloned());
        let solver = Solver::new(fq, b.dim(), &cols);
        Ok(Graded { lifts, solver })
    }

    fn decompose(&self, b: &Bt1Crystal, v: &[u64]) -> Result<(Vec<RElem>, Vector)> {
        let m = b.m();
        let x = self
            .solver
            .solve(b.algebra.fq(), v)
            .ok_or_else(|| Error::HypothesisViolated("vector lies outside the filtration level".into()))?;
        let r: Vec<RElem> = (0..self.lifts.len()).map(|k| x[k * m..(k + 1) * m].to_vec()).collect();
        let mut rest = v.to_vec();
        for (rk, c) in r.iter().zip(&self.lifts) {
            rest = b.sub_vec(&rest, &b.r_mul(rk, c));
        }
        Ok((r, rest))
    }
}

/// Every assignment of a lift index (or `None` for the lower component) to each factor,
/// with lift indices pairwise distinct.
fn assignments(d: usize, nlifts: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for a in &out {
            next.push({
                let mut b = a.clone();
                b.push(None);
                b
            });
            for k in 0..nlifts {
                if !a.contains(&Some(k)) {
                    let mut b = a.clone();
                    b.push(Some(k));
                    next.push(b);
                }
            }
        }
        out = next;
    }
    out
}

/// One descent step from level `j` to level `j - 1` of `levels`, on wedges of degree `d`:
/// every factor is split into its graded part and its lower part, each graded factor is
/// multiplied by `pi`, and `min(d, rank) - #graded` lower factors are multiplied by `pi`.
pub fn wedge_pi_induced(
    b: &Bt1Crystal,
    levels: &[Span],
    j: usize,
    d: usize,
    terms: &[WedgeTerm],
    choice: SplitChoice,
) -> Result<Vec<WedgeTerm>> {
    let upper = &levels[j];
    let graded = Graded::new(b, upper, &levels[j - 1], upper.basis())?;
    let s = d.min(graded.lifts.len());
    let lifted: Vec<Vector> = graded.lifts.iter().map(|c| b.pi_mul(c)).collect();
    let patterns = assignments(d, graded.lifts.len());
    let mut out = Vec::new();
    for term in terms {
        let decs = term
            .vectors
            .iter()
            .map(|v| graded.decompose(b, v))
            .collect::<Result<Vec<_>>>()?;
        let pi_rest: Vec<Vector> = decs.iter().map(|(_, rest)| b.pi_mul(rest)).collect();
        for pat in &patterns {
            let mut coef = term.coef.clone();
            for (pos, a) in pat.iter().enumerate() {
                if let Some(k) = a {
                    coef = b.algebra.mul(&coef, &decs[pos].0[*k]);
                }
            }
            if b.algebra.is_zero(&coef) {
                continue;
            }
            let lower_pos: Vec<usize> = (0..d).filter(|pos| pat[*pos].is_none()).collect();
            let need = s - (d - lower_pos.len());
            let boosted: Vec<usize> = match choice {
                SplitChoice::First => lower_pos[..need].to_vec(),
                SplitChoice::Last => lower_pos[lower_pos.len() - need..].to_vec(),
            };
            let vectors: Vec<Vector> = pat
                .iter()
                .enumerate()
                .map(|(pos, a)| match a {
                    Some(k) => lifted[*k].clone(),
                    None if boosted.contains(&pos) => pi_rest[pos].clone(),
                    None => decs[pos].1.clone(),
                })
                .collect();
            if vectors.iter().any(|v| b.is_zero_vector(v)) {
                continue;
            }
            out.push(WedgeTerm { coef, vectors });
        }
    }
    Ok(out)
}

/// Plucker coordinates over `R` of `d` vectors of `R^h`, indexed by increasing subsets.
fn plucker(b: &Bt1Crystal, vecs: &[Vec<RElem>]) -> Vec<RElem> {
    let d = vecs.len();
    subsets(b.h, d)
        .iter()
        .map(|set| {
            let m: Vec<Vec<RElem>> = set
                .iter()
                .map(|&row| vecs.iter().map(|v| v[row].clone()).collect())
                .collect();
            b.algebra.det(&m)
        })
        .collect()
}

fn accumulate(b: &Bt1Crystal, acc: &mut [RElem], coef: &RElem, v: &[RElem]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = b.algebra.add(a, &b.algebra.mul(coef, x));
    }
}

/// Final step on wedges of level-one vectors of `E_{tau+1}` (for `levels` the pullback
/// filtration there): graded factors go to `V(c) / pi^{e-1}`, lower factors to
/// `u F^{-1}(b)`, both modulo `pi`; the result is in Plucker coordinates.
pub fn h_map(
    b: &Bt1Crystal,
    tau: usize,
    levels: &[Span],
    d: usize,
    terms: &[WedgeTerm],
    preimage: PreimageChoice,
) -> Result<Vec<RElem>> {
    let f = b.f();
    let src = (tau + 1) % f;
    let fq = b.algebra.fq();
    let graded = Graded::new(b, &levels[1], &levels[0], levels[1].basis())?;
    let s = d.min(graded.lifts.len());
    let images = graded
        .lifts
        .iter()
        .map(|c| {
            b.div_pi_mod_pi(&b.apply(&b.ver[src], c), b.e - 1).ok_or_else(|| {
                Error::HypothesisViolated("Verschiebung of a level-one vector is not divisible by pi^(e-1)".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let basis = b.k_basis();
    let cols: Vec<Vector> = basis.iter().map(|x| b.apply(&b.frob[src], x)).collect();
    let frob_solver = Solver::new(fq, b.dim(), &cols);
    let mut rng = match preimage {
        PreimageChoice::Canonical => None,
        PreimageChoice::Random(seed) => Some(Xoshiro256StarStar::seed_from_u64(seed)),
    };
    let unit = b.algebra.scalar(b.units[src]);
    let mut lower_image = |v: &Vector| -> Result<Vec<RElem>> {
        let mut x = frob_solver
            .solve(fq, v)
            .ok_or_else(|| Error::NoPreimage("lower component is not in the image of Frobenius".into()))?;
        if let Some(rng) = rng.as_mut() {
            for k in frob_solver.kernel() {
                let c = fq.random(rng);
                for (xi, ki) in x.iter_mut().zip(k) {
                    *xi = fq.add(*xi, fq.mul(c, *ki));
                }
            }
        }
        let mut pre = b.zero_vector();
        for (c, e) in x.iter().zip(&basis) {
            if !fq.is_zero(*c) {
                pre = b.add_vec(&pre, &e.iter().map(|y| fq.mul(*c, *y)).collect::<Vec<_>>());
            }
        }
        Ok((0..b.h).map(|row| b.algebra.mul(&unit, &b.coeff(&pre, row, 0))).collect())
    };
    let n = subsets(b.h, d).len();
    let mut acc = vec![b.algebra.zero(); n];
    let patterns: Vec<Vec<Option<usize>>> = assignments(d, graded.lifts.len())
        .into_iter()
        .filter(|p| p.iter().filter(|a| a.is_some()).count() == s)
        .collect();
    for term in terms {
        let decs = term
            .vectors
            .iter()
            .map(|v| graded.decompose(b, v))
            .collect::<Result<Vec<_>>>()?;
        let mut rest_images = Vec::with_capacity(d);
        for (r, rest) in &decs {
            let _ = r;
            rest_images.push(if s < d { Some(lower_image(rest)?) } else { None });
        }
        for pat in &patterns {
            let mut coef = term.coef.clone();
            for (pos, a) in pat.iter().enumerate() {
                if let Some(k) = a {
                    coef = b.algebra.mul(&coef, &decs[pos].0[*k]);
                }
            }
            if b.algebra.is_zero(&coef) {
                continue;
            }
            let vecs: Vec<Vec<RElem>> = pat
                .iter()
                .enumerate()
                .map(|(pos, a)| match a {
                    Some(k) => images[*k].clone(),
                    None => rest_images[pos].clone().expect("computed when s < d"),
                })
                .collect();
            accumulate(b, &mut acc, &coef, &plucker(b, &vecs));
        }
    }
    Ok(acc)
}

/// Matrix (rows and columns indexed by subsets) of the map
/// `wedge^d E_{tau+1} -> wedge^d (E_tau^{(p)} / pi)` induced by `wedge^d V_{tau+1}`.
fn zeta_matrix(
    b: &Bt1Crystal,
    tau: usize,
    d: usize,
    split: SplitChoice,
    preimage: PreimageChoice,
) -> Result<Vec<Vec<RElem>>> {
    let src = (tau + 1) % b.f();
    let levels = pullback_filtration(b, src)?;
    let sets = subsets(b.h, d);
    let mut cols = Vec::with_capacity(sets.len());
    for set in &sets {
        let mut terms = vec![WedgeTerm {
            coef: b.algebra.one(),
            vectors: set.iter().map(|&s| b.basis_vector(s, 0, 0)).collect(),
        }];
        for j in (2..=b.e).rev() {
            terms = wedge_pi_induced(b, &levels, j, d, &terms, split)?;
        }
        cols.push(h_map(b, tau, &levels, d, &terms, preimage)?);
    }
    Ok((0..sets.len())
        .map(|row| cols.iter().map(|c| c[row].clone()).collect())
        .collect())
}

/// Generators of `omega^{[i]}_tau` spanning its graded piece, taken greedily in order.
fn graded_basis(b: &Bt1Crystal, tau: usize, i: usize) -> Result<Vec<Vector>> {
    let upper = b.level_span(tau, i);
    let lower = b.level_span(tau, i - 1);
    Ok(Graded::new(b, &upper, &lower, &b.omega[tau][i])?.lifts)
}

/// Row vector of `wedge^d E_{tau+1} -> (det Gr^{[i]} omega_tau)^{(p)}`: Verschiebung, descent
/// through the twisted levels above `i`, then the coefficient on the twisted basis.
fn projection_row(
    b: &Bt1Crystal,
    tau: usize,
    i: usize,
    us: &[Vector],
    split: SplitChoice,
) -> Result<Vec<RElem>> {
    let src = (tau + 1) % b.f();
    let d = us.len();
    let levels: Vec<Span> = (0..=b.e).map(|j| b.twisted_level_span(tau, j)).collect();
    let twisted: Vec<Vector> = us.iter().map(|u| b.twist(u)).collect();
    let graded = Graded::new(b, &levels[i], &levels[i - 1], &twisted)?;
    if graded.lifts.len() != d {
        return Err(Error::NotASummand("twisted graded basis has the wrong rank".into()));
    }
    let mut row = Vec::new();
    for set in subsets(b.h, d) {
        let mut terms = vec![WedgeTerm {
            coef: b.algebra.one(),
            vectors: set.iter().map(|&s| b.apply(&b.ver[src], &b.basis_vector(s, 0, 0))).collect(),
        }];
        for j in (i + 1..=b.e).rev() {
            terms = wedge_pi_induced(b, &levels, j, d, &terms, split)?;
        }
        let mut acc = b.algebra.zero();
        for term in &terms {
            let mut m = vec![vec![b.algebra.zero(); d]; d];
            for (pos, v) in term.vectors.iter().enumerate() {
                let (r, _) = graded.decompose(b, v)?;
                for k in 0..d {
                    m[k][pos] = r[k].clone();
                }
            }
            acc = b.algebra.add(&acc, &b.algebra.mul(&term.coef, &b.algebra.det(&m)));
        }
        row.push(acc);
    }
    Ok(row)
}

fn frob_matrix(b: &Bt1Crystal, m: &[Vec<RElem>], k: usize) -> Vec<Vec<RElem>> {
    m.iter()
        .map(|row| row.iter().map(|x| b.algebra.frob_pow(x, k)).collect())
        .collect()
}

fn mat_vec(b: &Bt1Crystal, m: &[Vec<RElem>], v: &[RElem]) -> Vec<RElem> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(b.algebra.zero(), |a, (x, y)| b.algebra.add(&a, &b.algebra.mul(x, y)))
        })
        .collect()
}

fn hasse_once(
    b: &Bt1Crystal,
    tau: usize,
    i: usize,
    split: SplitChoice,
    preimage: PreimageChoice,
) -> Result<RElem> {
    let f = b.f();
    let us = graded_basis(b, tau, i)?;
    let reduced = us
        .iter()
        .map(|u| {
            b.div_pi_mod_pi(u, b.e - i)
                .ok_or_else(|| Error::HypothesisViolated(format!("level {i} is not killed by pi^{i}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut v = plucker(b, &reduced);
    for k in 1..f {
        let z = zeta_matrix(b, (tau + f - k) % f, us.len(), split, preimage)?;
        v = mat_vec(b, &frob_matrix(b, &z, k - 1), &v);
    }
    let q = projection_row(b, tau, i, &us, split)?;
    let q = frob_matrix(b, &[q], f - 1).remove(0);
    Ok(q
        .iter()
        .zip(&v)
        .fold(b.algebra.zero(), |a, (x, y)| b.algebra.add(&a, &b.algebra.mul(x, y))))
}

/// Coefficient in `R` of `Ha_tau^{[i]} : det Gr^{[i]} -> (det Gr^{[i]})^{(p^f)}` in the
/// greedy graded basis.  Both placements of the extra `pi` factors are computed and
/// must agree.
pub fn general_hasse(
    b: &Bt1Crystal,
    mu: &PRDatum,
    tau: usize,
    i: usize,
    preimage: PreimageChoice,
) -> Result<RElem> {
    if !mu.is_ordered() {
        return Err(Error::OrderedDatumRequired);
    }
    let report = validate_bt1(b, mu);
    if let Some(msg) = report.first_failure() {
        return Err(Error::HypothesisViolated(msg.to_string()));
    }
    if i == 0 || i > b.e || tau >= b.f() {
        return Err(Error::InvalidInput(format!("no Hasse invariant at ({tau}, {i})")));
    }
    if mu.d(tau, i) == 0 {
        return Ok(b.algebra.one());
    }
    let first = hasse_once(b, tau, i, SplitChoice::First, preimage)?;
    let last = hasse_once(b, tau, i, SplitChoice::Last, preimage)?;
    if first != last {
        return Err(Error::WellDefinednessFailure(format!(
            "Hasse invariant at ({tau}, {i}) depends on the split: {} vs {}",
            b.algebra.format(&first),
            b.algebra.format(&last)
        )));
    }
    Ok(first)
}

/// One line of a [`GeneralHasseReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralHasseEntry {
    pub tau: usize,
    pub i: usize,
    pub d: usize,
    pub value: RElem,
    pub nonzero: bool,
    pub unit: bool,
}

/// All invariants and their product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralHasseReport {
    pub entries: Vec<GeneralHasseEntry>,
    pub total: RElem,
    pub total_nonzero: bool,
    pub total_unit: bool,
}

pub fn total_general_hasse(b: &Bt1Crystal, mu: &PRDatum, preimage: PreimageChoice) -> Result<GeneralHasseReport> {
    if !mu.is_ordered() {
        return Err(Error::OrderedDatumRequired);
    }
    let mut entries = Vec::new();
    let mut total = b.algebra.one();
    for tau in 0..b.f() {
        for i in 1..=b.e {
            let value = general_hasse(b, mu, tau, i, preimage)?;
            total = b.algebra.mul(&total, &value);
            entries.push(GeneralHasseEntry {
                tau,
                i,
                d: mu.d(tau, i),
                nonzero: !b.algebra.is_zero(&value),
                unit: b.algebra.is_unit(&value),
                value,
            });
        }
    }
    Ok(GeneralHasseReport {
        entries,
        total_nonzero: !b.algebra.is_zero(&total),
        total_unit: b.algebra.is_unit(&total),
        total,
    })
}
