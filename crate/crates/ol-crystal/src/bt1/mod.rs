//! Truncated crystals over finite local algebras `R` over `k`: free modules over
//! `R[pi]/(pi^e)` with Frobenius, Verschiebung and PR filtrations, and the Hasse
//! invariants attached to them.
//!
//! Vectors of `E_tau = (R[pi]/pi^e)^h` are flat `k`-vectors indexed by
//! `(row * e + a) * m + s`, the coefficient of `pi^a b_s` in coordinate `row`, where
//! `b_0 = 1, ..., b_{m-1}` is the basis of `R`.

pub mod artin;
mod hasse;
pub mod kspace;
mod dual_family;

use crate::arith::{FqElem, Ring};
use crate::crystal::{OLCrystal, PRDatum, PRFiltration, ValidationReport};
use crate::error::{Error, Result};
use crate::hasse::d_filtration;
use crate::linalg::{self, Mat};

pub use artin::{format_fq, ArtinAlgebra, RElem};
pub use hasse::{
    general_hasse, h_map, total_general_hasse, wedge_pi_induced, GeneralHasseEntry,
    GeneralHasseReport, PreimageChoice, SplitChoice, WedgeTerm,
};
pub use kspace::{Solver, Span};
pub use dual_family::{dual_family_ordered, dual_family_unordered};

/// Flat vector of `E_tau`.
pub type Vector = Vec<FqElem>;

/// A matrix over `R[pi]/(pi^e)`; entry `(i, j)` has coefficients indexed by `a * m + s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<FqElem>>,
}

impl AMat {
    pub fn get(&self, i: usize, j: usize) -> &[FqElem] {
        &self.data[i * self.cols + j]
    }
}

/// The data `(E_tau, F_tau, V_tau, omega^{[i]}_tau)` over `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bt1Crystal {
    pub algebra: ArtinAlgebra,
    pub e: usize,
    pub h: usize,
    /// Residue of `p / pi^e` acting on modules with coefficients of embedding `tau`.
    pub units: Vec<FqElem>,
    /// `F_tau : E_{tau-1}^{(p)} -> E_tau`.
    pub frob: Vec<AMat>,
    /// `V_tau : E_tau -> E_{tau-1}^{(p)}`.
    pub ver: Vec<AMat>,
    /// `omega[tau][i]` generates `omega^{[i]}_tau` over `R`, for `i = 0, ..., e`.
    pub omega: Vec<Vec<Vec<Vector>>>,
}

impl Bt1Crystal {
    pub fn f(&self) -> usize {
        self.frob.len()
    }
    pub fn m(&self) -> usize {
        self.algebra.dim()
    }
    /// `k`-dimension of `E_tau`.
    pub fn dim(&self) -> usize {
        self.h * self.e * self.m()
    }

    // ---- vectors -----------------------------------------------------------------

    fn idx(&self, row: usize, a: usize) -> usize {
        (row * self.e + a) * self.m()
    }

    /// Coefficient of `pi^a` in coordinate `row`.
    pub fn coeff(&self, v: &[FqElem], row: usize, a: usize) -> RElem {
        let i = self.idx(row, a);
        v[i..i + self.m()].to_vec()
    }

    fn set_coeff(&self, v: &mut [FqElem], row: usize, a: usize, x: &RElem) {
        let i = self.idx(row, a);
        v[i..i + self.m()].copy_from_slice(x);
    }

    pub fn zero_vector(&self) -> Vector {
        vec![self.algebra.fq().zero(); self.dim()]
    }

    /// The `k`-basis vector `pi^a b_s e_row`.
    pub fn basis_vector(&self, row: usize, a: usize, s: usize) -> Vector {
        let mut v = self.zero_vector();
        v[self.idx(row, a) + s] = self.algebra.fq().one();
        v
    }

    pub fn k_basis(&self) -> Vec<Vector> {
        let mut out = Vec::with_capacity(self.dim());
        for row in 0..self.h {
            for a in 0..self.e {
                for s in 0..self.m() {
                    out.push(self.basis_vector(row, a, s));
                }
            }
        }
        out
    }

    pub fn is_zero_vector(&self, v: &[FqElem]) -> bool {
        v.iter().all(|x| self.algebra.fq().is_zero(*x))
    }

    pub fn add_vec(&self, a: &[FqElem], b: &[FqElem]) -> Vector {
        let fq = self.algebra.fq();
        a.iter().zip(b).map(|(x, y)| fq.add(*x, *y)).collect()
    }

    pub fn sub_vec(&self, a: &[FqElem], b: &[FqElem]) -> Vector {
        let fq = self.algebra.fq();
        a.iter().zip(b).map(|(x, y)| fq.sub(*x, *y)).collect()
    }

    /// Multiplication by `pi`.
    pub fn pi_mul(&self, v: &[FqElem]) -> Vector {
        let mut out = self.zero_vector();
        for row in 0..self.h {
            for a in 0..self.e - 1 {
                let c = self.coeff(v, row, a);
                self.set_coeff(&mut out, row, a + 1, &c);
            }
        }
        out
    }

    /// Multiplication by an element of `R`.
    pub fn r_mul(&self, r: &RElem, v: &[FqElem]) -> Vector {
        let mut out = self.zero_vector();
        for row in 0..self.h {
            for a in 0..self.e {
                let c = self.algebra.mul(r, &self.coeff(v, row, a));
                self.set_coeff(&mut out, row, a, &c);
            }
        }
        out
    }

    /// Coefficient-wise Frobenius: a vector of `E` viewed in `E^{(p)}`.
    pub fn twist(&self, v: &[FqElem]) -> Vector {
        let mut out = self.zero_vector();
        for row in 0..self.h {
            for a in 0..self.e {
                let c = self.algebra.frob(&self.coeff(v, row, a));
                self.set_coeff(&mut out, row, a, &c);
            }
        }
        out
    }

    /// `v / pi^k` reduced modulo `pi`, when `v` lies in `pi^k E`.
    pub fn div_pi_mod_pi(&self, v: &[FqElem], k: usize) -> Option<Vec<RElem>> {
        for row in 0..self.h {
            for a in 0..k.min(self.e) {
                if !self.algebra.is_zero(&self.coeff(v, row, a)) {
                    return None;
                }
            }
        }
        if k >= self.e {
            return Some(vec![self.algebra.zero(); self.h]);
        }
        Some((0..self.h).map(|row| self.coeff(v, row, k)).collect())
    }

    fn amul(&self, x: &[FqElem], y: &[FqElem]) -> Vec<FqElem> {
        let m = self.m();
        let mut out = vec![self.algebra.fq().zero(); self.e * m];
        for a in 0..self.e {
            let xa = x[a * m..(a + 1) * m].to_vec();
            if self.algebra.is_zero(&xa) {
                continue;
            }
            for b in 0..self.e - a {
                let yb = y[b * m..(b + 1) * m].to_vec();
                let prod = self.algebra.mul(&xa, &yb);
                for s in 0..m {
                    out[(a + b) * m + s] = self.algebra.fq().add(out[(a + b) * m + s], prod[s]);
                }
            }
        }
        out
    }

    /// Applies a matrix over `R[pi]/pi^e`.
    pub fn apply(&self, mat: &AMat, v: &[FqElem]) -> Vector {
        let m = self.m();
        let mut out = self.zero_vector();
        let coords: Vec<Vec<FqElem>> = (0..self.h)
            .map(|row| {
                let i = self.idx(row, 0);
                v[i..i + self.e * m].to_vec()
            })
            .collect();
        for i in 0..mat.rows {
            let mut acc = vec![self.algebra.fq().zero(); self.e * m];
            for (j, cj) in coords.iter().enumerate() {
                let t = self.amul(mat.get(i, j), cj);
                for (x, y) in acc.iter_mut().zip(&t) {
                    *x = self.algebra.fq().add(*x, *y);
                }
            }
            let k = self.idx(i, 0);
            out[k..k + self.e * m].copy_from_slice(&acc);
        }
        out
    }

    pub fn mat_mul(&self, a: &AMat, b: &AMat) -> AMat {
        let fq = self.algebra.fq();
        let zero = vec![fq.zero(); self.e * self.m()];
        let mut data = vec![zero.clone(); a.rows * b.cols];
        for i in 0..a.rows {
            for j in 0..b.cols {
                let mut acc = zero.clone();
                for k in 0..a.cols {
                    let t = self.amul(a.get(i, k), b.get(k, j));
                    for (x, y) in acc.iter_mut().zip(&t) {
                        *x = fq.add(*x, *y);
                    }
                }
                data[i * b.cols + j] = acc;
            }
        }
        AMat {
            rows: a.rows,
            cols: b.cols,
            data,
        }
    }

    /// `R`-span of a list of vectors, as a `k`-subspace.
    pub fn r_span(&self, gens: &[Vector]) -> Span {
        let fq = self.algebra.fq();
        let mut s = Span::zero(self.dim());
        for g in gens {
            for t in 0..self.m() {
                s.insert(fq, &self.r_mul(&self.algebra.basis_elem(t), g));
            }
        }
        s
    }

    /// `m_R` times a subspace.
    pub fn max_ideal_times(&self, span: &Span) -> Span {
        let fq = self.algebra.fq();
        let mut s = Span::zero(self.dim());
        for v in span.basis() {
            for t in 1..self.m() {
                s.insert(fq, &self.r_mul(&self.algebra.basis_elem(t), v));
            }
        }
        s
    }

    /// `k`-span of the image of a linear map on a subspace.
    pub fn image(&self, span: &Span, f: impl Fn(&[FqElem]) -> Vector) -> Span {
        let fq = self.algebra.fq();
        let imgs: Vec<Vector> = span.basis().iter().map(|v| f(v)).collect();
        Span::new(fq, self.dim(), &imgs)
    }

    /// `{x in domain : f(x) in target}`.
    pub fn preimage(&self, domain: &Span, f: impl Fn(&[FqElem]) -> Vector, target: &Span) -> Span {
        let fq = self.algebra.fq();
        let dom = domain.basis();
        let mut cols: Vec<Vector> = dom.iter().map(|v| f(v)).collect();
        cols.extend(target.basis().iter().cloned());
        let solver = Solver::new(fq, self.dim(), &cols);
        let vecs: Vec<Vector> = solver
            .kernel()
            .iter()
            .map(|x| {
                let mut acc = self.zero_vector();
                for (c, v) in x.iter().zip(dom) {
                    if !fq.is_zero(*c) {
                        acc = self.add_vec(&acc, &v.iter().map(|y| fq.mul(*c, *y)).collect::<Vec<_>>());
                    }
                }
                acc
            })
            .collect();
        Span::new(fq, self.dim(), &vecs)
    }

    pub fn full_space(&self) -> Span {
        Span::new(self.algebra.fq(), self.dim(), &self.k_basis())
    }

    /// Rank over `R` of `upper / lower` when that quotient is free, else `NotASummand`.
    pub fn graded_rank(&self, upper: &Span, lower: &Span) -> Result<usize> {
        let fq = self.algebra.fq();
        let reduced = lower.sum(fq, &self.max_ideal_times(upper));
        let top = reduced.sum(fq, upper);
        let d = top.rank() - reduced.rank();
        if upper.rank() - lower.rank() != d * self.m() || !upper.contains_span(fq, lower) {
            return Err(Error::NotASummand(format!(
                "quotient of k-dimension {} over a residue rank {} is not free",
                upper.rank().saturating_sub(lower.rank()),
                d
            )));
        }
        Ok(d)
    }

    /// Whether the `R`-submodule `span` is a direct summand of `E`.
    pub fn is_direct_summand(&self, span: &Span) -> bool {
        let fq = self.algebra.fq();
        let full = self.full_space();
        let m_e = self.max_ideal_times(&full);
        let rank_mod = span.sum(fq, &m_e).rank() - m_e.rank();
        span.rank() == rank_mod * self.m()
    }

    pub fn level_span(&self, tau: usize, i: usize) -> Span {
        self.r_span(&self.omega[tau][i])
    }

    /// The twisted level `(omega^{[i]}_tau)^{(p)}`.
    pub fn twisted_level_span(&self, tau: usize, i: usize) -> Span {
        let gens: Vec<Vector> = self.omega[tau][i].iter().map(|g| self.twist(g)).collect();
        self.r_span(&gens)
    }

    // ---- construction ------------------------------------------------------------

    /// Reduction modulo `p` of a crystal with a PR filtration, over `R = k`.
    pub fn from_crystal(c: &OLCrystal, fil: &PRFiltration) -> Result<Bt1Crystal> {
        let r = &c.ring;
        let algebra = ArtinAlgebra::field(r.residue_field().clone());
        let f = c.f();
        let (e, h) = (c.e(), c.h);
        let mut b = Bt1Crystal {
            algebra,
            e,
            h,
            units: (0..f).map(|t| r.residue(r.unit_u(t))).collect(),
            frob: Vec::with_capacity(f),
            ver: Vec::with_capacity(f),
            omega: Vec::with_capacity(f),
        };
        let pid = |t: usize| linalg::scale(r, &r.from_int(r.p() as i128, t), &Mat::identity(r, h, t));
        for tau in 0..f {
            let prev = (tau + f - 1) % f;
            let y = c.frobenius(prev);
            let fm = linalg::sigma(r, y);
            let vm = linalg::sigma(r, &linalg::solve(r, y, &pid(prev))?);
            b.frob.push(reduce_mat(r, &fm)?);
            b.ver.push(reduce_mat(r, &vm)?);
        }
        for tau in 0..f {
            let mut levels = Vec::with_capacity(e + 1);
            for i in 0..=e {
                let basis = d_filtration(c, fil, tau, i)?;
                let am = reduce_mat(r, &basis)?;
                let mut gens = Vec::new();
                for a in 0..e {
                    for j in 0..h {
                        let mut v = b.zero_vector();
                        for row in 0..h {
                            let entry = am.get(row, j).to_vec();
                            let i0 = b.idx(row, 0);
                            v[i0..i0 + e].copy_from_slice(&entry);
                        }
                        let mut w = v;
                        for _ in 0..a {
                            w = b.pi_mul(&w);
                        }
                        if !b.is_zero_vector(&w) {
                            gens.push(w);
                        }
                    }
                }
                levels.push(gens);
            }
            b.omega.push(levels);
        }
        Ok(b)
    }

    /// Transports the data along a ring map `R -> R'` commuting with Frobenius.
    pub fn map_scalars(&self, target: &ArtinAlgebra, phi: impl Fn(&RElem) -> RElem) -> Result<Bt1Crystal> {
        if target.fq() != self.algebra.fq() {
            return Err(Error::InvalidInput("ring map must be over the same residue field".into()));
        }
        let (m, m2, e) = (self.m(), target.dim(), self.e);
        let map_a = |x: &[FqElem]| -> Vec<FqElem> {
            (0..e).flat_map(|a| phi(&x[a * m..(a + 1) * m].to_vec())).collect()
        };
        let map_mat = |mat: &AMat| AMat {
            rows: mat.rows,
            cols: mat.cols,
            data: mat.data.iter().map(|x| map_a(x)).collect(),
        };
        let map_vec = |v: &Vector| -> Vector {
            (0..self.h)
                .flat_map(|row| {
                    let i = self.idx(row, 0);
                    map_a(&v[i..i + e * m])
                })
                .collect()
        };
        let out = Bt1Crystal {
            algebra: target.clone(),
            e,
            h: self.h,
            units: self.units.clone(),
            frob: self.frob.iter().map(map_mat).collect(),
            ver: self.ver.iter().map(map_mat).collect(),
            omega: self
                .omega
                .iter()
                .map(|levels| levels.iter().map(|g| g.iter().map(map_vec).collect()).collect())
                .collect(),
        };
        debug_assert!(out.frob.iter().all(|f| f.data.iter().all(|x| x.len() == e * m2)));
        Ok(out)
    }

    /// Base change from `R = k` to any algebra.
    pub fn base_change(&self, target: &ArtinAlgebra) -> Result<Bt1Crystal> {
        if self.m() != 1 {
            return Err(Error::InvalidInput("base change starts from the residue field".into()));
        }
        self.map_scalars(target, |x| target.scalar(x[0]))
    }

    /// Reduction `R -> k` modulo the maximal ideal.
    pub fn reduce_to_residue(&self) -> Result<Bt1Crystal> {
        let k = ArtinAlgebra::field(self.algebra.fq().clone());
        self.map_scalars(&k, |x| vec![x[0]])
    }

    /// Graded ranks of the stored filtration at `tau`, certified free.
    pub fn graded_ranks(&self, tau: usize) -> Result<Vec<usize>> {
        let spans: Vec<Span> = (0..=self.e).map(|i| self.level_span(tau, i)).collect();
        (1..=self.e).map(|i| self.graded_rank(&spans[i], &spans[i - 1])).collect()
    }
}

/// Reduces an element of `W_{O_L,tau}(k)` modulo `p` to `k[pi]/pi^e`.
pub fn reduce_elem(r: &Ring, x: &crate::arith::Elem) -> Result<Vec<FqElem>> {
    let fq = r.residue_field();
    let p = r.p() as u128;
    let coords = r.to_coords(x);
    (0..r.e())
        .map(|a| {
            if x.precision() <= a as u32 {
                return Err(Error::PrecisionExhausted(
                    "reduction modulo p needs more precision".into(),
                ));
            }
            let digits: Vec<u64> = coords[a].iter().map(|v| (v % p) as u64).collect();
            Ok(fq.from_digits(&digits))
        })
        .collect()
}

fn reduce_mat(r: &Ring, m: &Mat) -> Result<AMat> {
    let data = m.data.iter().map(|x| reduce_elem(r, x)).collect::<Result<Vec<_>>>()?;
    Ok(AMat {
        rows: m.rows,
        cols: m.cols,
        data,
    })
}

/// Checks the structure: `F V = 0`, `V F = 0`, exactness by rank count, the filtration
/// conditions against `mu`, and that `Im V_tau` is the twisted top level of `tau - 1`.
pub fn validate_bt1(b: &Bt1Crystal, mu: &PRDatum) -> ValidationReport {
    let mut failures = Vec::new();
    let f = b.f();
    let fq = b.algebra.fq();
    if mu.f() != f || mu.r() != b.e || mu.h() != b.h {
        failures.push(format!(
            "datum shape (f = {}, e = {}, h = {}) does not match the data",
            mu.f(),
            mu.r(),
            mu.h()
        ));
        return ValidationReport { ok: false, failures };
    }
    let full = b.full_space();
    for tau in 0..f {
        let prev = (tau + f - 1) % f;
        let fv = b.mat_mul(&b.frob[tau], &b.ver[tau]);
        if fv.data.iter().any(|x| x.iter().any(|c| !fq.is_zero(*c))) {
            failures.push(format!("embedding {tau}: F V is not zero"));
        }
        let vf = b.mat_mul(&b.ver[tau], &b.frob[tau]);
        if vf.data.iter().any(|x| x.iter().any(|c| !fq.is_zero(*c))) {
            failures.push(format!("embedding {tau}: V F is not zero"));
        }
        let im_f = b.image(&full, |v| b.apply(&b.frob[tau], v));
        let im_v = b.image(&full, |v| b.apply(&b.ver[tau], v));
        if im_f.rank() + im_v.rank() != b.dim() {
            failures.push(format!(
                "embedding {tau}: ranks of F and V sum to {}, expected {}",
                im_f.rank() + im_v.rank(),
                b.dim()
            ));
        }
        if let Ok(k) = b.reduce_to_residue() {
            let kfull = k.full_space();
            let rf = k.image(&kfull, |v| k.apply(&k.frob[tau], v)).rank();
            let rv = k.image(&kfull, |v| k.apply(&k.ver[tau], v)).rank();
            if rf + rv != k.dim() {
                failures.push(format!("embedding {tau}: not exact over the residue field"));
            }
        }
        let spans: Vec<Span> = (0..=b.e).map(|i| b.level_span(tau, i)).collect();
        if spans[0].rank() != 0 {
            failures.push(format!("embedding {tau}, level 0: not zero"));
        }
        for i in 1..=b.e {
            if !spans[i].contains_span(fq, &spans[i - 1]) {
                failures.push(format!("embedding {tau}, level {i}: does not contain level {}", i - 1));
                continue;
            }
            let moved = b.image(&spans[i], |v| b.pi_mul(v));
            if !spans[i - 1].contains_span(fq, &moved) {
                failures.push(format!("embedding {tau}, level {i}: pi times it is not in level {}", i - 1));
            }
            match b.graded_rank(&spans[i], &spans[i - 1]) {
                Ok(d) if d == mu.d(tau, i) => {}
                Ok(d) => failures.push(format!(
                    "embedding {tau}, level {i}: graded rank {d}, expected {}",
                    mu.d(tau, i)
                )),
                Err(_) => failures.push(format!("embedding {tau}, level {i}: graded piece is not free")),
            }
            if !b.is_direct_summand(&spans[i]) {
                failures.push(format!("embedding {tau}, level {i}: not a direct summand"));
            }
        }
        let top_prev = b.twisted_level_span(prev, b.e);
        if top_prev != im_v {
            failures.push(format!(
                "embedding {tau}: image of V is not the twisted top level of embedding {prev}"
            ));
        }
    }
    ValidationReport {
        ok: failures.is_empty(),
        failures,
    }
}

/// `F^{[j]}_tau = V_tau^{-1}((omega^{[j]}_{tau-1})^{(p)})` for `j = 0, ..., e`, each step
/// certified to have a free graded piece.
pub fn pullback_filtration(b: &Bt1Crystal, tau: usize) -> Result<Vec<Span>> {
    let f = b.f();
    let prev = (tau + f - 1) % f;
    let full = b.full_space();
    let levels: Vec<Span> = (0..=b.e)
        .map(|j| b.preimage(&full, |v| b.apply(&b.ver[tau], v), &b.twisted_level_span(prev, j)))
        .collect();
    for j in 1..=b.e {
        b.graded_rank(&levels[j], &levels[j - 1])?;
    }
    Ok(levels)
}
