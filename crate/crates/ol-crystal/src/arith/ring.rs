//! Truncated Witt vectors `W(k)/p^N` and their totally ramified extensions
//! `W(k)[X]/(E_tau(X))`, with the Frobenius and pi-adic precision tracking.

use std::sync::Arc;

use rand::Rng;

use super::fq::{Fq, FqElem};
use super::modint::{self, add_mod, mul_mod, neg_mod, reduce_i128, sub_mod};
use crate::error::{Error, Result};

/// The local field `L`: residue characteristic, residue degree, ramification index
/// and Eisenstein polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFieldDatum {
    pub p: u64,
    pub f: usize,
    pub e: usize,
    /// `e + 1` coefficients of `E(X)`, lowest degree first; each is a list of integer
    /// coordinates in the basis `1, w, ..., w^(n-1)` of `W(k)` (shorter lists are zero padded).
    pub eisenstein: Vec<Vec<i128>>,
}

impl LocalFieldDatum {
    /// The datum with the default Eisenstein polynomial `X^e - p`.
    pub fn new(p: u64, f: usize, e: usize) -> Self {
        let mut eisenstein = vec![vec![0i128]; e + 1];
        eisenstein[0] = vec![-(p as i128)];
        eisenstein[e] = vec![1];
        LocalFieldDatum { p, f, e, eisenstein }
    }

    /// Same field data with a custom Eisenstein polynomial.
    pub fn with_eisenstein(p: u64, f: usize, e: usize, eisenstein: Vec<Vec<i128>>) -> Self {
        LocalFieldDatum { p, f, e, eisenstein }
    }

    /// True when `E(X) = X^e - p`.
    pub fn is_default_eisenstein(&self) -> bool {
        *self == LocalFieldDatum::new(self.p, self.f, self.e)
            || self.eisenstein.iter().enumerate().all(|(i, c)| {
                let want: i128 = if i == 0 {
                    -(self.p as i128)
                } else if i == self.e {
                    1
                } else {
                    0
                };
                c.first().copied().unwrap_or(0) == want && c.iter().skip(1).all(|x| *x == 0)
            })
    }
}

/// The base field `k = F_{p^n}` and the working precision `N` (in p-adic digits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseFieldDatum {
    pub n: usize,
    /// Monic irreducible polynomial over `F_p`, lowest degree first, including the leading 1.
    pub field_modulus: Vec<u64>,
    pub precision: u32,
}

impl BaseFieldDatum {
    /// `F_{p^n}` with the default modulus.
    pub fn new(p: u64, n: usize, precision: u32) -> Self {
        BaseFieldDatum {
            n,
            field_modulus: Fq::default_modulus(p, n),
            precision,
        }
    }
}

/// An element of `W_{O_L,tau}(k)` known modulo `pi^prec`.
///
/// Coordinates are stored in the basis `pi^a w^b`, at index `a * n + b`, as residues
/// modulo `p^N`.  The coordinate of `pi^a` is only meaningful modulo
/// `p^ceil((prec - a) / e)` and is kept reduced accordingly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Elem {
    pub(crate) c: Vec<u128>,
    pub(crate) prec: u32,
    pub(crate) tau: u16,
}

impl Elem {
    /// Absolute pi-adic precision.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// The embedding index this element belongs to.
    pub fn tau(&self) -> usize {
        self.tau as usize
    }

    /// Raw coordinates (index `a * n + b` for `pi^a w^b`).
    pub fn coords(&self) -> &[u128] {
        &self.c
    }
}

/// A valuation normalized by `v(p) = 1`, expressed in units of `1/e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    /// `v(x) = units / e`.
    Finite(u32),
    /// The element is zero modulo its precision.
    AbovePrecision,
}

/// Arithmetic context shared by all elements of one crystal.
#[derive(Debug)]
pub struct Ring {
    p: u64,
    n: usize,
    e: usize,
    f: usize,
    digits: u32,
    modulus: u128,
    pow_p: Vec<u128>,
    fq: Fq,
    teich: Vec<u128>,
    frob: Vec<Vec<u128>>,
    frob_inv: Vec<Vec<u128>>,
    /// Per embedding: the non-leading coefficients of `sigma^tau(E)`, each in `W(k)`.
    eis: Vec<Vec<Vec<u128>>>,
    monomial: bool,
    p_over_pi: Vec<Elem>,
    unit_u: Vec<Elem>,
    local: LocalFieldDatum,
    base: BaseFieldDatum,
}

impl Ring {
    /// Builds the arithmetic context, validating both data.
    pub fn new(local: &LocalFieldDatum, base: &BaseFieldDatum) -> Result<Arc<Ring>> {
        let p = local.p;
        if !modint::is_prime(p) {
            return Err(Error::InvalidInput(format!("p = {p} is not prime")));
        }
        if local.e == 0 || local.f == 0 {
            return Err(Error::InvalidInput("e and f must be at least 1".into()));
        }
        if base.n == 0 || !base.n.is_multiple_of(local.f) {
            return Err(Error::InvalidInput(format!(
                "f = {} must divide n = {}",
                local.f, base.n
            )));
        }
        if base.field_modulus.len() != base.n + 1 {
            return Err(Error::InvalidInput("field modulus must have degree n".into()));
        }
        let max = modint::max_digits(p);
        if base.precision < 2 || base.precision > max {
            return Err(Error::InvalidInput(format!(
                "precision {} outside supported range [2, {max}] for p = {p}",
                base.precision
            )));
        }
        if local.eisenstein.len() != local.e + 1 {
            return Err(Error::InvalidInput("Eisenstein polynomial must have e + 1 coefficients".into()));
        }
        let fq = Fq::new(p, &base.field_modulus)?;
        let n = base.n;
        let digits = base.precision;
        let mut pow_p = vec![1u128; digits as usize + 1];
        for i in 1..=digits as usize {
            pow_p[i] = pow_p[i - 1] * p as u128;
        }
        let modulus = pow_p[digits as usize];
        let teich = teichmuller_modulus(p, &base.field_modulus, modulus, digits);
        let mut ring = Ring {
            p,
            n,
            e: local.e,
            f: local.f,
            digits,
            modulus,
            pow_p,
            fq,
            teich,
            frob: vec![],
            frob_inv: vec![],
            eis: vec![],
            monomial: local.is_default_eisenstein(),
            p_over_pi: vec![],
            unit_u: vec![],
            local: local.clone(),
            base: base.clone(),
        };
        ring.frob = (0..n)
            .map(|b| {
                let mut w = vec![0u128; n];
                if n == 1 {
                    w[0] = 1;
                    return w;
                }
                w[1] = 1;
                ring.wpow(&w, (p as u128) * b as u128)
            })
            .collect();
        // sigma^(n-1) on each basis vector gives the inverse.
        ring.frob_inv = (0..n)
            .map(|b| {
                let mut x = vec![0u128; n];
                x[b] = 1;
                for _ in 0..n - 1 {
                    x = ring.wsigma(&x);
                }
                x
            })
            .collect();
        ring.setup_eisenstein()?;
        Ok(Arc::new(ring))
    }

    fn setup_eisenstein(&mut self) -> Result<()> {
        let (e, n, p) = (self.e, self.n, self.p);
        let coeff = |c: &Vec<i128>| -> Result<Vec<i128>> {
            if c.len() > n {
                return Err(Error::InvalidInput("Eisenstein coefficient longer than n".into()));
            }
            let mut v = c.clone();
            v.resize(n, 0);
            Ok(v)
        };
        let raw: Vec<Vec<i128>> = self.local.eisenstein.iter().map(coeff).collect::<Result<_>>()?;
        let lead = &raw[e];
        if lead[0] != 1 || lead.iter().skip(1).any(|x| *x != 0) {
            return Err(Error::InvalidInput("Eisenstein polynomial must be monic".into()));
        }
        for (i, c) in raw.iter().enumerate().take(e) {
            if c.iter().any(|x| x.rem_euclid(p as i128) != 0) {
                return Err(Error::InvalidInput(format!(
                    "Eisenstein coefficient {i} is not divisible by p"
                )));
            }
        }
        let w: Vec<i128> = raw[0].iter().map(|x| x / p as i128).collect();
        if w.iter().all(|x| x.rem_euclid(p as i128) == 0) {
            return Err(Error::InvalidInput(
                "constant term of the Eisenstein polynomial must have valuation exactly 1".into(),
            ));
        }
        let to_w = |v: &[i128]| -> Vec<u128> { v.iter().map(|x| reduce_i128(*x, self.modulus)).collect() };
        let base: Vec<Vec<u128>> = raw[..e].iter().map(|c| to_w(c)).collect();
        // coefficients must lie in W(F_{p^f}), i.e. be fixed by sigma^f
        for c in &base {
            let mut s = c.clone();
            for _ in 0..self.f {
                s = self.wsigma(&s);
            }
            if s != *c {
                return Err(Error::InvalidInput(
                    "Eisenstein coefficients must lie in W(F_{p^f})".into(),
                ));
            }
        }
        let mut eis = vec![base];
        for t in 1..self.f {
            let prev = &eis[t - 1];
            let next = prev.iter().map(|c| self.wsigma(c)).collect();
            eis.push(next);
        }
        self.eis = eis;
        // p / pi = -w^{-1} (pi^{e-1} + a_{e-1} pi^{e-2} + ... + a_1)
        let mut poly = self.zero(0);
        for j in 1..e {
            let a = &self.eis[0][j];
            poly.c[(j - 1) * n..j * n].copy_from_slice(a);
        }
        poly.c[(e - 1) * n] = add_mod(poly.c[(e - 1) * n], 1, self.modulus);
        let mut welem = self.zero(0);
        welem.c[..n].copy_from_slice(&to_w(&w));
        let winv = self.inv_unit(&welem)?;
        let p_over_pi = self.neg(&self.mul(&winv, &poly));
        let mut pp = vec![p_over_pi];
        for t in 1..self.f {
            let s = self.sigma(&pp[t - 1]);
            pp.push(s);
        }
        self.p_over_pi = pp;
        let mut us = Vec::with_capacity(self.f);
        for t in 0..self.f {
            let mut u = self.p_over_pi[t].clone();
            for _ in 1..e {
                u = self.div_pi(&u)?;
            }
            u.prec = self.cap();
            us.push(u);
        }
        self.unit_u = us;
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn e(&self) -> usize {
        self.e
    }
    pub fn f(&self) -> usize {
        self.f
    }
    /// Working precision in p-adic digits.
    pub fn digits(&self) -> u32 {
        self.digits
    }
    /// Working precision in pi-adic units (`e * N`).
    pub fn cap(&self) -> u32 {
        self.digits * self.e as u32
    }
    pub fn modulus(&self) -> u128 {
        self.modulus
    }
    pub fn residue_field(&self) -> &Fq {
        &self.fq
    }
    pub fn local(&self) -> &LocalFieldDatum {
        &self.local
    }
    pub fn base(&self) -> &BaseFieldDatum {
        &self.base
    }
    /// Coefficients of the Teichmuller modulus (monic, leading coefficient omitted).
    pub fn teichmuller_modulus(&self) -> &[u128] {
        &self.teich
    }
    /// The unit `u` with `p = u pi^e` in `W_{O_L,tau}(k)`.
    pub fn unit_u(&self, tau: usize) -> &Elem {
        &self.unit_u[tau % self.f]
    }

    // ---- W(k) level -------------------------------------------------------

    fn wmul_into(&self, a: &[u128], b: &[u128], out: &mut [u128]) {
        let n = self.n;
        let m = self.modulus;
        if n == 1 {
            out[0] = add_mod(out[0], mul_mod(a[0], b[0], m), m);
            return;
        }
        let mut prod = [0u128; 2 * super::fq::MAX_DEGREE];
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0 {
                    continue;
                }
                prod[i + j] = add_mod(prod[i + j], mul_mod(a[i], b[j], m), m);
            }
        }
        for k in (n..2 * n - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for j in 0..n {
                let t = mul_mod(c, self.teich[j], m);
                prod[k - n + j] = sub_mod(prod[k - n + j], t, m);
            }
        }
        for i in 0..n {
            out[i] = add_mod(out[i], prod[i], m);
        }
    }

    fn wmul(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        let mut out = vec![0u128; self.n];
        self.wmul_into(a, b, &mut out);
        out
    }

    fn wpow(&self, a: &[u128], mut e: u128) -> Vec<u128> {
        let mut acc = vec![0u128; self.n];
        acc[0] = 1;
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.wmul(&acc, &base);
            }
            base = self.wmul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn wsigma(&self, a: &[u128]) -> Vec<u128> {
        self.wapply(&self.frob, a)
    }

    fn wapply(&self, mat: &[Vec<u128>], a: &[u128]) -> Vec<u128> {
        let n = self.n;
        if n == 1 {
            return a.to_vec();
        }
        let m = self.modulus;
        let mut out = vec![0u128; n];
        for (b, col) in mat.iter().enumerate() {
            if a[b] == 0 {
                continue;
            }
            for i in 0..n {
                out[i] = add_mod(out[i], mul_mod(a[b], col[i], m), m);
            }
        }
        out
    }

    // ---- constructors -----------------------------------------------------

    pub fn zero(&self, tau: usize) -> Elem {
        Elem {
            c: vec![0; self.e * self.n],
            prec: self.cap(),
            tau: (tau % self.f) as u16,
        }
    }

    pub fn one(&self, tau: usize) -> Elem {
        self.from_int(1, tau)
    }

    pub fn from_int(&self, x: i128, tau: usize) -> Elem {
        let mut z = self.zero(tau);
        z.c[0] = reduce_i128(x, self.modulus);
        z
    }

    /// `pi^k` (reduced through the Eisenstein relation when `k >= e`).
    pub fn pi_pow(&self, k: u32, tau: usize) -> Elem {
        let mut z = self.zero(tau);
        if (k as usize) < self.e {
            z.c[k as usize * self.n] = 1;
            return z;
        }
        let mut acc = self.one(tau);
        let pi = if self.e == 1 {
            self.w_elem(&self.neg_w(&self.eis[tau % self.f][0]), tau)
        } else {
            let mut pi = self.zero(tau);
            pi.c[self.n] = 1;
            pi
        };
        for _ in 0..k {
            acc = self.mul(&acc, &pi);
        }
        acc
    }

    fn neg_w(&self, a: &[u128]) -> Vec<u128> {
        a.iter().map(|x| neg_mod(*x, self.modulus)).collect()
    }

    fn w_elem(&self, a: &[u128], tau: usize) -> Elem {
        let mut z = self.zero(tau);
        z.c[..self.n].copy_from_slice(a);
        z
    }

    /// The uniformizer.
    pub fn pi(&self, tau: usize) -> Elem {
        self.pi_pow(1, tau)
    }

    /// Builds an element from integer coordinates `coords[a][b]` of `pi^a w^b`.
    pub fn from_coords(&self, coords: &[Vec<i128>], tau: usize) -> Result<Elem> {
        if coords.len() > self.e {
            return Err(Error::InvalidInput(format!(
                "element has {} pi-coordinates, expected at most {}",
                coords.len(),
                self.e
            )));
        }
        let mut z = self.zero(tau);
        for (a, row) in coords.iter().enumerate() {
            if row.len() > self.n {
                return Err(Error::InvalidInput(format!(
                    "element row has {} w-coordinates, expected at most {}",
                    row.len(),
                    self.n
                )));
            }
            for (b, x) in row.iter().enumerate() {
                z.c[a * self.n + b] = reduce_i128(*x, self.modulus);
            }
        }
        Ok(z)
    }

    /// Builds an element from raw residues (index `a * n + b`) at full precision.
    pub fn from_raw(&self, c: Vec<u128>, tau: usize) -> Elem {
        assert_eq!(c.len(), self.e * self.n);
        Elem {
            c: c.into_iter().map(|x| x % self.modulus).collect(),
            prec: self.cap(),
            tau: (tau % self.f) as u16,
        }
    }

    /// Coordinates as an `e x n` table of residues in `[0, p^N)`.
    pub fn to_coords(&self, x: &Elem) -> Vec<Vec<u128>> {
        (0..self.e)
            .map(|a| x.c[a * self.n..(a + 1) * self.n].to_vec())
            .collect()
    }

    /// Reinterprets an element of another context with the same field data but a
    /// different working precision; representatives are taken as exact integers and the
    /// tracked precision is kept when it is below the new cap.
    pub fn embed(&self, other: &Ring, x: &Elem) -> Elem {
        let full = x.prec >= other.cap();
        let mut z = Elem {
            c: x.c.iter().map(|v| v % self.modulus).collect(),
            prec: if full { self.cap() } else { x.prec.min(self.cap()) },
            tau: x.tau,
        };
        self.normalize(&mut z);
        z
    }

    /// Lifts a residue-field element to `W_{O_L,tau}(k)` (coordinate-wise digits).
    pub fn lift_residue(&self, a: FqElem, tau: usize) -> Elem {
        let digits = self.fq.digits(a);
        let mut z = self.zero(tau);
        for (b, d) in digits.iter().enumerate() {
            z.c[b] = *d as u128;
        }
        z
    }

    /// Uniformly random element at full precision.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, tau: usize) -> Elem {
        let mut z = self.zero(tau);
        for x in z.c.iter_mut() {
            *x = rng.gen_range(0..self.modulus);
        }
        z
    }

    /// Random unit.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R, tau: usize) -> Elem {
        loop {
            let z = self.random(rng, tau);
            if self.is_unit(&z) {
                return z;
            }
        }
    }

    // ---- precision bookkeeping --------------------------------------------

    fn normalize(&self, x: &mut Elem) {
        if x.prec >= self.cap() {
            x.prec = self.cap();
            return;
        }
        let e = self.e as u32;
        for a in 0..self.e {
            let a32 = a as u32;
            let keep = if x.prec > a32 { (x.prec - a32).div_ceil(e) } else { 0 };
            if keep >= self.digits {
                continue;
            }
            let m = self.pow_p[keep as usize];
            for b in 0..self.n {
                let i = a * self.n + b;
                x.c[i] %= m;
            }
        }
    }

    /// Returns a copy with precision lowered to `prec` (never raised).
    pub fn truncate(&self, x: &Elem, prec: u32) -> Elem {
        let mut z = x.clone();
        z.prec = z.prec.min(prec);
        self.normalize(&mut z);
        z
    }

    /// Valuation in units of `1/e`, or `None` when zero at precision.
    pub fn val(&self, x: &Elem) -> Option<u32> {
        let p = self.p as u128;
        let mut best: Option<u32> = None;
        for a in 0..self.e {
            for b in 0..self.n {
                let c = x.c[a * self.n + b];
                if let Some(v) = modint::val_p(c, p) {
                    let w = v * self.e as u32 + a as u32;
                    best = Some(best.map_or(w, |bv: u32| bv.min(w)));
                }
            }
        }
        best.filter(|v| *v < x.prec)
    }

    /// The valuation normalized by `v(p) = 1`, reported in units of `1/e`.
    pub fn valuation(&self, x: &Elem) -> Valuation {
        match self.val(x) {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AbovePrecision,
        }
    }

    pub fn is_zero(&self, x: &Elem) -> bool {
        self.val(x).is_none()
    }

    pub fn is_unit(&self, x: &Elem) -> bool {
        self.val(x) == Some(0)
    }

    /// Equality modulo the smaller of the two precisions.
    pub fn eq_at(&self, x: &Elem, y: &Elem) -> bool {
        self.is_zero(&self.sub(x, y))
    }

    // ---- ring operations --------------------------------------------------

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        debug_assert_eq!(x.tau, y.tau, "adding elements of different embeddings");
        let m = self.modulus;
        let mut z = Elem {
            c: x.c.iter().zip(&y.c).map(|(a, b)| add_mod(*a, *b, m)).collect(),
            prec: x.prec.min(y.prec),
            tau: x.tau,
        };
        self.normalize(&mut z);
        z
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        debug_assert_eq!(x.tau, y.tau, "subtracting elements of different embeddings");
        let m = self.modulus;
        let mut z = Elem {
            c: x.c.iter().zip(&y.c).map(|(a, b)| sub_mod(*a, *b, m)).collect(),
            prec: x.prec.min(y.prec),
            tau: x.tau,
        };
        self.normalize(&mut z);
        z
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        let m = self.modulus;
        Elem {
            c: x.c.iter().map(|a| neg_mod(*a, m)).collect(),
            prec: x.prec,
            tau: x.tau,
        }
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        debug_assert_eq!(x.tau, y.tau, "multiplying elements of different embeddings");
        let (e, n, m) = (self.e, self.n, self.modulus);
        let vx = self.val(x);
        let vy = self.val(y);
        let prec = (x.prec.saturating_add(vy.unwrap_or(y.prec)))
            .min(y.prec.saturating_add(vx.unwrap_or(x.prec)))
            .min(self.cap());
        if vx.is_none() || vy.is_none() {
            let mut z = self.zero(x.tau as usize);
            z.prec = prec;
            return z;
        }
        let mut prod = vec![0u128; (2 * e - 1) * n];
        for a in 0..e {
            let xa = &x.c[a * n..(a + 1) * n];
            if xa.iter().all(|v| *v == 0) {
                continue;
            }
            for b in 0..e {
                let yb = &y.c[b * n..(b + 1) * n];
                if yb.iter().all(|v| *v == 0) {
                    continue;
                }
                self.wmul_into(xa, yb, &mut prod[(a + b) * n..(a + b + 1) * n]);
            }
        }
        let tau = x.tau as usize;
        for k in (e..2 * e - 1).rev() {
            let ck: Vec<u128> = prod[k * n..(k + 1) * n].to_vec();
            if ck.iter().all(|v| *v == 0) {
                continue;
            }
            for v in prod[k * n..(k + 1) * n].iter_mut() {
                *v = 0;
            }
            if self.monomial {
                // pi^e = p
                let p = self.p as u128;
                for (i, cv) in ck.iter().enumerate() {
                    let idx = (k - e) * n + i;
                    prod[idx] = add_mod(prod[idx], mul_mod(*cv, p % m, m), m);
                }
            } else {
                for j in 0..e {
                    let t = self.wmul(&ck, &self.eis[tau][j]);
                    let base = (k - e + j) * n;
                    for i in 0..n {
                        prod[base + i] = sub_mod(prod[base + i], t[i], m);
                    }
                }
            }
        }
        prod.truncate(e * n);
        let mut z = Elem {
            c: prod,
            prec,
            tau: x.tau,
        };
        self.normalize(&mut z);
        z
    }

    /// Multiplication by an integer.
    pub fn mul_int(&self, x: &Elem, k: i128) -> Elem {
        self.mul(x, &self.from_int(k, x.tau as usize))
    }

    pub fn pow(&self, x: &Elem, mut k: u64) -> Elem {
        let mut acc = self.one(x.tau as usize);
        let mut base = x.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// The Frobenius `sigma`, mapping `W_{O_L,tau}` to `W_{O_L,tau+1}` with `pi -> pi`.
    pub fn sigma(&self, x: &Elem) -> Elem {
        self.apply_frob(x, &self.frob, 1)
    }

    /// The inverse Frobenius.
    pub fn sigma_inv(&self, x: &Elem) -> Elem {
        self.apply_frob(x, &self.frob_inv, -1)
    }

    /// `sigma^k` for any integer `k`.
    pub fn sigma_pow(&self, x: &Elem, k: i64) -> Elem {
        let k = k.rem_euclid(self.n as i64);
        let mut z = x.clone();
        if k <= self.n as i64 / 2 {
            for _ in 0..k {
                z = self.sigma(&z);
            }
        } else {
            for _ in 0..(self.n as i64 - k) {
                z = self.sigma_inv(&z);
            }
        }
        z
    }

    fn apply_frob(&self, x: &Elem, mat: &[Vec<u128>], shift: i64) -> Elem {
        let n = self.n;
        let mut c = vec![0u128; self.e * n];
        for a in 0..self.e {
            let w = self.wapply(mat, &x.c[a * n..(a + 1) * n]);
            c[a * n..(a + 1) * n].copy_from_slice(&w);
        }
        let tau = (x.tau as i64 + shift).rem_euclid(self.f as i64) as u16;
        let mut z = Elem { c, prec: x.prec, tau };
        self.normalize(&mut z);
        z
    }

    /// Reduction modulo `pi`, as an element of the residue field.
    pub fn residue(&self, x: &Elem) -> FqElem {
        if x.prec == 0 {
            return 0;
        }
        let p = self.p as u128;
        let digits: Vec<u64> = x.c[..self.n].iter().map(|v| (v % p) as u64).collect();
        self.fq.from_digits(&digits)
    }

    /// Inverse of a unit, at the precision of the input.
    pub fn inv_unit(&self, x: &Elem) -> Result<Elem> {
        let r = self.residue(x);
        let rinv = self
            .fq
            .inv(r)
            .ok_or_else(|| Error::InvalidInput("inverting a non-unit".into()))?;
        let tau = x.tau as usize;
        let mut y = self.lift_residue(rinv, tau);
        let mut xx = x.clone();
        xx.prec = self.cap();
        let two = self.from_int(2, tau);
        let mut correct = 1u32;
        while correct < x.prec {
            let t = self.sub(&two, &self.mul(&xx, &y));
            y = self.mul(&y, &t);
            correct = correct.saturating_mul(2);
        }
        y.prec = x.prec;
        self.normalize(&mut y);
        Ok(y)
    }

    /// Exact division by `pi`; the precision drops by one unit.
    pub fn div_pi(&self, x: &Elem) -> Result<Elem> {
        let n = self.n;
        let p = self.p as u128;
        if x.prec >= 1 && x.c[..n].iter().any(|v| v % p != 0) {
            return Err(Error::NotDivisible {
                valuation: self.val(x).unwrap_or(0),
                needed: 1,
                e: self.e as u32,
            });
        }
        let tau = x.tau as usize;
        let c0: Vec<u128> = x.c[..n].iter().map(|v| v / p).collect();
        let mut shifted = vec![0u128; self.e * n];
        shifted[..(self.e - 1) * n].copy_from_slice(&x.c[n..]);
        let mut z = Elem {
            c: shifted,
            prec: self.cap(),
            tau: x.tau,
        };
        if self.monomial {
            let base = (self.e - 1) * n;
            z.c[base..base + n].copy_from_slice(&c0);
        } else {
            let term = self.mul(&self.w_elem(&c0, tau), &self.p_over_pi[tau]);
            z = self.add(&z, &term);
        }
        z.prec = x.prec.saturating_sub(1);
        self.normalize(&mut z);
        Ok(z)
    }

    /// Returns `y` with `pi^j y = x`; the precision drops by `j` units.
    pub fn div_pi_pow(&self, x: &Elem, j: u32) -> Result<Elem> {
        if j == 0 {
            return Ok(x.clone());
        }
        match self.val(x) {
            None => {
                let mut z = self.zero(x.tau as usize);
                z.prec = x.prec.saturating_sub(j);
                return Ok(z);
            }
            Some(v) if v < j => {
                return Err(Error::NotDivisible {
                    valuation: v,
                    needed: j,
                    e: self.e as u32,
                })
            }
            _ => {}
        }
        let e = self.e as u32;
        let q = j / e;
        let r = j % e;
        let mut z = x.clone();
        if q > 0 {
            let d = self.pow_p[q as usize];
            for v in z.c.iter_mut() {
                *v /= d;
            }
            z.prec = x.prec.saturating_sub(q * e);
            if !self.monomial {
                let uq = self.pow(&self.unit_u[x.tau as usize], q as u64);
                z = self.mul(&z, &uq);
            }
            self.normalize(&mut z);
        }
        for _ in 0..r {
            z = self.div_pi(&z)?;
        }
        Ok(z)
    }

    /// Divides by a nonzero element whose valuation does not exceed that of `x`.
    pub fn div_exact(&self, x: &Elem, y: &Elem) -> Result<Elem> {
        let vy = self.val(y).ok_or_else(|| {
            Error::PrecisionExhausted("division by an element that is zero at precision".into())
        })?;
        let unit = self.div_pi_pow(y, vy)?;
        let q = self.div_pi_pow(x, vy)?;
        Ok(self.mul(&q, &self.inv_unit(&unit)?))
    }

    /// Splits a nonzero element as `pi^v * unit`.
    pub fn unit_part(&self, x: &Elem) -> Option<(u32, Elem)> {
        let v = self.val(x)?;
        Some((v, self.div_pi_pow(x, v).ok()?))
    }
}

/// Hensel-lifts the roots of `field_modulus` to Teichmuller representatives and returns
/// the non-leading coefficients of their minimal polynomial modulo `p^N`.
fn teichmuller_modulus(p: u64, field_modulus: &[u64], modulus: u128, digits: u32) -> Vec<u128> {
    let n = field_modulus.len() - 1;
    let fm: Vec<u128> = field_modulus[..n].iter().map(|c| *c as u128).collect();
    // arithmetic in (Z/p^N)[x]/(F(x)) with F the naive lift of the field modulus
    let mulf = |a: &[u128], b: &[u128]| -> Vec<u128> {
        let mut prod = vec![0u128; 2 * n - 1];
        for i in 0..n {
            for j in 0..n {
                prod[i + j] = add_mod(prod[i + j], mul_mod(a[i], b[j], modulus), modulus);
            }
        }
        for k in (n..2 * n - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for j in 0..n {
                prod[k - n + j] = sub_mod(prod[k - n + j], mul_mod(c, fm[j], modulus), modulus);
            }
        }
        prod.truncate(n);
        prod
    };
    let powf = |a: &[u128], mut e: u64| -> Vec<u128> {
        let mut acc = vec![0u128; n];
        acc[0] = 1;
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = mulf(&acc, &base);
            }
            base = mulf(&base, &base);
            e >>= 1;
        }
        acc
    };
    let mut x = vec![0u128; n];
    if n == 1 {
        x[0] = neg_mod(fm[0] % modulus, modulus);
    } else {
        x[1] = 1;
    }
    // z -> z^(p^n) converges to the Teichmuller lift, one digit per step
    let mut w = x;
    for _ in 0..=digits {
        for _ in 0..n {
            w = powf(&w, p);
        }
    }
    // conjugates w, w^p, ..., w^(p^(n-1))
    let mut conj = vec![w.clone()];
    for j in 1..n {
        let prev = conj[j - 1].clone();
        conj.push(powf(&prev, p));
    }
    // product of (X - c_j) with coefficients in the algebra
    let mut poly: Vec<Vec<u128>> = vec![{
        let mut one = vec![0u128; n];
        one[0] = 1;
        one
    }];
    for c in &conj {
        let mut next = vec![vec![0u128; n]; poly.len() + 1];
        for (k, coef) in poly.iter().enumerate() {
            for i in 0..n {
                next[k + 1][i] = add_mod(next[k + 1][i], coef[i], modulus);
            }
            let t = mulf(coef, c);
            for i in 0..n {
                next[k][i] = sub_mod(next[k][i], t[i], modulus);
            }
        }
        poly = next;
    }
    (0..n)
        .map(|k| {
            debug_assert!(poly[k][1..].iter().all(|v| *v == 0), "teichmuller modulus not rational");
            poly[k][0]
        })
        .collect()
}
