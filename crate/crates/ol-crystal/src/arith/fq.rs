//! The residue field `k = F_p[x]/(f(x))`.
//!
//! Elements are packed as base-`p` digit strings in a `u64`; digit `b` is the
//! coefficient of `x^b`.

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 32;

/// A finite field given by an irreducible polynomial over the prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fq {
    p: u64,
    n: usize,
    /// Coefficients of the monic modulus, lowest degree first, without the leading one.
    modulus: Vec<u64>,
    size: u64,
}

/// An element of [`Fq`], packed as base-`p` digits.
pub type FqElem = u64;

impl Fq {
    /// Builds the field from a monic irreducible polynomial given lowest degree first
    /// (length `n + 1`, last entry 1).
    pub fn new(p: u64, modulus: &[u64]) -> Result<Self> {
        if !crate::arith::modint::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() % p != 1 {
            return Err(Error::InvalidInput(
                "field modulus must be monic of degree at least 1".into(),
            ));
        }
        let n = modulus.len() - 1;
        if n > MAX_DEGREE {
            return Err(Error::InvalidInput(format!("degree {n} exceeds {MAX_DEGREE}")));
        }
        let size = (p as u128).checked_pow(n as u32).filter(|s| *s < (1u128 << 63));
        let size = size.ok_or_else(|| Error::InvalidInput("field too large".into()))? as u64;
        let fq = Fq {
            p,
            n,
            modulus: modulus[..n].iter().map(|c| c % p).collect(),
            size,
        };
        if !poly_irreducible(p, modulus) {
            return Err(Error::InvalidInput(format!(
                "field modulus {modulus:?} is not irreducible over F_{p}"
            )));
        }
        Ok(fq)
    }

    /// The lexicographically first monic irreducible polynomial of degree `n` over `F_p`.
    pub fn default_modulus(p: u64, n: usize) -> Vec<u64> {
        let mut coeffs = vec![0u64; n + 1];
        coeffs[n] = 1;
        if n == 1 {
            return coeffs;
        }
        loop {
            if poly_irreducible(p, &coeffs) {
                return coeffs;
            }
            let mut i = 0;
            loop {
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// The monic modulus, lowest degree first, including the leading one.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    pub fn zero(&self) -> FqElem {
        0
    }

    pub fn one(&self) -> FqElem {
        1
    }

    /// The class of `x`.
    pub fn generator(&self) -> FqElem {
        if self.n == 1 {
            self.from_digits(&[(self.p - self.modulus[0] % self.p) % self.p])
        } else {
            self.p
        }
    }

    pub fn from_int(&self, x: i64) -> FqElem {
        (x.rem_euclid(self.p as i64)) as u64
    }

    /// Packs digits (coefficients of `1, x, x^2, ...`) into an element, reducing modulo the modulus.
    pub fn from_digits(&self, digits: &[u64]) -> FqElem {
        let mut d = [0u64; 2 * MAX_DEGREE];
        let len = digits.len().max(self.n);
        let mut buf = vec![0u64; len];
        for (i, x) in digits.iter().enumerate() {
            buf[i] = x % self.p;
        }
        self.reduce_poly(&mut buf);
        d[..self.n].copy_from_slice(&buf[..self.n]);
        self.pack(&d[..self.n])
    }

    /// The digits of an element (length `n`).
    pub fn digits(&self, x: FqElem) -> Vec<u64> {
        let mut out = vec![0u64; self.n];
        let mut y = x;
        for d in out.iter_mut() {
            *d = y % self.p;
            y /= self.p;
        }
        out
    }

    fn unpack(&self, x: FqElem, out: &mut [u64]) {
        let mut y = x;
        for d in out.iter_mut().take(self.n) {
            *d = y % self.p;
            y /= self.p;
        }
    }

    fn pack(&self, digits: &[u64]) -> FqElem {
        let mut acc = 0u64;
        for d in digits.iter().rev() {
            acc = acc * self.p + d;
        }
        acc
    }

    fn reduce_poly(&self, buf: &mut [u64]) {
        let p = self.p;
        for k in (self.n..buf.len()).rev() {
            let c = buf[k] % p;
            if c == 0 {
                continue;
            }
            buf[k] = 0;
            for j in 0..self.n {
                let t = buf[k - self.n + j] + (p - c) * self.modulus[j] % p;
                buf[k - self.n + j] = t % p;
            }
        }
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut da, mut db) = ([0u64; MAX_DEGREE], [0u64; MAX_DEGREE]);
        self.unpack(a, &mut da);
        self.unpack(b, &mut db);
        for i in 0..self.n {
            da[i] = (da[i] + db[i]) % self.p;
        }
        self.pack(&da[..self.n])
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        if self.p == 2 {
            return a;
        }
        let mut da = [0u64; MAX_DEGREE];
        self.unpack(a, &mut da);
        for d in da.iter_mut().take(self.n) {
            *d = (self.p - *d) % self.p;
        }
        self.pack(&da[..self.n])
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.n == 1 {
            return a * b % self.p;
        }
        let (mut da, mut db) = ([0u64; MAX_DEGREE], [0u64; MAX_DEGREE]);
        self.unpack(a, &mut da);
        self.unpack(b, &mut db);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..self.n {
            if da[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % self.p;
            }
        }
        self.reduce_poly(&mut prod[..2 * self.n - 1]);
        self.pack(&prod[..self.n])
    }

    pub fn pow(&self, a: FqElem, mut e: u128) -> FqElem {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, (self.size - 2) as u128))
        }
    }

    /// The absolute Frobenius `a -> a^p`.
    pub fn frob(&self, a: FqElem) -> FqElem {
        self.pow(a, self.p as u128)
    }

    /// `a -> a^(p^k)`; negative `k` applies the inverse Frobenius.
    pub fn frob_pow(&self, a: FqElem, k: i64) -> FqElem {
        let k = k.rem_euclid(self.n as i64) as u32;
        let mut x = a;
        for _ in 0..k {
            x = self.frob(x);
        }
        x
    }

    pub fn is_zero(&self, a: FqElem) -> bool {
        a == 0
    }

    /// Uniform element from a random source.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FqElem {
        rng.gen_range(0..self.size)
    }
}

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mulmod(p: u64, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(p, &prod, m)
}

fn poly_rem(p: u64, a: &[u64], m: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod_u64(m[dm], p);
    while r.len() > dm {
        let k = r.len() - 1;
        let c = r[k] * lead_inv % p;
        for j in 0..=dm {
            let t = (p - c) * m[j] % p;
            r[k - dm + j] = (r[k - dm + j] + t) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(p, &x, &y);
        x = y;
        y = r;
    }
    x
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// `x^(p^k) mod m` as a polynomial.
fn x_frob_pow(p: u64, k: usize, m: &[u64]) -> Vec<u64> {
    let mut x = poly_rem(p, &[0, 1], m);
    for _ in 0..k {
        let mut acc = vec![1u64];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(p, &acc, &base, m);
            }
            base = poly_mulmod(p, &base, &base, m);
            e >>= 1;
        }
        x = acc;
    }
    x
}

/// Rabin's irreducibility test.
fn poly_irreducible(p: u64, m: &[u64]) -> bool {
    let m: Vec<u64> = m.iter().map(|c| c % p).collect();
    let n = m.len() - 1;
    if n == 1 {
        return true;
    }
    let xn = x_frob_pow(p, n, &m);
    let mut diff = xn.clone();
    diff.resize(diff.len().max(2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    poly_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    let mut q = 2;
    let mut rest = n;
    while rest > 1 {
        if rest.is_multiple_of(q) {
            while rest.is_multiple_of(q) {
                rest /= q;
            }
            let mut t = x_frob_pow(p, n / q, &m);
            t.resize(t.len().max(2), 0);
            t[1] = (t[1] + p - 1) % p;
            let g = poly_gcd(p, &m, &t);
            if g.len() > 1 {
                return false;
            }
        }
        q += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f9_arithmetic() {
        let m = Fq::default_modulus(3, 2);
        let k = Fq::new(3, &m).unwrap();
        assert_eq!(k.size(), 9);
        for a in 1..9 {
            let inv = k.inv(a).unwrap();
            assert_eq!(k.mul(a, inv), 1);
            assert_eq!(k.frob_pow(a, 2), a);
        }
    }

    #[test]
    fn rejects_reducible() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(Fq::new(2, &[1, 0, 1]).is_err());
        assert!(Fq::new(2, &[1, 1, 1]).is_ok());
    }

    #[test]
    fn frobenius_is_additive() {
        let k = Fq::new(5, &Fq::default_modulus(5, 3)).unwrap();
        for a in [3u64, 17, 40, 99] {
            for b in [1u64, 55, 123] {
                assert_eq!(k.frob(k.add(a, b)), k.add(k.frob(a), k.frob(b)));
                assert_eq!(k.frob(k.mul(a, b)), k.mul(k.frob(a), k.frob(b)));
            }
        }
    }
}
