//! Finite local algebras over the residue field, given by structure constants.

use crate::arith::{Fq, FqElem};
use crate::error::{Error, Result};

use super::kspace::Solver;

/// Element of an [`ArtinAlgebra`]: coordinates in its `k`-basis.
pub type RElem = Vec<FqElem>;

/// A commutative local `k`-algebra with basis `b_0 = 1, b_1, ..., b_{m-1}`, where
/// `b_1, ..., b_{m-1}` span the (nilpotent) maximal ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtinAlgebra {
    fq: Fq,
    names: Vec<String>,
    /// `mul[i][j]` is the expansion of `b_i b_j`.
    mul: Vec<Vec<RElem>>,
    /// Expansion of `b_i^p`.
    frob_basis: Vec<RElem>,
}

impl ArtinAlgebra {
    /// Builds and checks the algebra: unit, commutativity, associativity, closure and
    /// nilpotence of the maximal ideal.
    pub fn new(fq: Fq, names: Vec<String>, mul: Vec<Vec<RElem>>) -> Result<ArtinAlgebra> {
        let m = mul.len();
        if m == 0 || names.len() != m || mul.iter().any(|row| row.len() != m || row.iter().any(|x| x.len() != m)) {
            return Err(Error::InvalidInput("multiplication table has the wrong shape".into()));
        }
        let mut alg = ArtinAlgebra {
            fq,
            names,
            mul,
            frob_basis: Vec::new(),
        };
        let basis: Vec<RElem> = (0..m).map(|i| alg.basis_elem(i)).collect();
        for i in 0..m {
            if alg.mul[0][i] != basis[i] || alg.mul[i][0] != basis[i] {
                return Err(Error::InvalidInput("the first basis element must be the unit".into()));
            }
            for j in 0..m {
                if alg.mul[i][j] != alg.mul[j][i] {
                    return Err(Error::InvalidInput(format!("basis elements {i} and {j} do not commute")));
                }
                if i > 0 && !alg.fq.is_zero(alg.mul[i][j][0]) {
                    return Err(Error::InvalidInput("the maximal ideal is not closed under multiplication".into()));
                }
                for k in 0..m {
                    let a = alg.mul(&alg.mul(&basis[i], &basis[j]), &basis[k]);
                    let b = alg.mul(&basis[i], &alg.mul(&basis[j], &basis[k]));
                    if a != b {
                        return Err(Error::InvalidInput("multiplication is not associative".into()));
                    }
                }
            }
        }
        for (i, b) in basis.iter().enumerate().skip(1) {
            let mut x = b.clone();
            for _ in 0..m {
                x = alg.mul(&x, b);
            }
            if !alg.is_zero(&x) {
                return Err(Error::InvalidInput(format!("basis element {i} is not nilpotent")));
            }
        }
        let p = alg.fq.characteristic();
        alg.frob_basis = basis.iter().map(|b| alg.pow(b, p)).collect();
        Ok(alg)
    }

    /// The residue field itself.
    pub fn field(fq: Fq) -> ArtinAlgebra {
        let one = vec![fq.one()];
        ArtinAlgebra::new(fq, vec!["1".into()], vec![vec![one]]).expect("valid")
    }

    /// `k[x]/(x^len)`.
    pub fn truncated(fq: Fq, var: &str, len: usize) -> Result<ArtinAlgebra> {
        if len == 0 {
            return Err(Error::InvalidInput("truncation length must be positive".into()));
        }
        let names = (0..len)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            })
            .collect();
        let mul = (0..len)
            .map(|i| {
                (0..len)
                    .map(|j| {
                        let mut v = vec![fq.zero(); len];
                        if i + j < len {
                            v[i + j] = fq.one();
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        ArtinAlgebra::new(fq, names, mul)
    }

    /// Dual numbers `k[eps]/(eps^2)`.
    pub fn dual_numbers(fq: Fq) -> ArtinAlgebra {
        ArtinAlgebra::truncated(fq, "eps", 2).expect("valid")
    }

    pub fn fq(&self) -> &Fq {
        &self.fq
    }
    pub fn dim(&self) -> usize {
        self.mul.len()
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn mul_table(&self) -> &[Vec<RElem>] {
        &self.mul
    }

    pub fn basis_elem(&self, i: usize) -> RElem {
        let mut v = vec![self.fq.zero(); self.dim()];
        v[i] = self.fq.one();
        v
    }
    pub fn zero(&self) -> RElem {
        vec![self.fq.zero(); self.dim()]
    }
    pub fn one(&self) -> RElem {
        self.basis_elem(0)
    }
    /// The image of a residue-field element.
    pub fn scalar(&self, a: FqElem) -> RElem {
        let mut v = self.zero();
        v[0] = a;
        v
    }
    pub fn is_zero(&self, x: &RElem) -> bool {
        x.iter().all(|c| self.fq.is_zero(*c))
    }
    /// Units are the elements with nonzero constant coefficient.
    pub fn is_unit(&self, x: &RElem) -> bool {
        !self.fq.is_zero(x[0])
    }
    /// Image in the residue field.
    pub fn residue(&self, x: &RElem) -> FqElem {
        x[0]
    }

    pub fn add(&self, a: &RElem, b: &RElem) -> RElem {
        a.iter().zip(b).map(|(x, y)| self.fq.add(*x, *y)).collect()
    }
    pub fn sub(&self, a: &RElem, b: &RElem) -> RElem {
        a.iter().zip(b).map(|(x, y)| self.fq.sub(*x, *y)).collect()
    }
    pub fn neg(&self, a: &RElem) -> RElem {
        a.iter().map(|x| self.fq.neg(*x)).collect()
    }
    pub fn scale(&self, c: FqElem, a: &RElem) -> RElem {
        a.iter().map(|x| self.fq.mul(c, *x)).collect()
    }

    pub fn mul(&self, a: &RElem, b: &RElem) -> RElem {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if self.fq.is_zero(*x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if self.fq.is_zero(*y) {
                    continue;
                }
                let c = self.fq.mul(*x, *y);
                for (o, t) in out.iter_mut().zip(&self.mul[i][j]) {
                    *o = self.fq.add(*o, self.fq.mul(c, *t));
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &RElem, mut e: u64) -> RElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Absolute Frobenius `x -> x^p`.
    pub fn frob(&self, a: &RElem) -> RElem {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if self.fq.is_zero(*x) {
                continue;
            }
            let c = self.fq.frob(*x);
            for (o, t) in out.iter_mut().zip(&self.frob_basis[i]) {
                *o = self.fq.add(*o, self.fq.mul(c, *t));
            }
        }
        out
    }

    pub fn frob_pow(&self, a: &RElem, k: usize) -> RElem {
        (0..k).fold(a.clone(), |x, _| self.frob(&x))
    }

    /// Inverse of a unit.
    pub fn inv(&self, a: &RElem) -> Option<RElem> {
        if !self.is_unit(a) {
            return None;
        }
        let m = self.dim();
        let cols: Vec<RElem> = (0..m).map(|j| self.mul(a, &self.basis_elem(j))).collect();
        Solver::new(&self.fq, m, &cols).solve(&self.fq, &self.one())
    }

    /// Determinant of a square matrix over the algebra (Laplace expansion; tiny sizes).
    pub fn det(&self, m: &[Vec<RElem>]) -> RElem {
        let n = m.len();
        match n {
            0 => self.one(),
            1 => m[0][0].clone(),
            _ => {
                let mut acc = self.zero();
                for j in 0..n {
                    let minor: Vec<Vec<RElem>> = m[1..]
                        .iter()
                        .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
                        .collect();
                    let t = self.mul(&m[0][j], &self.det(&minor));
                    acc = if j % 2 == 0 { self.add(&acc, &t) } else { self.sub(&acc, &t) };
                }
                acc
            }
        }
    }

    /// Renders an element as a sum over basis names.
    pub fn format(&self, x: &RElem) -> String {
        let terms: Vec<String> = x
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.fq.is_zero(**c))
            .map(|(i, c)| {
                let coef = format_fq(&self.fq, *c);
                if i == 0 {
                    coef
                } else if coef == "1" {
                    self.names[i].clone()
                } else {
                    format!("{coef}*{}", self.names[i])
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Renders a residue-field element: an integer for prime fields, else its digit list.
pub fn format_fq(fq: &Fq, x: FqElem) -> String {
    let d = fq.digits(x);
    if d.len() == 1 {
        d[0].to_string()
    } else {
        format!("{:?}", d)
    }
}
