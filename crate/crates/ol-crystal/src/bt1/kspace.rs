//! Finite-dimensional linear algebra over the residue field.

use crate::arith::{Fq, FqElem};

/// A subspace of `k^dim`, kept as a reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub dim: usize,
    rows: Vec<Vec<FqElem>>,
    pivots: Vec<usize>,
}

impl Span {
    pub fn zero(dim: usize) -> Span {
        Span {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn new(fq: &Fq, dim: usize, vectors: &[Vec<FqElem>]) -> Span {
        let mut s = Span::zero(dim);
        for v in vectors {
            s.insert(fq, v);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<FqElem>] {
        &self.rows
    }

    /// Remainder of `v` after eliminating the pivot coordinates.
    pub fn reduce(&self, fq: &Fq, v: &[FqElem]) -> Vec<FqElem> {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = w[p];
            if !fq.is_zero(c) {
                for (x, y) in w.iter_mut().zip(row) {
                    *x = fq.sub(*x, fq.mul(c, *y));
                }
            }
        }
        w
    }

    pub fn contains(&self, fq: &Fq, v: &[FqElem]) -> bool {
        self.reduce(fq, v).iter().all(|x| fq.is_zero(*x))
    }

    pub fn contains_span(&self, fq: &Fq, other: &Span) -> bool {
        other.rows.iter().all(|v| self.contains(fq, v))
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, fq: &Fq, v: &[FqElem]) -> bool {
        let w = self.reduce(fq, v);
        let Some(p) = w.iter().position(|x| !fq.is_zero(*x)) else {
            return false;
        };
        let inv = fq.inv(w[p]).expect("nonzero pivot");
        let w: Vec<FqElem> = w.iter().map(|x| fq.mul(*x, inv)).collect();
        for row in self.rows.iter_mut() {
            let c = row[p];
            if !fq.is_zero(c) {
                for (x, y) in row.iter_mut().zip(&w) {
                    *x = fq.sub(*x, fq.mul(c, *y));
                }
            }
        }
        let at = self.pivots.partition_point(|q| *q < p);
        self.rows.insert(at, w);
        self.pivots.insert(at, p);
        true
    }

    pub fn sum(&self, fq: &Fq, other: &Span) -> Span {
        let mut s = self.clone();
        for v in &other.rows {
            s.insert(fq, v);
        }
        s
    }
}

/// Solver for `sum_j x_j cols_j = target`, prepared once for many targets.
#[derive(Debug, Clone)]
pub struct Solver {
    ncols: usize,
    /// Each reduced row: (pivot column among the unknowns, coefficients on unknowns,
    /// transformation row applied to the target).
    echelon: Vec<(usize, Vec<FqElem>, Vec<FqElem>)>,
    /// Transformation rows whose unknown part vanished: the target must satisfy them.
    constraints: Vec<Vec<FqElem>>,
    kernel: Vec<Vec<FqElem>>,
}

impl Solver {
    pub fn new(fq: &Fq, dim: usize, cols: &[Vec<FqElem>]) -> Solver {
        let ncols = cols.len();
        // rows of [M | I]
        let mut rows: Vec<(Vec<FqElem>, Vec<FqElem>)> = (0..dim)
            .map(|i| {
                let m: Vec<FqElem> = cols.iter().map(|c| c[i]).collect();
                let mut t = vec![fq.zero(); dim];
                t[i] = fq.one();
                (m, t)
            })
            .collect();
        let mut echelon = Vec::new();
        let mut col = 0;
        let mut next = 0;
        while col < ncols && next < rows.len() {
            let Some(piv) = (next..rows.len()).find(|&r| !fq.is_zero(rows[r].0[col])) else {
                col += 1;
                continue;
            };
            rows.swap(next, piv);
            let inv = fq.inv(rows[next].0[col]).unwrap();
            let (pm, pt) = {
                let (m, t) = &rows[next];
                (
                    m.iter().map(|x| fq.mul(*x, inv)).collect::<Vec<_>>(),
                    t.iter().map(|x| fq.mul(*x, inv)).collect::<Vec<_>>(),
                )
            };
            for (r, (m, t)) in rows.iter_mut().enumerate() {
                if r == next {
                    continue;
                }
                let c = m[col];
                if fq.is_zero(c) {
                    continue;
                }
                for (x, y) in m.iter_mut().zip(&pm) {
                    *x = fq.sub(*x, fq.mul(c, *y));
                }
                for (x, y) in t.iter_mut().zip(&pt) {
                    *x = fq.sub(*x, fq.mul(c, *y));
                }
            }
            rows[next] = (pm, pt);
            echelon.push(col);
            next += 1;
            col += 1;
        }
        let constraints = rows[next..].iter().map(|(_, t)| t.clone()).collect();
        let reduced: Vec<(usize, Vec<FqElem>, Vec<FqElem>)> = echelon
            .iter()
            .zip(rows)
            .map(|(&p, (m, t))| (p, m, t))
            .collect();
        let pivot_cols: Vec<usize> = reduced.iter().map(|r| r.0).collect();
        let kernel = (0..ncols)
            .filter(|j| !pivot_cols.contains(j))
            .map(|free| {
                let mut x = vec![fq.zero(); ncols];
                x[free] = fq.one();
                for (p, m, _) in &reduced {
                    x[*p] = fq.neg(m[free]);
                }
                x
            })
            .collect();
        Solver {
            ncols,
            echelon: reduced,
            constraints,
            kernel,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon.len()
    }

    /// Basis of the solutions of the homogeneous system.
    pub fn kernel(&self) -> &[Vec<FqElem>] {
        &self.kernel
    }

    /// The solution with all free unknowns set to zero, if any.
    pub fn solve(&self, fq: &Fq, target: &[FqElem]) -> Option<Vec<FqElem>> {
        let dot = |t: &[FqElem]| {
            t.iter()
                .zip(target)
                .fold(fq.zero(), |a, (x, y)| fq.add(a, fq.mul(*x, *y)))
        };
        if self.constraints.iter().any(|t| !fq.is_zero(dot(t))) {
            return None;
        }
        let mut x = vec![fq.zero(); self.ncols];
        for (p, _, t) in &self.echelon {
            x[*p] = dot(t);
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_and_solves() {
        let fq = Fq::new(3, &Fq::default_modulus(3, 1)).unwrap();
        let v = |a: &[i64]| a.iter().map(|x| fq.from_int(*x)).collect::<Vec<_>>();
        let s = Span::new(&fq, 3, &[v(&[1, 1, 0]), v(&[2, 2, 0]), v(&[0, 1, 1])]);
        assert_eq!(s.rank(), 2);
        assert!(s.contains(&fq, &v(&[1, 2, 1])));
        assert!(!s.contains(&fq, &v(&[0, 0, 1])));
        let sol = Solver::new(&fq, 3, &[v(&[1, 1, 0]), v(&[2, 2, 0]), v(&[0, 1, 1])]);
        assert_eq!(sol.rank(), 2);
        assert_eq!(sol.kernel().len(), 1);
        let x = sol.solve(&fq, &v(&[1, 2, 1])).unwrap();
        let back: Vec<FqElem> = (0..3)
            .map(|i| {
                let cols = [v(&[1, 1, 0]), v(&[2, 2, 0]), v(&[0, 1, 1])];
                (0..3).fold(fq.zero(), |a, j| fq.add(a, fq.mul(x[j], cols[j][i])))
            })
            .collect();
        assert_eq!(back, v(&[1, 2, 1]));
        assert!(sol.solve(&fq, &v(&[0, 0, 1])).is_none());
    }
}
