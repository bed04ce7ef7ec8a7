//! Dense matrices over `W_{O_L,tau}(k)`: products, compound matrices, division-free
//! determinants and characteristic polynomials, elementary divisors and lattice bases.

use crate::arith::{Elem, Fq, FqElem, Ring};
use crate::error::{Error, Result};

/// A dense matrix whose entries all belong to the same embedding `tau`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub tau: usize,
    pub data: Vec<Elem>,
}

impl Mat {
    pub fn zero(r: &Ring, rows: usize, cols: usize, tau: usize) -> Mat {
        Mat {
            rows,
            cols,
            tau: tau % r.f(),
            data: vec![r.zero(tau); rows * cols],
        }
    }

    pub fn identity(r: &Ring, n: usize, tau: usize) -> Mat {
        let mut m = Mat::zero(r, n, n, tau);
        for i in 0..n {
            m.set(i, i, r.one(tau));
        }
        m
    }

    pub fn from_fn(
        r: &Ring,
        rows: usize,
        cols: usize,
        tau: usize,
        mut f: impl FnMut(usize, usize) -> Elem,
    ) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat {
            rows,
            cols,
            tau: tau % r.f(),
            data,
        }
    }

    /// Diagonal matrix.
    pub fn diag(r: &Ring, entries: &[Elem], tau: usize) -> Mat {
        let n = entries.len();
        let mut m = Mat::zero(r, n, n, tau);
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Elem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn from_cols(r: &Ring, rows: usize, tau: usize, cols: &[Vec<Elem>]) -> Mat {
        Mat::from_fn(r, rows, cols.len(), tau, |i, j| cols[j][i].clone())
    }

    pub fn transpose(&self) -> Mat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            tau: self.tau,
            data,
        }
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        Mat {
            rows: rows.len(),
            cols: cols.len(),
            tau: self.tau,
            data,
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Mat {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
            data.extend_from_slice(&other.data[i * other.cols..(i + 1) * other.cols]);
        }
        Mat {
            rows: self.rows,
            cols,
            tau: self.tau,
            data,
        }
    }

    pub fn block_diag(r: &Ring, blocks: &[Mat], tau: usize) -> Mat {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zero(r, n, m, tau);
        let (mut oi, mut oj) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(oi + i, oj + j, b.get(i, j).clone());
                }
            }
            oi += b.rows;
            oj += b.cols;
        }
        out
    }

    /// Replaces the embedding tag (used when moving data between index conventions).
    pub fn retag(mut self, r: &Ring, tau: usize) -> Mat {
        let tau = tau % r.f();
        self.tau = tau;
        for x in self.data.iter_mut() {
            x.tau = tau as u16;
        }
        self
    }

    pub fn min_precision(&self) -> u32 {
        self.data.iter().map(|x| x.prec).min().unwrap_or(u32::MAX)
    }
}

pub fn mul(r: &Ring, a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.cols, b.rows, "matrix product shape mismatch");
    let mut out = Mat::zero(r, a.rows, b.cols, a.tau);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if r.is_zero(aik) && aik.prec >= r.cap() {
                continue;
            }
            for j in 0..b.cols {
                let t = r.mul(aik, b.get(k, j));
                let s = r.add(out.get(i, j), &t);
                out.set(i, j, s);
            }
        }
    }
    out
}

pub fn mul_vec(r: &Ring, a: &Mat, v: &[Elem]) -> Vec<Elem> {
    assert_eq!(a.cols, v.len());
    (0..a.rows)
        .map(|i| {
            let mut acc = r.zero(a.tau);
            for (k, vk) in v.iter().enumerate() {
                acc = r.add(&acc, &r.mul(a.get(i, k), vk));
            }
            acc
        })
        .collect()
}

pub fn add(r: &Ring, a: &Mat, b: &Mat) -> Mat {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat {
        rows: a.rows,
        cols: a.cols,
        tau: a.tau,
        data: a.data.iter().zip(&b.data).map(|(x, y)| r.add(x, y)).collect(),
    }
}

pub fn sub(r: &Ring, a: &Mat, b: &Mat) -> Mat {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat {
        rows: a.rows,
        cols: a.cols,
        tau: a.tau,
        data: a.data.iter().zip(&b.data).map(|(x, y)| r.sub(x, y)).collect(),
    }
}

pub fn scale(r: &Ring, c: &Elem, a: &Mat) -> Mat {
    Mat {
        rows: a.rows,
        cols: a.cols,
        tau: a.tau,
        data: a.data.iter().map(|x| r.mul(c, x)).collect(),
    }
}

/// Entrywise Frobenius; the result lives on embedding `tau + 1`.
pub fn sigma(r: &Ring, a: &Mat) -> Mat {
    Mat {
        rows: a.rows,
        cols: a.cols,
        tau: (a.tau + 1) % r.f(),
        data: a.data.iter().map(|x| r.sigma(x)).collect(),
    }
}

/// Entrywise `sigma^k` for any integer `k`.
pub fn sigma_pow(r: &Ring, a: &Mat, k: i64) -> Mat {
    let f = r.f() as i64;
    Mat {
        rows: a.rows,
        cols: a.cols,
        tau: (a.tau as i64 + k).rem_euclid(f) as usize,
        data: a.data.iter().map(|x| r.sigma_pow(x, k)).collect(),
    }
}

pub fn truncate(r: &Ring, a: &Mat, prec: u32) -> Mat {
    Mat {
        rows: a.rows,
        cols: a.cols,
        tau: a.tau,
        data: a.data.iter().map(|x| r.truncate(x, prec)).collect(),
    }
}

/// Minimal entry valuation, or `None` if the matrix is zero at precision.
pub fn min_val(r: &Ring, a: &Mat) -> Option<u32> {
    a.data.iter().filter_map(|x| r.val(x)).min()
}

pub fn is_zero(r: &Ring, a: &Mat) -> bool {
    a.data.iter().all(|x| r.is_zero(x))
}

pub fn eq_at(r: &Ring, a: &Mat, b: &Mat) -> bool {
    (a.rows, a.cols) == (b.rows, b.cols) && is_zero(r, &sub(r, a, b))
}

/// Divides every entry by `pi^k`.
pub fn div_pi_pow(r: &Ring, a: &Mat, k: u32) -> Result<Mat> {
    let data = a
        .data
        .iter()
        .map(|x| r.div_pi_pow(x, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(Mat {
        rows: a.rows,
        cols: a.cols,
        tau: a.tau,
        data,
    })
}

pub fn mul_pi_pow(r: &Ring, a: &Mat, k: u32) -> Mat {
    scale(r, &r.pi_pow(k, a.tau), a)
}

/// Binomial coefficient as `usize`.
pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binom(n, k));
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return out;
            }
        }
    }
}

/// Position of a sorted subset in the lexicographic list of `subsets(n, k)`.
pub fn subset_index(n: usize, set: &[usize]) -> usize {
    let k = set.len();
    let mut idx = 0;
    let mut prev: usize = 0;
    for (pos, &s) in set.iter().enumerate() {
        let start = if pos == 0 { 0 } else { prev + 1 };
        for v in start..s {
            idx += binom(n - v - 1, k - pos - 1);
        }
        prev = s;
    }
    idx
}

/// Division-free characteristic polynomial `det(X - A)` by Berkowitz's algorithm.
/// Returns coefficients `c_0, ..., c_n` (lowest degree first, `c_n = 1`).
pub fn charpoly(r: &Ring, a: &Mat) -> Vec<Elem> {
    assert!(a.is_square());
    let n = a.rows;
    let tau = a.tau;
    if n == 0 {
        return vec![r.one(tau)];
    }
    // vector of coefficients, highest degree first, of the char poly of the leading block
    let mut poly: Vec<Elem> = vec![r.one(tau), r.neg(a.get(0, 0))];
    for k in 1..n {
        // leading block A_k is k x k, new row R = a[k][0..k], column C = a[0..k][k], corner = a[k][k]
        let rrow: Vec<Elem> = (0..k).map(|j| a.get(k, j).clone()).collect();
        let ccol: Vec<Elem> = (0..k).map(|i| a.get(i, k).clone()).collect();
        let corner = a.get(k, k).clone();
        // Toeplitz column: 1, -corner, -R C, -R A C, -R A^2 C, ...
        let mut t = Vec::with_capacity(k + 2);
        t.push(r.one(tau));
        t.push(r.neg(&corner));
        let mut v = ccol;
        for _ in 0..k {
            let rv = dot(r, &rrow, &v, tau);
            t.push(r.neg(&rv));
            v = (0..k)
                .map(|i| {
                    let mut acc = r.zero(tau);
                    for (j, vj) in v.iter().enumerate() {
                        acc = r.add(&acc, &r.mul(a.get(i, j), vj));
                    }
                    acc
                })
                .collect();
        }
        // new poly = Toeplitz(t) (k+2 x k+1, lower triangular) * poly
        let mut next = Vec::with_capacity(k + 2);
        for i in 0..k + 2 {
            let mut acc = r.zero(tau);
            for j in 0..=i.min(k) {
                if i - j < t.len() {
                    acc = r.add(&acc, &r.mul(&t[i - j], &poly[j]));
                }
            }
            next.push(acc);
        }
        poly = next;
    }
    poly.reverse();
    poly
}

fn dot(r: &Ring, a: &[Elem], b: &[Elem], tau: usize) -> Elem {
    let mut acc = r.zero(tau);
    for (x, y) in a.iter().zip(b) {
        acc = r.add(&acc, &r.mul(x, y));
    }
    acc
}

/// Determinant (division free).
pub fn det(r: &Ring, a: &Mat) -> Elem {
    let n = a.rows;
    match n {
        0 => r.one(a.tau),
        1 => a.get(0, 0).clone(),
        2 => r.sub(
            &r.mul(a.get(0, 0), a.get(1, 1)),
            &r.mul(a.get(0, 1), a.get(1, 0)),
        ),
        _ => {
            let cp = charpoly(r, a);
            if n.is_multiple_of(2) {
                cp[0].clone()
            } else {
                r.neg(&cp[0])
            }
        }
    }
}

/// Adjugate matrix, `adj(A) A = A adj(A) = det(A) I`.
pub fn adjugate(r: &Ring, a: &Mat) -> Mat {
    let n = a.rows;
    if n == 1 {
        return Mat::identity(r, 1, a.tau);
    }
    let mut out = Mat::zero(r, n, n, a.tau);
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|x| *x != j).collect();
            let cols: Vec<usize> = (0..n).filter(|x| *x != i).collect();
            let m = det(r, &a.select(&rows, &cols));
            out.set(i, j, if (i + j) % 2 == 0 { m } else { r.neg(&m) });
        }
    }
    out
}

/// The `s`-th compound matrix: minors indexed by lexicographic `s`-subsets.
pub fn compound(r: &Ring, a: &Mat, s: usize) -> Mat {
    let rs = subsets(a.rows, s);
    let cs = subsets(a.cols, s);
    Mat::from_fn(r, rs.len(), cs.len(), a.tau, |i, j| det(r, &a.select(&rs[i], &cs[j])))
}

/// Solves `A X = B` for square `A` with `det(A) != 0` at precision, by `adj(A) B / det(A)`.
pub fn solve(r: &Ring, a: &Mat, b: &Mat) -> Result<Mat> {
    let d = det(r, a);
    if r.is_zero(&d) {
        return Err(Error::PrecisionExhausted(
            "determinant vanishes at working precision".into(),
        ));
    }
    let num = mul(r, &adjugate(r, a), b);
    let data = num
        .data
        .iter()
        .map(|x| r.div_exact(x, &d))
        .collect::<Result<Vec<_>>>()?;
    Ok(Mat {
        rows: num.rows,
        cols: num.cols,
        tau: num.tau,
        data,
    })
}

/// Inverse of a matrix with unit determinant.
pub fn inverse(r: &Ring, a: &Mat) -> Result<Mat> {
    solve(r, a, &Mat::identity(r, a.rows, a.tau))
}

/// Elementary divisor valuations (ascending, in pi-units) of a square matrix of nonzero
/// determinant, by pivoting on an entry of minimal valuation (ties: lowest row, then column).
pub fn elementary_divisors(r: &Ring, a: &Mat) -> Result<Vec<u32>> {
    let mut m = a.clone();
    let mut out = Vec::with_capacity(a.rows.min(a.cols));
    let mut rows: Vec<usize> = (0..a.rows).collect();
    let mut cols: Vec<usize> = (0..a.cols).collect();
    while !rows.is_empty() && !cols.is_empty() {
        let mut best: Option<(u32, usize, usize)> = None;
        for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                if let Some(v) = r.val(m.get(i, j)) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, ri, ci));
                    }
                }
            }
        }
        let Some((v, ri, ci)) = best else {
            return Err(Error::PrecisionExhausted(format!(
                "elementary divisors: {} pivots not certified below the precision cap",
                rows.len().min(cols.len())
            )));
        };
        let pi_row = rows[ri];
        let pi_col = cols[ci];
        let pivot = m.get(pi_row, pi_col).clone();
        let unit = r.div_pi_pow(&pivot, v)?;
        let unit_inv = r.inv_unit(&unit)?;
        rows.remove(ri);
        cols.remove(ci);
        // eliminate the pivot column from the remaining rows
        for &i in &rows {
            let x = m.get(i, pi_col).clone();
            if r.is_zero(&x) {
                continue;
            }
            let q = r.mul(&r.div_pi_pow(&x, v)?, &unit_inv);
            for &j in &cols {
                let t = r.sub(m.get(i, j), &r.mul(&q, m.get(pi_row, j)));
                m.set(i, j, t);
            }
        }
        out.push(v);
    }
    out.sort_unstable();
    Ok(out)
}

/// Column echelon basis of the full-rank lattice spanned by the columns of `gens`.
///
/// The result is square lower triangular with diagonal entries `pi^{v_i}`.
pub fn lattice_basis(r: &Ring, gens: &Mat) -> Result<Mat> {
    let n = gens.rows;
    let mut cols: Vec<Vec<Elem>> = (0..gens.cols).map(|j| gens.col(j)).collect();
    let mut basis: Vec<Vec<Elem>> = Vec::with_capacity(n);
    for row in 0..n {
        let mut best: Option<(u32, usize)> = None;
        for (ci, c) in cols.iter().enumerate() {
            if let Some(v) = r.val(&c[row]) {
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, ci));
                }
            }
        }
        let Some((v, ci)) = best else {
            return Err(Error::PrecisionExhausted(format!(
                "lattice generators have no pivot in row {row} at working precision"
            )));
        };
        let pivot_col = cols.remove(ci);
        let unit = r.div_pi_pow(&pivot_col[row], v)?;
        let uinv = r.inv_unit(&unit)?;
        let normalized: Vec<Elem> = pivot_col.iter().map(|x| r.mul(x, &uinv)).collect();
        for c in cols.iter_mut() {
            if r.is_zero(&c[row]) {
                continue;
            }
            let q = r.div_pi_pow(&c[row], v)?;
            for i in 0..n {
                c[i] = r.sub(&c[i], &r.mul(&q, &normalized[i]));
            }
        }
        basis.push(normalized);
    }
    Ok(Mat::from_cols(r, n, gens.tau, &basis))
}

/// Solves `L x = v` for lower-triangular `L`; `None` if `v` is not in the lattice of `L`.
pub fn lower_solve(r: &Ring, l: &Mat, v: &[Elem]) -> Result<Option<Vec<Elem>>> {
    let n = l.rows;
    let mut x: Vec<Elem> = Vec::with_capacity(n);
    for (i, vi) in v.iter().enumerate().take(n) {
        let mut num = vi.clone();
        for (j, xj) in x.iter().enumerate() {
            num = r.sub(&num, &r.mul(l.get(i, j), xj));
        }
        let d = l.get(i, i);
        let Some(vd) = r.val(d) else {
            return Err(Error::PrecisionExhausted("singular triangular basis".into()));
        };
        match r.val(&num) {
            None => {
                let mut z = r.zero(l.tau);
                z.prec = num.prec.saturating_sub(vd);
                x.push(z);
            }
            Some(vn) if vn < vd => return Ok(None),
            Some(_) => x.push(r.div_exact(&num, d)?),
        }
    }
    Ok(Some(x))
}

/// True when every column of `a` lies in the lattice with lower-triangular basis `l`.
pub fn contained_in(r: &Ring, a: &Mat, l: &Mat) -> Result<bool> {
    for j in 0..a.cols {
        if lower_solve(r, l, &a.col(j))?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Valuation of the determinant of a lattice basis (its colength in `W^h`, as a length
/// over the residue field).
pub fn colength(r: &Ring, basis: &Mat) -> Result<u32> {
    let d = det(r, basis);
    r.val(&d)
        .ok_or_else(|| Error::PrecisionExhausted("lattice determinant vanishes at precision".into()))
}

/// Residue matrix over `k` (entries reduced modulo `pi`).
pub fn residue(r: &Ring, a: &Mat) -> Vec<Vec<FqElem>> {
    (0..a.rows)
        .map(|i| (0..a.cols).map(|j| r.residue(a.get(i, j))).collect())
        .collect()
}

/// Greedy pivot columns of a matrix over `k`: the lowest-index columns that are
/// independent of all earlier columns.
pub fn fq_pivot_columns(fq: &Fq, m: &[Vec<FqElem>], ncols: usize) -> Vec<usize> {
    let rows = m.len();
    // echelon rows stored as (pivot position, vector)
    let mut basis: Vec<(usize, Vec<FqElem>)> = Vec::new();
    let mut pivots = Vec::new();
    for j in 0..ncols {
        let mut v: Vec<FqElem> = m.iter().map(|row| row[j]).collect();
        for (piv, b) in &basis {
            let c = v[*piv];
            if !fq.is_zero(c) {
                for i in 0..rows {
                    v[i] = fq.sub(v[i], fq.mul(c, b[i]));
                }
            }
        }
        if let Some(piv) = (0..rows).find(|&i| !fq.is_zero(v[i])) {
            let inv = fq.inv(v[piv]).expect("nonzero");
            for x in v.iter_mut() {
                *x = fq.mul(*x, inv);
            }
            // keep the basis reduced at the new pivot
            for (_, b) in basis.iter_mut() {
                let c = b[piv];
                if !fq.is_zero(c) {
                    for i in 0..rows {
                        b[i] = fq.sub(b[i], fq.mul(c, v[i]));
                    }
                }
            }
            basis.push((piv, v));
            pivots.push(j);
        }
    }
    pivots
}
