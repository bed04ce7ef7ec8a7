//! A one-parameter family over the dual numbers with `e = 3`, `f = 1`, `h = 2`,
//! deforming the top filtration level of the mu-ordinary object for `(2, 1, 0)`.

use crate::arith::{BaseFieldDatum, FqElem, LocalFieldDatum, Ring};
use crate::crystal::{default_precision, PRDatum};
use crate::error::Result;
use crate::mu_ordinary::build_x_ord;

use super::{ArtinAlgebra, Bt1Crystal, Span, Vector};

/// The mu-ordinary data for `(2, 1, 0)` over `k[eps]`, with
/// the generators `pi e_1 + x eps pi e_2, pi^2 e_1, pi^2 e_2 + y eps e_1` of the deformed
/// top level.
fn deformed(p: u64, n: usize, x: FqElem, y: FqElem) -> Result<(Bt1Crystal, Vec<Vector>)> {
    let ring = Ring::new(
        &LocalFieldDatum::new(p, 1, 3),
        &BaseFieldDatum::new(p, n, default_precision(p, n, 2, 3)),
    )?;
    let mu = PRDatum::new(2, vec![vec![2, 1, 0]])?;
    let (c, fil) = build_x_ord(&ring, &mu)?;
    let base = Bt1Crystal::from_crystal(&c, &fil)?;
    let algebra = ArtinAlgebra::dual_numbers(ring.residue_field().clone());
    let b = base.base_change(&algebra)?;
    let fq = algebra.fq();
    let put = |v: &mut Vector, row: usize, a: usize, s: usize, c: FqElem| {
        let i = (row * b.e + a) * b.m() + s;
        v[i] = fq.add(v[i], c);
    };
    let mut g1 = b.zero_vector();
    put(&mut g1, 0, 1, 0, fq.one());
    put(&mut g1, 1, 1, 1, x);
    let mut g2 = b.zero_vector();
    put(&mut g2, 0, 2, 0, fq.one());
    let mut g3 = b.zero_vector();
    put(&mut g3, 1, 2, 0, fq.one());
    put(&mut g3, 0, 0, 1, y);
    Ok((b, vec![g1, g2, g3]))
}

/// Ordered candidate for the datum `(2, 1, 0)`: `omega^{[i]} = omega ∩ E[pi^i]` for
/// `i < 3` and `omega^{[3]} = omega`.
pub fn dual_family_ordered(p: u64, n: usize, x: FqElem, y: FqElem) -> Result<(Bt1Crystal, PRDatum)> {
    let (mut b, gens) = deformed(p, n, x, y)?;
    let fq = b.algebra.fq().clone();
    let omega = b.r_span(&gens);
    let mut levels = Vec::with_capacity(4);
    for i in 0..3 {
        let torsion: Vec<Vector> = (0..b.h)
            .flat_map(|row| (3 - i..3).flat_map(move |a| (0..2).map(move |s| (row, a, s))))
            .map(|(row, a, s)| b.basis_vector(row, a, s))
            .collect();
        let target = Span::new(&fq, b.dim(), &torsion);
        levels.push(b.preimage(&omega, |v| v.to_vec(), &target).basis().to_vec());
    }
    levels.push(gens);
    b.omega = vec![levels];
    Ok((b, PRDatum::new(2, vec![vec![2, 1, 0]])?))
}

/// Unordered candidate for the datum `(0, 1, 2)`: `omega^{[i]} = pi^{3-i} omega`.
pub fn dual_family_unordered(p: u64, n: usize, x: FqElem, y: FqElem) -> Result<(Bt1Crystal, PRDatum)> {
    let (mut b, gens) = deformed(p, n, x, y)?;
    let levels = (0..=3)
        .map(|i| {
            gens.iter()
                .map(|g| (0..3 - i).fold(g.clone(), |v, _| b.pi_mul(&v)))
                .collect()
        })
        .collect();
    b.omega = vec![levels];
    Ok((b, PRDatum::new(2, vec![vec![0, 1, 2]])?))
}
