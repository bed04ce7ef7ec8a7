use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use super::{OLCrystal, PRDatum, PRFiltration};
use crate::arith::{Elem, Ring};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// How the random change-of-basis matrices are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomMode {
    /// Uniform invertible matrices (generic instances, typically mu-ordinary).
    Generic,
    /// Permutation matrices perturbed by multiples of `pi` (special strata).
    Structured,
    /// Chooses one of the two per instance.
    Mixed,
}

/// Samples a crystal with a PR filtration of type `mu`, deterministically from `seed`.
///
/// Per embedding, `B_r = I` and `B_{i-1} = B_i g_i diag(pi I_{d_i}, I)`, so that the
/// spans form a flag with graded dimensions `d_{tau,i}` and `pi B_i ⊂ B_{i-1}`;
/// then `Y_tau = B_0 U_tau`.
pub fn random_pr_crystal(
    ring: &Arc<Ring>,
    mu: &PRDatum,
    seed: u64,
    mode: RandomMode,
) -> Result<(OLCrystal, PRFiltration)> {
    if mu.f() != ring.f() {
        return Err(Error::InvalidInput(format!(
            "datum has {} embeddings, field has f = {}",
            mu.f(),
            ring.f()
        )));
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let structured = match mode {
        RandomMode::Generic => false,
        RandomMode::Structured => true,
        RandomMode::Mixed => rng.gen_bool(0.5),
    };
    let h = mu.h();
    let steps = mu.r();
    let mut y = Vec::with_capacity(ring.f());
    let mut levels = Vec::with_capacity(ring.f());
    for tau in 0..ring.f() {
        let mut bases = vec![Mat::identity(ring, h, tau)];
        for i in (1..=steps).rev() {
            let d = mu.d(tau, i);
            let g = random_gl(ring, h, tau, structured, &mut rng);
            let mut diag: Vec<Elem> = Vec::with_capacity(h);
            for k in 0..h {
                diag.push(if k < d { ring.pi(tau) } else { ring.one(tau) });
            }
            let prev = bases.last().unwrap();
            let next = linalg::mul(ring, &linalg::mul(ring, prev, &g), &Mat::diag(ring, &diag, tau));
            bases.push(next);
        }
        bases.reverse();
        let u = random_gl(ring, h, tau, structured, &mut rng);
        let yt = linalg::mul(ring, &bases[0], &u);
        bases[0] = yt.clone();
        y.push(yt);
        levels.push(bases);
    }
    let c = OLCrystal::new(ring.clone(), h, y)?;
    Ok((c, PRFiltration { levels }))
}

/// Random element of `GL_h(W_{O_L,tau}(k))`.
pub fn random_gl<R: Rng + ?Sized>(
    ring: &Ring,
    h: usize,
    tau: usize,
    structured: bool,
    rng: &mut R,
) -> Mat {
    if structured {
        let mut perm: Vec<usize> = (0..h).collect();
        perm.shuffle(rng);
        let noise_scale = ring.pi(tau);
        return Mat::from_fn(ring, h, h, tau, |i, j| {
            let base = if perm[i] == j {
                ring.random_unit(rng, tau)
            } else {
                ring.zero(tau)
            };
            if rng.gen_bool(0.5) {
                ring.add(&base, &ring.mul(&noise_scale, &ring.random(rng, tau)))
            } else {
                base
            }
        });
    }
    loop {
        let m = Mat::from_fn(ring, h, h, tau, |_, _| ring.random(rng, tau));
        if ring.is_unit(&linalg::det(ring, &m)) {
            return m;
        }
    }
}
