//! Crystals with `O_L`-action over `W(k)`, their PR filtrations and PR data, and the
//! polygon computations attached to them.

mod exterior;
mod hodge;
mod newton;
mod oracle;
mod pr;
mod random;
mod validate;

use std::sync::Arc;

pub use exterior::exterior_power;
pub use hodge::{hodge_polygon, hodge_polygon_tau};
pub use newton::{frobenius_power, linearized_frobenius, newton_polygon, newton_polygon_at};
pub use oracle::newton_oracle;
pub use pr::{exterior_datum, pr_polygon, pr_polygon_tau};
pub use random::{random_gl, random_pr_crystal, RandomMode};
pub use validate::{validate_pr, ValidationReport};

use crate::arith::{BaseFieldDatum, Ring};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// The integers `d_{tau,i}` prescribing graded dimensions of a PR filtration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PRDatum {
    h: usize,
    e: usize,
    levels: Vec<Vec<usize>>,
}

impl PRDatum {
    /// A datum of rank `h` with `e` levels per embedding (`levels[tau].len() == e`).
    pub fn new(h: usize, levels: Vec<Vec<usize>>) -> Result<PRDatum> {
        let e = levels.first().map(|l| l.len()).unwrap_or(0);
        PRDatum::with_normalizer(h, e, levels)
    }

    /// A datum whose level lists may be longer than the ramification index `e`
    /// (as for exterior powers), with the polygon normalized by `1/e`.
    pub fn with_normalizer(h: usize, e: usize, levels: Vec<Vec<usize>>) -> Result<PRDatum> {
        if levels.is_empty() {
            return Err(Error::InvalidInput("datum needs at least one embedding".into()));
        }
        if e == 0 {
            return Err(Error::InvalidInput("datum needs at least one level".into()));
        }
        let r = levels[0].len();
        for (tau, l) in levels.iter().enumerate() {
            if l.len() != r || r == 0 {
                return Err(Error::InvalidInput(format!(
                    "embedding {tau} has {} levels, expected {r}",
                    l.len()
                )));
            }
            if let Some(d) = l.iter().find(|d| **d > h) {
                return Err(Error::InvalidInput(format!(
                    "level dimension {d} exceeds the rank {h}"
                )));
            }
        }
        Ok(PRDatum { h, e, levels })
    }

    pub fn h(&self) -> usize {
        self.h
    }
    /// The normalizing ramification index.
    pub fn e(&self) -> usize {
        self.e
    }
    /// Number of embeddings.
    pub fn f(&self) -> usize {
        self.levels.len()
    }
    /// Number of filtration steps per embedding.
    pub fn r(&self) -> usize {
        self.levels[0].len()
    }
    /// `d_{tau,i}` for `1 <= i <= r`.
    pub fn d(&self, tau: usize, i: usize) -> usize {
        self.levels[tau % self.f()][i - 1]
    }
    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }
    /// True when `d_{tau,1} >= ... >= d_{tau,r}` for every embedding.
    pub fn is_ordered(&self) -> bool {
        self.levels.iter().all(|l| l.windows(2).all(|w| w[0] >= w[1]))
    }
    /// Total length `sum_i d_{tau,i}` (independent of `tau` for data realized by crystals).
    pub fn total(&self, tau: usize) -> usize {
        self.levels[tau % self.f()].iter().sum()
    }
}

/// A crystal with `O_L`-action: for each embedding a matrix `Y_tau` with
/// `F_tau(x) = Y_tau sigma(x)` mapping `M_{tau-1}` to `M_tau`.
#[derive(Debug, Clone)]
pub struct OLCrystal {
    pub ring: Arc<Ring>,
    pub h: usize,
    pub y: Vec<Mat>,
}

/// Generators of `Fil^{[0]} M_tau ⊂ ... ⊂ Fil^{[r]} M_tau` for every embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PRFiltration {
    pub levels: Vec<Vec<Mat>>,
}

impl PRFiltration {
    /// Generator matrix of `Fil^{[i]} M_tau`.
    pub fn level(&self, tau: usize, i: usize) -> &Mat {
        &self.levels[tau % self.levels.len()][i]
    }
    /// Number of steps `r`.
    pub fn r(&self) -> usize {
        self.levels[0].len() - 1
    }
}

/// Default working precision `N = n h + e + 4`, capped by the machine limit.
pub fn default_precision(p: u64, n: usize, h: usize, e: usize) -> u32 {
    ((n * h + e + 4) as u32).min(crate::arith::modint::max_digits(p))
}

impl OLCrystal {
    /// Checks shapes and embedding tags; the Frobenius must be injective.
    pub fn new(ring: Arc<Ring>, h: usize, y: Vec<Mat>) -> Result<OLCrystal> {
        if y.len() != ring.f() {
            return Err(Error::InvalidInput(format!(
                "expected {} Frobenius matrices, got {}",
                ring.f(),
                y.len()
            )));
        }
        for (tau, m) in y.iter().enumerate() {
            if m.rows != h || m.cols != h || m.tau != tau {
                return Err(Error::InvalidInput(format!(
                    "Frobenius matrix {tau} has shape {}x{} (tag {}), expected {h}x{h}",
                    m.rows, m.cols, m.tau
                )));
            }
        }
        let c = OLCrystal { ring, h, y };
        for tau in 0..c.f() {
            if c.ring.is_zero(&linalg::det(&c.ring, &c.y[tau])) {
                return Err(Error::InvalidInput(format!(
                    "Frobenius at embedding {tau} is not injective at working precision"
                )));
            }
        }
        Ok(c)
    }

    pub fn f(&self) -> usize {
        self.ring.f()
    }
    pub fn e(&self) -> usize {
        self.ring.e()
    }
    pub fn n(&self) -> usize {
        self.ring.n()
    }
    /// Matrix of `F_tau`.
    pub fn frobenius(&self, tau: usize) -> &Mat {
        &self.y[tau % self.f()]
    }

    /// Reinterprets the stored residues as exact integers at another precision.
    pub fn with_precision(&self, digits: u32) -> Result<OLCrystal> {
        let base = BaseFieldDatum {
            precision: digits,
            ..self.ring.base().clone()
        };
        let ring = Ring::new(self.ring.local(), &base)?;
        let y = self.y.iter().map(|m| embed_mat(&ring, &self.ring, m)).collect();
        Ok(OLCrystal { ring, h: self.h, y })
    }

    /// Matrix of the Verschiebung `V_tau : M_tau -> M_{tau-1}`,
    /// `V_tau(y) = sigma^{-1}(p Y_tau^{-1}) sigma^{-1}(y)`, tagged with `tau - 1`.
    pub fn verschiebung(&self, tau: usize) -> Result<Mat> {
        let r = &self.ring;
        let pid = linalg::scale(r, &r.from_int(r.p() as i128, tau), &Mat::identity(r, self.h, tau));
        let inv = linalg::solve(r, self.frobenius(tau), &pid)?;
        Ok(linalg::sigma_pow(r, &inv, -1))
    }
}

/// Re-embeds a matrix into a context with the same fields and another precision.
pub fn embed_mat(target: &Ring, source: &Ring, m: &Mat) -> Mat {
    Mat {
        rows: m.rows,
        cols: m.cols,
        tau: m.tau,
        data: m.data.iter().map(|x| target.embed(source, x)).collect(),
    }
}

impl PRFiltration {
    /// Re-embeds all generators into another precision context.
    pub fn embed(&self, target: &Ring, source: &Ring) -> PRFiltration {
        PRFiltration {
            levels: self
                .levels
                .iter()
                .map(|l| l.iter().map(|m| embed_mat(target, source, m)).collect())
                .collect(),
        }
    }
}

/// Runs `op` at the crystal's precision, retrying at doubled precision (two retries at
/// most) when it reports exhausted precision.
pub fn with_precision_retries<T>(
    c: &OLCrystal,
    mut op: impl FnMut(&OLCrystal) -> Result<T>,
) -> Result<T> {
    let max = crate::arith::modint::max_digits(c.ring.p());
    let mut digits = c.ring.digits();
    let mut current = c.clone();
    for attempt in 0..3 {
        match op(&current) {
            Err(Error::PrecisionExhausted(msg)) => {
                if attempt == 2 || digits >= max {
                    return Err(Error::PrecisionExhausted(msg));
                }
                digits = (digits * 2).min(max);
                current = c.with_precision(digits)?;
            }
            other => return other,
        }
    }
    unreachable!()
}
