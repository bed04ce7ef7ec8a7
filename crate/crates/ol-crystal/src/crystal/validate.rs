use super::{OLCrystal, PRDatum, PRFiltration};
use crate::error::Result;
use crate::linalg::{self, Mat};

/// Outcome of a PR validation: `ok` plus the failed conditions in the order checked.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub ok: bool,
    pub failures: Vec<String>,
}

impl ValidationReport {
    /// The first violated condition, if any.
    pub fn first_failure(&self) -> Option<&str> {
        self.failures.first().map(|s| s.as_str())
    }
}

/// Checks the PR conditions: level 0 is the image of Frobenius, the top level is the
/// whole module, levels increase, `pi` steps down one level, and graded lengths are `d_{tau,i}`.
pub fn validate_pr(c: &OLCrystal, fil: &PRFiltration, mu: &PRDatum) -> Result<ValidationReport> {
    let r = &c.ring;
    let mut failures = Vec::new();
    if fil.levels.len() != c.f() || mu.f() != c.f() {
        failures.push("number of embeddings differs between crystal, filtration and datum".into());
        return Ok(ValidationReport { ok: false, failures });
    }
    if mu.h() != c.h {
        failures.push(format!("datum rank {} differs from crystal rank {}", mu.h(), c.h));
        return Ok(ValidationReport { ok: false, failures });
    }
    for tau in 0..c.f() {
        let steps = fil.levels[tau].len();
        if steps != mu.r() + 1 {
            failures.push(format!(
                "embedding {tau}: filtration has {} levels, datum expects {}",
                steps,
                mu.r() + 1
            ));
            continue;
        }
        let mut bases: Vec<Option<Mat>> = Vec::with_capacity(steps);
        for (i, g) in fil.levels[tau].iter().enumerate() {
            if g.rows != c.h || g.tau != tau {
                failures.push(format!("embedding {tau}, level {i}: generator matrix has wrong shape"));
                bases.push(None);
                continue;
            }
            match linalg::lattice_basis(r, g) {
                Ok(b) => bases.push(Some(b)),
                Err(_) => {
                    failures.push(format!(
                        "embedding {tau}, level {i}: generators do not span a full-rank lattice"
                    ));
                    bases.push(None);
                }
            }
        }
        // level 0 equals the image of Frobenius
        if let Some(b0) = &bases[0] {
            let fb = linalg::lattice_basis(r, c.frobenius(tau))?;
            if !linalg::contained_in(r, &fb, b0)? || !linalg::contained_in(r, b0, &fb)? {
                failures.push(format!("embedding {tau}, level 0: not equal to the image of Frobenius"));
            }
        }
        // top level is the whole module
        if let Some(top) = &bases[steps - 1] {
            if linalg::colength(r, top)? != 0 {
                failures.push(format!(
                    "embedding {tau}, level {}: top level is not the whole module",
                    steps - 1
                ));
            }
        }
        for i in 1..steps {
            let (Some(lo), Some(hi)) = (&bases[i - 1], &bases[i]) else {
                continue;
            };
            if !linalg::contained_in(r, lo, hi)? {
                failures.push(format!("embedding {tau}, level {i}: level {} is not contained in level {i}", i - 1));
                continue;
            }
            let pi_hi = linalg::mul_pi_pow(r, hi, 1);
            if !linalg::contained_in(r, &pi_hi, lo)? {
                failures.push(format!("embedding {tau}, level {i}: pi times level {i} is not contained in level {}", i - 1));
            }
            let len = linalg::colength(r, lo)? as i64 - linalg::colength(r, hi)? as i64;
            if len != mu.d(tau, i) as i64 {
                failures.push(format!(
                    "embedding {tau}, level {i}: graded dimension {len}, expected {}",
                    mu.d(tau, i)
                ));
            }
        }
    }
    Ok(ValidationReport {
        ok: failures.is_empty(),
        failures,
    })
}
