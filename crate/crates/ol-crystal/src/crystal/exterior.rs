use super::{OLCrystal, PRFiltration};
use crate::error::{Error, Result};
use crate::linalg::{self, subsets, Mat};

/// The `s`-th exterior power: Frobenius matrices are the `s`-th compounds of `Y_tau`,
/// and `Fil^{[i s + j]}` is spanned by wedges of `s - j` generators of `Fil^{[i]}` with
/// `j` generators of `Fil^{[i+1]}`.
pub fn exterior_power(c: &OLCrystal, fil: &PRFiltration, s: usize) -> Result<(OLCrystal, PRFiltration)> {
    let h = c.h;
    if s == 0 || s > h {
        return Err(Error::InvalidInput(format!(
            "exterior power index {s} outside [1, {h}]"
        )));
    }
    let r = &c.ring;
    let y: Vec<Mat> = c.y.iter().map(|m| linalg::compound(r, m, s)).collect();
    let width = linalg::binom(h, s);
    let steps = fil.r();
    let mut levels = Vec::with_capacity(c.f());
    for (tau, y_tau) in y.iter().enumerate() {
        let mut lv = Vec::with_capacity(steps * s + 1);
        lv.push(y_tau.clone());
        for i in 0..steps {
            for j in 1..=s {
                if i == steps - 1 && j == s {
                    lv.push(Mat::identity(r, width, tau));
                    continue;
                }
                let lower = fil.level(tau, i);
                let upper = fil.level(tau, i + 1);
                let mut gens: Vec<Vec<crate::arith::Elem>> = Vec::new();
                for a in subsets(lower.cols, s - j) {
                    for b in subsets(upper.cols, j) {
                        let cols = lower.select_cols(&a).hstack(&upper.select_cols(&b));
                        gens.push(linalg::compound(r, &cols, s).data);
                    }
                }
                let gm = Mat::from_cols(r, width, tau, &gens);
                lv.push(linalg::lattice_basis(r, &gm)?);
            }
        }
        levels.push(lv);
    }
    let ext = OLCrystal::new(c.ring.clone(), width, y)?;
    Ok((ext, PRFiltration { levels }))
}
