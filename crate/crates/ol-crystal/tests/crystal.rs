use std::sync::Arc;

use ol_crystal::arith::{BaseFieldDatum, LocalFieldDatum, Ring};
use ol_crystal::crystal::*;
use ol_crystal::linalg::Mat;
use ol_crystal::polygon::{q, Polygon};
use ol_crystal::Error;

fn ring(p: u64, f: usize, e: usize, n: usize, h: usize) -> Arc<Ring> {
    let digits = default_precision(p, n, h, e);
    Ring::new(&LocalFieldDatum::new(p, f, e), &BaseFieldDatum::new(p, n, digits)).unwrap()
}

fn poly(s: &[(i64, i64)]) -> Polygon {
    Polygon::from_slopes(s.iter().map(|(a, b)| q(*a, *b)).collect())
}

fn diag_crystal(r: &Arc<Ring>, entries: &[i128]) -> OLCrystal {
    let d: Vec<_> = entries.iter().map(|x| r.from_int(*x, 0)).collect();
    OLCrystal::new(r.clone(), entries.len(), vec![Mat::diag(r, &d, 0)]).unwrap()
}

fn supersingular(r: &Arc<Ring>) -> OLCrystal {
    let p = r.p() as i128;
    let y = Mat::from_fn(r, 2, 2, 0, |i, j| match (i, j) {
        (0, 1) => r.from_int(p, 0),
        (1, 0) => r.one(0),
        _ => r.zero(0),
    });
    OLCrystal::new(r.clone(), 2, vec![y]).unwrap()
}

#[test]
fn hodge_examples() {
    let r = ring(3, 1, 1, 1, 2);
    assert_eq!(hodge_polygon(&diag_crystal(&r, &[1, 3])).unwrap(), poly(&[(0, 1), (1, 1)]));
    assert_eq!(hodge_polygon(&diag_crystal(&r, &[1, 1])).unwrap(), poly(&[(0, 1), (0, 1)]));
    let r3 = ring(3, 1, 3, 1, 2);
    let y = Mat::diag(&r3, &[r3.pi(0), r3.pi_pow(2, 0)], 0);
    let c = OLCrystal::new(r3.clone(), 2, vec![y]).unwrap();
    assert_eq!(hodge_polygon_tau(&c, 0).unwrap(), poly(&[(1, 3), (2, 3)]));
}

#[test]
fn newton_examples() {
    let r = ring(5, 1, 1, 1, 2);
    assert_eq!(newton_polygon(&diag_crystal(&r, &[1, 5])).unwrap(), poly(&[(0, 1), (1, 1)]));
    assert_eq!(newton_polygon(&supersingular(&r)).unwrap(), poly(&[(1, 2), (1, 2)]));
    let r3 = ring(5, 1, 3, 1, 1);
    let c = OLCrystal::new(r3.clone(), 1, vec![Mat::diag(&r3, &[r3.pi_pow(2, 0)], 0)]).unwrap();
    assert_eq!(newton_polygon(&c).unwrap(), poly(&[(2, 3)]));
}

#[test]
fn oracle_examples() {
    let r = ring(5, 1, 1, 2, 2);
    assert_eq!(newton_oracle(&diag_crystal(&r, &[1, 5]), 1 << 20).unwrap(), poly(&[(0, 1), (1, 1)]));
    assert_eq!(newton_oracle(&supersingular(&r), 1 << 20).unwrap(), poly(&[(1, 2), (1, 2)]));
}

#[test]
fn pr_examples() {
    let mu = PRDatum::new(2, vec![vec![0, 1, 2]]).unwrap();
    assert_eq!(pr_polygon(&mu), poly(&[(1, 3), (2, 3)]));
    let zero = PRDatum::new(3, vec![vec![0, 0], vec![0, 0]]).unwrap();
    assert_eq!(pr_polygon(&zero), poly(&[(0, 1), (0, 1), (0, 1)]));
    let full = PRDatum::new(3, vec![vec![3, 3]]).unwrap();
    assert_eq!(pr_polygon(&full), poly(&[(1, 1), (1, 1), (1, 1)]));
}

#[test]
fn exterior_datum_examples() {
    let mu = PRDatum::new(2, vec![vec![1]]).unwrap();
    let ext = exterior_datum(&mu, 2).unwrap();
    assert_eq!(ext.levels(), &[vec![1, 0]]);
    let full = PRDatum::new(3, vec![vec![3, 3]]).unwrap();
    let ext = exterior_datum(&full, 2).unwrap();
    assert!(ext.levels()[0].iter().all(|d| *d == 3));
}

#[test]
fn exterior_power_examples() {
    let r = ring(3, 1, 1, 1, 2);
    let c = diag_crystal(&r, &[1, 3]);
    let mu = PRDatum::new(2, vec![vec![1]]).unwrap();
    let fil = PRFiltration {
        levels: vec![vec![c.y[0].clone(), Mat::identity(&r, 2, 0)]],
    };
    assert!(validate_pr(&c, &fil, &mu).unwrap().ok);
    let (ext, efil) = exterior_power(&c, &fil, 2).unwrap();
    assert_eq!(ext.h, 1);
    assert_eq!(newton_polygon(&ext).unwrap(), poly(&[(1, 1)]));
    let emu = exterior_datum(&mu, 2).unwrap();
    assert!(validate_pr(&ext, &efil, &emu).unwrap().ok);
    let (same, _) = exterior_power(&c, &fil, 1).unwrap();
    assert_eq!(same.y, c.y);
}

#[test]
fn random_instances_validate_and_satisfy_mazur() {
    let grid = [(1, 1, 2), (2, 1, 2), (3, 1, 2), (1, 2, 3), (2, 2, 2), (3, 2, 1)];
    for (idx, &(e, f, h)) in grid.iter().enumerate() {
        let n = f;
        let r = ring(3, f, e, n, h);
        for seed in 0..6u64 {
            let levels: Vec<Vec<usize>> = (0..f)
                .map(|t| {
                    let mut l: Vec<usize> = (0..e).map(|i| (i + t + seed as usize) % (h + 1)).collect();
                    l.sort_unstable_by(|a, b| b.cmp(a));
                    l
                })
                .collect();
            let mu = PRDatum::new(h, levels).unwrap();
            let (c, fil) = random_pr_crystal(&r, &mu, seed * 31 + idx as u64, RandomMode::Mixed).unwrap();
            let rep = validate_pr(&c, &fil, &mu).unwrap();
            assert!(rep.ok, "{:?}", rep);
            let newt = newton_polygon(&c).unwrap();
            let hdg = hodge_polygon(&c).unwrap();
            let pr = pr_polygon(&mu);
            assert!(newt.dominates(&hdg).unwrap(), "{newt} vs {hdg}");
            assert!(hdg.dominates(&pr).unwrap(), "{hdg} vs {pr}");
            assert_eq!(newt.eval(h).unwrap(), pr.eval(h).unwrap());
            assert_eq!(hdg.eval(h).unwrap(), pr.eval(h).unwrap());
            for tau in 1..f {
                assert_eq!(newton_polygon_at(&c, tau).unwrap(), newt);
            }
            match newton_oracle(&c, 1 << 24) {
                Ok(o) => assert_eq!(o, newt),
                Err(Error::NoConvergence(_)) => {}
                Err(e) => panic!("{e}"),
            }
            for s in 1..=h {
                let (ec, efil) = exterior_power(&c, &fil, s).unwrap();
                let emu = exterior_datum(&mu, s).unwrap();
                assert!(validate_pr(&ec, &efil, &emu).unwrap().ok);
                assert_eq!(newton_polygon(&ec).unwrap().eval(1).unwrap(), newt.eval(s).unwrap());
                for tau in 0..f {
                    assert_eq!(
                        hodge_polygon_tau(&ec, tau).unwrap().eval(1).unwrap(),
                        hodge_polygon_tau(&c, tau).unwrap().eval(s).unwrap()
                    );
                }
                assert_eq!(pr_polygon(&emu).eval(1).unwrap(), pr.eval(s).unwrap());
            }
        }
    }
}

#[test]
fn validation_catches_mutations() {
    let r = ring(3, 1, 2, 1, 2);
    let mu = PRDatum::new(2, vec![vec![1, 1]]).unwrap();
    let (c, fil) = random_pr_crystal(&r, &mu, 5, RandomMode::Generic).unwrap();
    let wrong = PRDatum::new(2, vec![vec![2, 0]]).unwrap();
    let rep = validate_pr(&c, &fil, &wrong).unwrap();
    assert!(!rep.ok);
    assert!(rep.first_failure().unwrap().contains("graded dimension"));
    let mut bad = fil.clone();
    bad.levels[0][0] = Mat::identity(&r, 2, 0);
    let rep = validate_pr(&c, &bad, &mu).unwrap();
    assert!(rep.first_failure().unwrap().contains("level 0"));
}

#[test]
fn determinism() {
    let r = ring(2, 1, 2, 2, 3);
    let mu = PRDatum::new(3, vec![vec![2, 1]]).unwrap();
    let a = random_pr_crystal(&r, &mu, 99, RandomMode::Mixed).unwrap();
    let b = random_pr_crystal(&r, &mu, 99, RandomMode::Mixed).unwrap();
    assert_eq!(a.0.y, b.0.y);
    assert_eq!(a.1, b.1);
}
