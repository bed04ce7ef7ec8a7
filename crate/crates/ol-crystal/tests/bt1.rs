use std::sync::Arc;

use ol_crystal::arith::{BaseFieldDatum, Fq, LocalFieldDatum, Ring};
use ol_crystal::bt1::*;
use ol_crystal::crystal::*;
use ol_crystal::hasse::hasse_scalar;
use ol_crystal::mu_ordinary::build_x_ord;
use ol_crystal::Error;

fn ring(p: u64, f: usize, e: usize, n: usize, h: usize) -> Arc<Ring> {
    let digits = default_precision(p, n, h, e);
    Ring::new(&LocalFieldDatum::new(p, f, e), &BaseFieldDatum::new(p, n, digits)).unwrap()
}

fn ordered_levels(e: usize, f: usize, h: usize, seed: u64) -> PRDatum {
    let levels = (0..f)
        .map(|t| {
            let mut l: Vec<usize> = (0..e).map(|i| (i * 5 + t * 2 + seed as usize) % (h + 1)).collect();
            l.sort_unstable_by(|a, b| b.cmp(a));
            l
        })
        .collect();
    PRDatum::new(h, levels).unwrap()
}

const SHAPES: [(u64, usize, usize, usize, usize); 7] = [
    (2, 1, 1, 1, 2),
    (3, 1, 2, 1, 2),
    (2, 2, 1, 2, 2),
    (3, 1, 2, 1, 3),
    (2, 2, 2, 2, 2),
    (5, 1, 3, 1, 2),
    (2, 1, 2, 2, 3),
];

fn instances(seeds: u64) -> Vec<(OLCrystal, PRFiltration, PRDatum)> {
    let mut out = Vec::new();
    for (p, f, e, n, h) in SHAPES {
        let r = ring(p, f, e, n, h);
        for seed in 0..seeds {
            let mu = ordered_levels(e, f, h, seed);
            let (c, fil) = random_pr_crystal(&r, &mu, seed * 7 + 1, RandomMode::Mixed).unwrap();
            out.push((c, fil, mu));
        }
    }
    out
}

#[test]
fn agrees_with_perfect_hasse() {
    let all = instances(15);
    assert!(all.len() >= 100);
    let (mut nonzero, mut zero) = (0, 0);
    for (c, fil, mu) in &all {
        let b = Bt1Crystal::from_crystal(c, fil).unwrap();
        let report = validate_bt1(&b, mu);
        assert!(report.ok, "{:?}: {:?}", mu, report.failures);
        for tau in 0..c.f() {
            for i in 1..=c.e() {
                let expected = hasse_scalar(c, fil, mu, tau, i).unwrap();
                let got = general_hasse(&b, mu, tau, i, PreimageChoice::Canonical).unwrap();
                assert_eq!(got, vec![expected], "{:?} at ({tau}, {i})", mu.levels());
                if mu.d(tau, i) > 0 {
                    if expected == 0 {
                        zero += 1;
                    } else {
                        nonzero += 1;
                    }
                }
            }
        }
    }
    assert!(nonzero > 50 && zero > 5, "{nonzero} nonzero, {zero} zero");
}

#[test]
fn base_change_is_functorial() {
    for (c, fil, mu) in instances(4) {
        let b = Bt1Crystal::from_crystal(&c, &fil).unwrap();
        let fq = b.algebra.fq().clone();
        for target in [ArtinAlgebra::dual_numbers(fq.clone()), ArtinAlgebra::truncated(fq.clone(), "t", 3).unwrap()] {
            let lifted = b.base_change(&target).unwrap();
            assert!(validate_bt1(&lifted, &mu).ok);
            assert_eq!(lifted.reduce_to_residue().unwrap(), b);
            for tau in 0..c.f() {
                for i in 1..=c.e() {
                    let down = general_hasse(&b, &mu, tau, i, PreimageChoice::Canonical).unwrap();
                    let up = general_hasse(&lifted, &mu, tau, i, PreimageChoice::Canonical).unwrap();
                    assert_eq!(up, target.scalar(down[0]));
                }
            }
        }
    }
}

#[test]
fn trivial_deformation_of_x_ord_has_unit_invariants() {
    for (p, f, e, n, h) in SHAPES {
        let r = ring(p, f, e, n, h);
        let mu = ordered_levels(e, f, h, 1);
        let (c, fil) = build_x_ord(&r, &mu).unwrap();
        let b = Bt1Crystal::from_crystal(&c, &fil).unwrap();
        let lifted = b.base_change(&ArtinAlgebra::dual_numbers(r.residue_field().clone())).unwrap();
        let report = total_general_hasse(&lifted, &mu, PreimageChoice::Canonical).unwrap();
        assert!(report.total_unit);
        assert!(report.entries.iter().all(|x| x.unit));
    }
}

#[test]
fn preimage_choice_does_not_matter() {
    let mut with_lower_factors = 0;
    for (c, fil, mu) in instances(5) {
        let b = Bt1Crystal::from_crystal(&c, &fil).unwrap();
        for tau in 0..c.f() {
            for i in 1..=c.e() {
                let d = mu.d(tau, i);
                if d > mu.d((tau + c.f() - 1) % c.f(), 1) {
                    with_lower_factors += 1;
                }
                let canonical = general_hasse(&b, &mu, tau, i, PreimageChoice::Canonical).unwrap();
                for seed in 0..3 {
                    let random = general_hasse(&b, &mu, tau, i, PreimageChoice::Random(seed)).unwrap();
                    assert_eq!(random, canonical);
                }
            }
        }
    }
    assert!(with_lower_factors > 0);
}

#[test]
fn induced_maps_are_alternating() {
    for (c, fil, mu) in instances(3) {
        if c.f() < 2 && c.e() < 2 {
            continue;
        }
        let b = Bt1Crystal::from_crystal(&c, &fil).unwrap();
        let f = c.f();
        for tau in 0..f {
            let src = (tau + 1) % f;
            let levels = pullback_filtration(&b, src).unwrap();
            let run = |vectors: Vec<Vec<u64>>, choice: SplitChoice| {
                let d = vectors.len();
                let mut terms = vec![WedgeTerm { coef: b.algebra.one(), vectors }];
                for j in (2..=b.e).rev() {
                    terms = wedge_pi_induced(&b, &levels, j, d, &terms, choice).unwrap();
                }
                h_map(&b, tau, &levels, d, &terms, PreimageChoice::Canonical).unwrap()
            };
            let x = b.add_vec(&b.basis_vector(0, 0, 0), &b.basis_vector(1, 0, 0));
            let y = b.basis_vector(1, 0, 0);
            let zero = vec![b.algebra.zero(); ol_crystal::linalg::binom(b.h, 2)];
            for choice in [SplitChoice::First, SplitChoice::Last] {
                assert_eq!(run(vec![x.clone(), x.clone()], choice), zero, "{:?}", mu.levels());
                let xy = run(vec![x.clone(), y.clone()], choice);
                let yx = run(vec![y.clone(), x.clone()], choice);
                let neg: Vec<_> = yx.iter().map(|v| b.algebra.neg(v)).collect();
                assert_eq!(xy, neg);
            }
        }
    }
}

#[test]
fn trivial_graded_piece_and_unordered_datum() {
    let r = ring(3, 1, 3, 1, 2);
    let mu = PRDatum::new(2, vec![vec![2, 1, 0]]).unwrap();
    let (c, fil) = build_x_ord(&r, &mu).unwrap();
    let b = Bt1Crystal::from_crystal(&c, &fil).unwrap();
    assert_eq!(general_hasse(&b, &mu, 0, 3, PreimageChoice::Canonical).unwrap(), b.algebra.one());
    let unordered = PRDatum::new(2, vec![vec![0, 1, 2]]).unwrap();
    assert!(matches!(
        general_hasse(&b, &unordered, 0, 1, PreimageChoice::Canonical),
        Err(Error::OrderedDatumRequired)
    ));
}

#[test]
fn validation_names_the_broken_condition() {
    let r = ring(3, 1, 2, 1, 2);
    let mu = PRDatum::new(2, vec![vec![2, 0]]).unwrap();
    let (c, fil) = random_pr_crystal(&r, &mu, 5, RandomMode::Generic).unwrap();
    let b = Bt1Crystal::from_crystal(&c, &fil).unwrap();
    assert!(validate_bt1(&b, &mu).ok);

    let wrong = PRDatum::new(2, vec![vec![1, 1]]).unwrap();
    let report = validate_bt1(&b, &wrong);
    assert!(!report.ok);
    assert!(report.failures.iter().any(|m| m.contains("graded rank")));

    let mut broken = b.clone();
    let one = b.algebra.fq().one();
    broken.frob[0].data[0][0] = b.algebra.fq().add(broken.frob[0].data[0][0], one);
    let report = validate_bt1(&broken, &mu);
    assert!(report.failures.iter().any(|m| m.contains("F V is not zero") || m.contains("V F is not zero")));

    let mut broken = b.clone();
    broken.omega[0][1] = vec![b.basis_vector(0, 0, 0)];
    let report = validate_bt1(&broken, &mu);
    assert!(!report.ok);
    assert!(report.failures.iter().any(|m| m.contains("level 1")));

    let mut broken = b.clone();
    broken.omega[0][0] = vec![b.basis_vector(1, 1, 0)];
    assert!(validate_bt1(&broken, &mu).failures.iter().any(|m| m.contains("level 0")));

    let mut broken = b.clone();
    let top = broken.omega[0][2].clone();
    broken.omega[0][2] = top.iter().map(|v| b.pi_mul(v)).collect();
    let report = validate_bt1(&broken, &mu);
    assert!(report.failures.iter().any(|m| m.contains("image of V")));
}

fn dual_family(p: u64, x: i64, y: i64) -> ((Bt1Crystal, PRDatum), (Bt1Crystal, PRDatum)) {
    let fq = Fq::new(p, &Fq::default_modulus(p, 1)).unwrap();
    let (x, y) = (fq.from_int(x), fq.from_int(y));
    (
        dual_family_ordered(p, 1, x, y).unwrap(),
        dual_family_unordered(p, 1, x, y).unwrap(),
    )
}

#[test]
fn undeformed_family_member_is_mu_ordinary() {
    for p in [2, 3, 5] {
        let ((b, mu), (bu, muu)) = dual_family(p, 0, 0);
        assert!(validate_bt1(&b, &mu).ok);
        assert!(validate_bt1(&bu, &muu).ok);
        let report = total_general_hasse(&b, &mu, PreimageChoice::Canonical).unwrap();
        assert!(report.total_unit);
    }
}

#[test]
fn doubly_deformed_family_member_is_rejected() {
    for p in [2, 3, 5] {
        let ((b, mu), (bu, muu)) = dual_family(p, 1, 1);
        let ordered = validate_bt1(&b, &mu);
        assert!(!ordered.ok);
        assert!(ordered.failures.iter().any(|m| m.contains("not free")));
        let unordered = validate_bt1(&bu, &muu);
        assert!(!unordered.ok);
        assert!(unordered.failures.iter().any(|m| m.contains("not free")));
    }
}

#[test]
fn singly_deformed_family_members_are_pinned() {
    for p in [2, 3, 5] {
        // deforming only the first generator keeps both candidates valid
        let ((b, mu), (bu, muu)) = dual_family(p, 1, 0);
        assert!(validate_bt1(&b, &mu).ok);
        assert!(validate_bt1(&bu, &muu).ok);
        let report = total_general_hasse(&b, &mu, PreimageChoice::Canonical).unwrap();
        assert!(report.total_unit);
        let reduced = b.reduce_to_residue().unwrap();
        let ((b0, _), _) = dual_family(p, 0, 0);
        assert_eq!(reduced, b0.reduce_to_residue().unwrap());
        let base = total_general_hasse(&reduced, &mu, PreimageChoice::Canonical).unwrap();
        assert_eq!(base.total, vec![report.total[0]]);

        // deforming only the last generator breaks both candidates
        let ((b, mu), (bu, muu)) = dual_family(p, 0, 1);
        assert_eq!(
            validate_bt1(&b, &mu).first_failure(),
            Some("embedding 0, level 1: graded piece is not free")
        );
        assert_eq!(
            validate_bt1(&bu, &muu).first_failure(),
            Some("embedding 0, level 1: graded piece is not free")
        );
    }
}
