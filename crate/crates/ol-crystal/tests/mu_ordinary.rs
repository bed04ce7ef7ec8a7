use std::sync::Arc;

use ol_crystal::arith::{BaseFieldDatum, LocalFieldDatum, Ring};
use ol_crystal::crystal::*;
use ol_crystal::hasse::{is_mu_ordinary, total_mu_hasse};
use ol_crystal::linalg::{self, Mat};
use ol_crystal::mu_ordinary::*;
use ol_crystal::polygon::{q, Polygon};
use ol_crystal::Error;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

fn ring(p: u64, f: usize, e: usize, n: usize, h: usize) -> Arc<Ring> {
    let digits = default_precision(p, n, h, e);
    Ring::new(&LocalFieldDatum::new(p, f, e), &BaseFieldDatum::new(p, n, digits)).unwrap()
}

fn poly(s: &[(i64, i64)]) -> Polygon {
    Polygon::from_slopes(s.iter().map(|(a, b)| q(*a, *b)).collect())
}

fn scramble(c: &OLCrystal, seed: u64) -> OLCrystal {
    let r = &c.ring;
    let f = c.f();
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let qs: Vec<Mat> = (0..f).map(|t| random_gl(r, c.h, t, false, &mut rng)).collect();
    let y = (0..f)
        .map(|t| {
            let rhs = linalg::mul(r, c.frobenius(t), &linalg::sigma(r, &qs[(t + f - 1) % f]));
            linalg::solve(r, &qs[t], &rhs).unwrap()
        })
        .collect();
    OLCrystal::new(r.clone(), c.h, y).unwrap()
}

#[test]
fn x_beta_slopes() {
    let r = ring(3, 1, 3, 1, 1);
    let c = build_x_beta(&r, &SlopeDatum { beta: vec![2] }).unwrap();
    assert_eq!(newton_polygon(&c).unwrap(), poly(&[(2, 3)]));
    assert_eq!(hodge_polygon(&c).unwrap(), poly(&[(2, 3)]));
    let r2 = ring(2, 2, 2, 2, 1);
    for (beta, slope) in [(vec![0, 0], (0, 1)), (vec![2, 2], (1, 1)), (vec![1, 2], (3, 4))] {
        let c = build_x_beta(&r2, &SlopeDatum { beta }).unwrap();
        assert_eq!(newton_polygon(&c).unwrap(), poly(&[slope]));
    }
    assert!(build_x_beta(&r2, &SlopeDatum { beta: vec![3, 0] }).is_err());
}

#[test]
fn break_data_examples() {
    let bd = break_data(&PRDatum::new(2, vec![vec![0, 1, 2]]).unwrap());
    assert_eq!(bd.breaks, vec![0, 1, 2]);
    assert_eq!(bd.r(), 1);
    assert_eq!(bd.alpha, vec![vec![2], vec![1]]);
    let bd = break_data(&PRDatum::new(3, vec![vec![3, 3], vec![3, 3]]).unwrap());
    assert_eq!(bd.r(), 0);
    assert_eq!(bd.alpha, vec![vec![2, 2]]);
    let bd = break_data(&PRDatum::new(3, vec![vec![0, 0]]).unwrap());
    assert_eq!(bd.r(), 0);
    assert_eq!(bd.alpha, vec![vec![0]]);
    let bd = break_data(&PRDatum::new(4, vec![vec![3, 1], vec![2, 0]]).unwrap());
    assert_eq!(bd.breaks, vec![0, 1, 2, 3, 4]);
    for w in bd.alpha.windows(2) {
        assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a >= b));
    }
}

#[test]
fn x_ord_golden() {
    let r = ring(3, 1, 3, 1, 2);
    let mu = PRDatum::new(2, vec![vec![0, 1, 2]]).unwrap();
    let (c, fil) = build_x_ord(&r, &mu).unwrap();
    let newt = newton_polygon(&c).unwrap();
    assert_eq!(newt, poly(&[(1, 3), (2, 3)]));
    assert_eq!(hodge_polygon(&c).unwrap(), newt);
    assert_eq!(pr_polygon(&mu), newt);
    assert!(validate_pr(&c, &fil, &mu).unwrap().ok);
    assert!(matches!(total_mu_hasse(&c, &fil, &mu), Err(Error::OrderedDatumRequired)));
    let ordered = PRDatum::new(2, vec![vec![2, 1, 0]]).unwrap();
    let (c2, fil2) = build_x_ord(&r, &ordered).unwrap();
    assert_eq!(newton_polygon(&c2).unwrap(), newt);
    assert!(total_mu_hasse(&c2, &fil2, &ordered).unwrap().total_nonzero);
}

#[test]
fn x_ord_is_mu_ordinary_for_many_data() {
    for &(e, f, h) in &[(1, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 2), (1, 2, 3), (3, 2, 3)] {
        let r = ring(5, f, e, f, h);
        for shift in 0..4 {
            let levels: Vec<Vec<usize>> = (0..f)
                .map(|t| {
                    let mut l: Vec<usize> = (0..e).map(|i| (i * 2 + t + shift) % (h + 1)).collect();
                    l.sort_unstable_by(|a, b| b.cmp(a));
                    l
                })
                .collect();
            let mu = PRDatum::new(h, levels).unwrap();
            let (c, fil) = build_x_ord(&r, &mu).unwrap();
            let pr = pr_polygon(&mu);
            assert_eq!(newton_polygon(&c).unwrap(), pr);
            assert_eq!(hodge_polygon(&c).unwrap(), pr);
            assert!(validate_pr(&c, &fil, &mu).unwrap().ok, "{:?}", mu.levels());
            assert!(total_mu_hasse(&c, &fil, &mu).unwrap().total_nonzero);
            let blocks = mu_ordinary_decomposition(&c, &fil, &mu).unwrap();
            let bd = break_data(&mu);
            assert_eq!(blocks.len(), bd.r() + 1);
            for (j, b) in blocks.iter().enumerate() {
                assert_eq!(b.multiplicity, bd.multiplicity(j + 1));
                assert_eq!(b.slope_datum.beta, bd.alpha[j]);
            }
        }
    }
}

#[test]
fn classical_x_ord() {
    let r = ring(3, 1, 1, 1, 3);
    let mu = PRDatum::new(3, vec![vec![1]]).unwrap();
    let (c, _) = build_x_ord(&r, &mu).unwrap();
    assert_eq!(newton_polygon(&c).unwrap(), poly(&[(0, 1), (0, 1), (1, 1)]));
}

#[test]
fn etale_part_examples() {
    let r = ring(5, 1, 1, 1, 2);
    let c = OLCrystal::new(r.clone(), 2, vec![Mat::diag(&r, &[r.one(0), r.from_int(5, 0)], 0)]).unwrap();
    let et = etale_part(&c).unwrap();
    assert_eq!(et.crystal.h, 1);
    assert_eq!(et.embedding[0].col(0), vec![r.one(0), r.zero(0)]);
    let ss = Mat::from_fn(&r, 2, 2, 0, |i, j| match (i, j) {
        (0, 1) => r.from_int(5, 0),
        (1, 0) => r.one(0),
        _ => r.zero(0),
    });
    let ss = OLCrystal::new(r.clone(), 2, vec![ss]).unwrap();
    assert!(matches!(etale_part(&ss), Err(Error::EmptyEtalePart)));
    assert!(matches!(hn_split(&ss, 1), Err(Error::NotABreakContact(1))));

    let r3 = ring(3, 1, 2, 2, 3);
    let mu = PRDatum::new(3, vec![vec![1, 0]]).unwrap();
    let (xo, _) = build_x_ord(&r3, &mu).unwrap();
    let et = etale_part(&scramble(&xo, 4)).unwrap();
    assert_eq!(et.crystal.h, 2);
    assert_eq!(newton_polygon(&et.crystal).unwrap(), poly(&[(0, 1), (0, 1)]));
}

#[test]
fn split_diagonal_and_scrambled() {
    let r = ring(5, 1, 1, 1, 2);
    let c = OLCrystal::new(r.clone(), 2, vec![Mat::diag(&r, &[r.one(0), r.from_int(5, 0)], 0)]).unwrap();
    let s = hn_split(&c, 1).unwrap();
    assert_eq!(newton_polygon(&s.lower).unwrap(), poly(&[(0, 1)]));
    assert_eq!(newton_polygon(&s.upper).unwrap(), poly(&[(1, 1)]));

    let r3 = ring(3, 1, 3, 1, 2);
    let y = Mat::diag(&r3, &[r3.pi(0), r3.pi_pow(2, 0)], 0);
    let c = OLCrystal::new(r3.clone(), 2, vec![y]).unwrap();
    let s = hn_split(&scramble(&c, 11), 1).unwrap();
    assert_eq!(newton_polygon(&s.lower).unwrap(), poly(&[(1, 3)]));
    assert_eq!(newton_polygon(&s.upper).unwrap(), poly(&[(2, 3)]));
    assert_eq!(hodge_polygon(&s.lower).unwrap(), poly(&[(1, 3)]));
}

#[test]
fn planted_round_trips() {
    let configs = [(3u64, 1usize, 1usize, 1usize), (3, 1, 2, 1), (5, 1, 3, 1), (2, 2, 2, 2), (3, 2, 1, 2), (3, 1, 2, 2)];
    for (idx, &(p, f, e, n)) in configs.iter().enumerate() {
        let r = ring(p, f, e, n, 6);
        for seed in 0..5u64 {
            let inst = planted_hn_instance(&r, seed * 17 + idx as u64).unwrap();
            let c = &inst.crystal;
            let newt = newton_polygon(c).unwrap();
            let planted = inst.block_polygons.iter().fold(Polygon::empty(), |a, b| a.concat(b));
            assert_eq!(newt, planted);
            for (k, at) in inst.internal_breaks().into_iter().enumerate() {
                let s = hn_split(c, at).unwrap();
                assert_eq!(s.lower.h, at);
                assert_eq!(s.upper.h, c.h - at);
                let low = inst.block_polygons[..=k].iter().fold(Polygon::empty(), |a, b| a.concat(b));
                let high = inst.block_polygons[k + 1..].iter().fold(Polygon::empty(), |a, b| a.concat(b));
                assert_eq!(newton_polygon(&s.lower).unwrap(), low);
                assert_eq!(newton_polygon(&s.upper).unwrap(), high);
                for tau in 0..f {
                    let full = hodge_polygon_tau(c, tau).unwrap();
                    let parts = hodge_polygon_tau(&s.lower, tau).unwrap().concat(&hodge_polygon_tau(&s.upper, tau).unwrap());
                    assert_eq!(parts, full);
                }
            }
        }
    }
}

#[test]
fn scrambled_random_mu_ordinary_decomposes() {
    let mut hits = 0;
    for &(e, f, h) in &[(2, 1, 2), (3, 1, 3), (2, 2, 2), (1, 2, 3)] {
        let r = ring(3, f, e, f, h);
        for seed in 0..8u64 {
            let levels: Vec<Vec<usize>> = (0..f)
                .map(|t| {
                    let mut l: Vec<usize> = (0..e).map(|i| (i + 2 * t + seed as usize) % (h + 1)).collect();
                    l.sort_unstable_by(|a, b| b.cmp(a));
                    l
                })
                .collect();
            let mu = PRDatum::new(h, levels).unwrap();
            let (c, fil) = random_pr_crystal(&r, &mu, seed, RandomMode::Mixed).unwrap();
            if is_mu_ordinary(&c, &mu).unwrap() {
                hits += 1;
                let blocks = mu_ordinary_decomposition(&c, &fil, &mu).unwrap();
                let bd = break_data(&mu);
                let got: Vec<_> = blocks.iter().map(|b| (b.multiplicity, b.slope_datum.beta.clone())).collect();
                let want: Vec<_> = (1..=bd.r() + 1).map(|j| (bd.multiplicity(j), bd.alpha[j - 1].clone())).collect();
                assert_eq!(got, want);
            } else {
                assert!(matches!(mu_ordinary_decomposition(&c, &fil, &mu), Err(Error::NotMuOrdinary)));
            }
        }
    }
    assert!(hits > 0);
}
