//! One PASS/FAIL line per acceptance criterion; exits nonzero when any criterion fails.

use std::sync::Arc;
use std::time::Instant;

use ol_crystal::arith::{BaseFieldDatum, Fq, LocalFieldDatum, Ring};
use ol_crystal::bt1::{
    dual_family_ordered, dual_family_unordered, general_hasse, total_general_hasse, validate_bt1, ArtinAlgebra,
    Bt1Crystal, PreimageChoice,
};
use ol_crystal::crystal::*;
use ol_crystal::hasse::{hasse_scalar, is_mu_ordinary, total_mu_hasse};
use ol_crystal::linalg::Mat;
use ol_crystal::mu_ordinary::{build_x_ord, hn_split, planted_hn_instance};
use ol_crystal::polygon::{q, Polygon};
use ol_crystal::suite::{run_suite, SuiteConfig, SuiteReport, Tally};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn ring(p: u64, f: usize, e: usize, n: usize, h: usize) -> Arc<Ring> {
    Ring::new(&LocalFieldDatum::new(p, f, e), &BaseFieldDatum::new(p, n, default_precision(p, n, h, e))).unwrap()
}

fn poly(s: &[(i64, i64)]) -> Polygon {
    Polygon::from_slopes(s.iter().map(|(a, b)| q(*a, *b)).collect())
}

/// Ordered data for a shape: decreasing lists drawn deterministically from `variant`.
fn ordered_datum(e: usize, f: usize, h: usize, variant: usize) -> PRDatum {
    let levels = (0..f)
        .map(|t| {
            let mut l: Vec<usize> = (0..e).map(|i| (i * 7 + t * 3 + variant * 5 + i * variant) % (h + 1)).collect();
            l.sort_unstable_by(|a, b| b.cmp(a));
            l
        })
        .collect();
    PRDatum::new(h, levels).unwrap()
}

const PRIMES: [u64; 3] = [2, 3, 5];
const VARIANTS: usize = 3;
const TRIALS_PER_DATUM: usize = 10;

/// The random suite over the grid `(e, f, h)` in `{1,2,3} x {1,2} x {1,2,3}`.
fn grid_reports() -> Vec<SuiteReport> {
    let mut reports = Vec::new();
    let mut k = 0;
    for e in 1..=3 {
        for f in 1..=2 {
            for h in 1..=3 {
                for variant in 0..VARIANTS {
                    let p = PRIMES[k % PRIMES.len()];
                    let n = if k % 4 == 3 { 2 * f } else { f };
                    let cfg = SuiteConfig {
                        p,
                        n,
                        mu: ordered_datum(e, f, h, variant),
                        trials: TRIALS_PER_DATUM,
                        seed: 1000 + k as u64,
                        precision: None,
                        oracle_bound: 1 << 22,
                    };
                    reports.push(run_suite(&cfg).unwrap());
                    k += 1;
                }
            }
        }
    }
    reports
}

fn tally(reports: &[SuiteReport], name: &str) -> Tally {
    let mut t = Tally::default();
    for r in reports {
        let (_, x) = r.tallies.iter().find(|(n, _)| n == name).unwrap();
        t.passed += x.passed;
        t.failed += x.failed;
        t.skipped += x.skipped;
    }
    t
}

fn errors(reports: &[SuiteReport]) -> usize {
    reports.iter().map(|r| r.errors.len()).sum()
}

fn first_counterexample(reports: &[SuiteReport], name: &str) -> String {
    reports
        .iter()
        .filter_map(|r| r.counterexample.as_ref().filter(|c| c.check == name).map(|c| (r, c)))
        .map(|(r, c)| format!("; first counterexample: seed {} trial {}", r.config.seed, c.trial))
        .next()
        .unwrap_or_default()
}

fn crit_mazur(reports: &[SuiteReport]) -> Verdict {
    let nh = tally(reports, "newton-above-hodge");
    let hp = tally(reports, "hodge-above-pr");
    let valid = tally(reports, "pr-validation");
    let n = nh.passed + nh.failed;
    let pass = n >= 500 && nh.failed == 0 && hp.failed == 0 && valid.failed == 0 && errors(reports) == 0;
    verdict(
        pass,
        format!(
            "{n} instances over 18 shapes; newton>=hodge fails {}, hodge>=pr fails {}, invalid filtrations {}, errors {}{}",
            nh.failed,
            hp.failed,
            valid.failed,
            errors(reports),
            first_counterexample(reports, "newton-above-hodge") + &first_counterexample(reports, "hodge-above-pr")
        ),
    )
}

fn crit_endpoints(reports: &[SuiteReport]) -> Verdict {
    let t = tally(reports, "endpoints");
    verdict(
        t.passed >= 500 && t.failed == 0 && t.skipped == 0,
        format!("{} instances, {} mismatches", t.passed + t.failed, t.failed),
    )
}

fn crit_oracle(reports: &[SuiteReport]) -> Verdict {
    let t = tally(reports, "oracle-agreement");
    verdict(
        t.passed >= 100 && t.failed == 0,
        format!("{} converged instances agree, {} disagree, {} did not converge", t.passed, t.failed, t.skipped),
    )
}

fn crit_exterior(reports: &[SuiteReport]) -> Verdict {
    let t = tally(reports, "exterior-compatibility");
    verdict(
        t.passed >= 100 && t.failed == 0,
        format!("{} instances (all s = 1..h), {} failures", t.passed + t.failed, t.failed),
    )
}

fn crit_contact(reports: &[SuiteReport]) -> Verdict {
    let t = tally(reports, "contact-iff-nonzero-hasse");
    let (nz, z) = reports.iter().fold((0, 0), |(a, b), r| (a + r.coverage.hasse_nonzero, b + r.coverage.hasse_zero));
    verdict(
        t.passed + t.failed >= 200 && t.failed == 0 && nz > 0 && z > 0,
        format!(
            "{} instances with some 0 < d < h, {} disagreements; {nz} nonzero and {z} vanishing invariants",
            t.passed + t.failed,
            t.failed
        ),
    )
}

fn crit_total(reports: &[SuiteReport]) -> Verdict {
    let t = tally(reports, "total-hasse-iff-mu-ordinary");
    let (o, no) = reports.iter().fold((0, 0), |(a, b), r| (a + r.coverage.mu_ordinary, b + r.coverage.not_mu_ordinary));
    verdict(
        t.passed >= 200 && t.failed == 0 && o > 0 && no > 0,
        format!("{} instances, {} disagreements; {o} mu-ordinary, {no} not", t.passed + t.failed, t.failed),
    )
}

fn crit_x_ord() -> Verdict {
    let unordered = PRDatum::new(2, vec![vec![0, 1, 2]]).unwrap();
    let ordered = PRDatum::new(2, vec![vec![2, 1, 0]]).unwrap();
    let golden = poly(&[(1, 3), (2, 3)]);
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [2, 3, 5, 7] {
        let r = ring(p, 1, 3, 1, 2);
        let (c, fil) = build_x_ord(&r, &unordered).unwrap();
        let newt = newton_polygon(&c).unwrap();
        let equal = newt == golden && hodge_polygon(&c).unwrap() == golden && pr_polygon(&unordered) == golden;
        let valid = validate_pr(&c, &fil, &unordered).unwrap().ok;
        let (co, filo) = build_x_ord(&r, &ordered).unwrap();
        let total = total_mu_hasse(&co, &filo, &ordered).unwrap();
        let b = Bt1Crystal::from_crystal(&co, &filo).unwrap();
        let lifted = b.base_change(&ArtinAlgebra::dual_numbers(r.residue_field().clone())).unwrap();
        let unit = total_general_hasse(&lifted, &ordered, PreimageChoice::Canonical).unwrap().total_unit;
        let same_polygons = newton_polygon(&co).unwrap() == golden && pr_polygon(&ordered) == golden;
        ok &= equal && valid && total.total_nonzero && unit && same_polygons;
        notes.push(format!("p={p}: slopes {newt}"));
    }
    verdict(
        ok,
        format!(
            "{}; Newt = Hdg = PR for (0,1,2); total invariant a unit (computed for the ordered rearrangement (2,1,0), also over k[eps])",
            notes.join(", ")
        ),
    )
}

fn crit_hn_split() -> Verdict {
    let configs = [
        (3u64, 1usize, 1usize, 1usize),
        (3, 1, 2, 1),
        (5, 1, 3, 1),
        (2, 2, 2, 2),
        (3, 2, 1, 2),
        (3, 1, 2, 2),
        (2, 1, 3, 1),
    ];
    let (mut trials, mut splits, mut bad) = (0, 0, Vec::new());
    for (idx, &(p, f, e, n)) in configs.iter().enumerate() {
        let r = ring(p, f, e, n, 6);
        for s in 0..8u64 {
            let seed = s * 31 + idx as u64;
            let inst = planted_hn_instance(&r, seed).unwrap();
            trials += 1;
            let c = &inst.crystal;
            for (k, at) in inst.internal_breaks().into_iter().enumerate() {
                splits += 1;
                let good = match hn_split(c, at) {
                    Err(_) => false,
                    Ok(sp) => {
                        let low = inst.block_polygons[..=k].iter().fold(Polygon::empty(), |a, b| a.concat(b));
                        let high = inst.block_polygons[k + 1..].iter().fold(Polygon::empty(), |a, b| a.concat(b));
                        let ranks: usize = inst.ranks[..=k].iter().sum();
                        sp.lower.h == ranks
                            && sp.upper.h == c.h - ranks
                            && newton_polygon(&sp.lower).unwrap() == low
                            && newton_polygon(&sp.upper).unwrap() == high
                    }
                };
                if !good {
                    bad.push(format!("config {idx} seed {seed} at {at}"));
                }
            }
        }
    }
    verdict(
        trials >= 50 && bad.is_empty(),
        format!(
            "{trials} planted instances, {splits} splits, {} mismatches{}",
            bad.len(),
            bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
        ),
    )
}

fn crit_pipeline() -> Verdict {
    let shapes: [(u64, usize, usize, usize, usize); 8] = [
        (2, 1, 1, 1, 2),
        (3, 1, 2, 1, 2),
        (2, 2, 1, 2, 2),
        (3, 1, 2, 1, 3),
        (2, 2, 2, 2, 2),
        (5, 1, 3, 1, 2),
        (2, 1, 2, 2, 3),
        (3, 2, 2, 2, 3),
    ];
    let (mut instances, mut compared, mut nonzero, mut mismatches) = (0, 0, 0, 0);
    for (k, (p, f, e, n, h)) in shapes.into_iter().enumerate() {
        let r = ring(p, f, e, n, h);
        for s in 0..15u64 {
            let mu = ordered_datum(e, f, h, s as usize);
            let (c, fil) = random_pr_crystal(&r, &mu, 500 + 37 * s + k as u64, RandomMode::Mixed).unwrap();
            let b = Bt1Crystal::from_crystal(&c, &fil).unwrap();
            instances += 1;
            for tau in 0..f {
                for i in 1..=e {
                    let expected = hasse_scalar(&c, &fil, &mu, tau, i).unwrap();
                    let got = general_hasse(&b, &mu, tau, i, PreimageChoice::Canonical).unwrap();
                    compared += 1;
                    if expected != 0 && mu.d(tau, i) > 0 {
                        nonzero += 1;
                    }
                    if got != vec![expected] {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    verdict(
        instances >= 100 && mismatches == 0,
        format!("{instances} instances, {compared} invariants compared ({nonzero} nontrivial nonzero), {mismatches} mismatches"),
    )
}

fn crit_dual_family() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [2, 3, 5] {
        let fq = Fq::new(p, &Fq::default_modulus(p, 1)).unwrap();
        let (zero, one) = (fq.zero(), fq.one());
        let (b, mu) = dual_family_ordered(p, 1, zero, zero).unwrap();
        let valid = validate_bt1(&b, &mu).ok;
        let unit = total_general_hasse(&b, &mu, PreimageChoice::Canonical).unwrap().total_unit;
        let (b11, mu11) = dual_family_ordered(p, 1, one, one).unwrap();
        let rejected = validate_bt1(&b11, &mu11);
        let (bu, muu) = dual_family_unordered(p, 1, one, one).unwrap();
        let rejected_unordered = !validate_bt1(&bu, &muu).ok;
        ok &= valid && unit && !rejected.ok && rejected_unordered;
        notes.push(format!("p={p}: rejection reason {:?}", rejected.first_failure().unwrap_or("none")));
    }
    verdict(
        ok,
        format!("undeformed member valid with unit total invariant, doubly deformed member rejected for both orderings; {}", notes.join(", ")),
    )
}

fn crit_classical() -> Verdict {
    let mut ok = true;
    for p in [2u64, 3, 5, 7] {
        let r = ring(p, 1, 1, 1, 2);
        let pi = p as i128;
        let mu = PRDatum::new(2, vec![vec![1]]).unwrap();
        for (ordinary, y) in [
            (true, Mat::diag(&r, &[r.one(0), r.from_int(pi, 0)], 0)),
            (
                false,
                Mat::from_fn(&r, 2, 2, 0, |i, j| match (i, j) {
                    (0, 1) => r.from_int(pi, 0),
                    (1, 0) => r.one(0),
                    _ => r.zero(0),
                }),
            ),
        ] {
            let c = OLCrystal::new(r.clone(), 2, vec![y.clone()]).unwrap();
            let fil = PRFiltration { levels: vec![vec![y, Mat::identity(&r, 2, 0)]] };
            let valid = validate_pr(&c, &fil, &mu).unwrap().ok;
            let nonzero = total_mu_hasse(&c, &fil, &mu).unwrap().total_nonzero;
            let newt = newton_polygon(&c).unwrap();
            let expected = if ordinary { poly(&[(0, 1), (1, 1)]) } else { poly(&[(1, 2), (1, 2)]) };
            ok &= valid && nonzero == ordinary && newt == expected && is_mu_ordinary(&c, &mu).unwrap() == ordinary;
        }
    }
    verdict(ok, "p = 2, 3, 5, 7: diag(1,p) nonzero with slopes {0, 1}; [[0,p],[1,0]] zero with slopes {1/2, 1/2}")
}

fn crit_determinism() -> Verdict {
    let cfg = SuiteConfig {
        p: 3,
        n: 2,
        mu: PRDatum::new(3, vec![vec![3, 1], vec![2, 0]]).unwrap(),
        trials: 60,
        seed: 20261015,
        precision: None,
        oracle_bound: 1 << 20,
    };
    let a = run_suite(&cfg).unwrap();
    let b = run_suite(&cfg).unwrap();
    let (ta, tb) = (a.to_table(), b.to_table());
    let (ja, jb) = (ol_crystal::io::to_pretty(&a.to_json()), ol_crystal::io::to_pretty(&b.to_json()));
    let other = run_suite(&SuiteConfig { seed: cfg.seed + 1, ..cfg.clone() }).unwrap();
    let seed_matters = ol_crystal::io::to_pretty(&other.to_json()) != ja;
    verdict(
        ta == tb && ja == jb && seed_matters,
        format!("{} table bytes and {} json bytes identical across runs; a different seed changes the report: {seed_matters}", ta.len(), ja.len()),
    )
}

type Criterion<'a> = (usize, &'static str, Box<dyn Fn() -> Verdict + 'a>);

fn main() {
    let start = Instant::now();
    let reports = grid_reports();
    let criteria: Vec<Criterion> = vec![
        (1, "Mazur inequalities", Box::new(|| crit_mazur(&reports))),
        (2, "endpoint equality", Box::new(|| crit_endpoints(&reports))),
        (3, "Newton oracle agreement", Box::new(|| crit_oracle(&reports))),
        (4, "exterior power compatibility", Box::new(|| crit_exterior(&reports))),
        (5, "contact iff nonzero Hasse invariant", Box::new(|| crit_contact(&reports))),
        (6, "total invariant iff mu-ordinary", Box::new(|| crit_total(&reports))),
        (7, "explicit mu-ordinary model golden values", Box::new(crit_x_ord)),
        (8, "Hodge-Newton splitting round trip", Box::new(crit_hn_split)),
        (9, "general and perfect pipelines agree over k", Box::new(crit_pipeline)),
        (10, "deformed dual-number family", Box::new(crit_dual_family)),
        (11, "classical ordinary/supersingular dichotomy", Box::new(crit_classical)),
        (12, "random suite determinism", Box::new(crit_determinism)),
    ];
    let mut failed = 0;
    for (k, name, check) in criteria {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("{} criterion {k:>2} ({name}): {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of 12 criteria pass ({:.1}s)", 12 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
