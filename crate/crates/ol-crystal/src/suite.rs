//! Seeded randomized property suite over generated crystals with a PR filtration.
//!
//! Trials run in parallel with per-trial seeds derived from `(seed, trial index)`;
//! results are aggregated in trial order, so reports are reproducible byte for byte.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::{BaseFieldDatum, LocalFieldDatum, Ring};
use crate::crystal::{
    default_precision, exterior_datum, exterior_power, hodge_polygon, hodge_polygon_tau, newton_oracle,
    newton_polygon, newton_polygon_at, pr_polygon, random_pr_crystal, validate_pr, OLCrystal, PRDatum,
    PRFiltration, RandomMode,
};
use crate::error::{Error, Result};
use crate::hasse::{contact_test, hasse_scalar, is_mu_ordinary, total_mu_hasse};
use crate::io::{crystal_to_json, to_pretty};

/// Names of the checks, in report order.
pub const CHECKS: [&str; 9] = [
    "pr-validation",
    "newton-above-hodge",
    "hodge-above-pr",
    "endpoints",
    "newton-tau-independence",
    "oracle-agreement",
    "exterior-compatibility",
    "contact-iff-nonzero-hasse",
    "total-hasse-iff-mu-ordinary",
];

/// Parameters of a suite run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub p: u64,
    pub n: usize,
    pub mu: PRDatum,
    pub trials: usize,
    pub seed: u64,
    pub precision: Option<u32>,
    /// Iteration bound for the Newton oracle; 0 disables the oracle check.
    pub oracle_bound: u64,
}

/// Pass, fail and skip counts of one check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// The first failing trial, with the full instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub trial: usize,
    pub check: String,
    pub instance: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub precision: u32,
    pub tallies: Vec<(String, Tally)>,
    pub coverage: Coverage,
    pub counterexample: Option<Counterexample>,
    /// Trials that raised an error, with the message.
    pub errors: Vec<(usize, String)>,
    pub precision_exhausted: bool,
}

impl SuiteReport {
    /// 0 on success, 3 when a counterexample was found, 4 when precision ran out,
    /// 2 for any other error.
    pub fn exit_code(&self) -> i32 {
        if self.counterexample.is_some() {
            3
        } else if self.precision_exhausted {
            4
        } else if !self.errors.is_empty() {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": "random-suite",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.config.seed,
            "trials": self.config.trials,
            "precision": self.precision,
            "p": self.config.p,
            "n": self.config.n,
            "mu": crate::io::datum_to_json(&self.config.mu),
            "checks": self.tallies.iter().map(|(name, t)| json!({
                "name": name, "passed": t.passed, "failed": t.failed, "skipped": t.skipped,
            })).collect::<Vec<_>>(),
            "coverage": {
                "hasse_nonzero": self.coverage.hasse_nonzero,
                "hasse_zero": self.coverage.hasse_zero,
                "mu_ordinary": self.coverage.mu_ordinary,
                "not_mu_ordinary": self.coverage.not_mu_ordinary,
            },
            "errors": self.errors.iter().map(|(t, m)| json!({"trial": t, "message": m})).collect::<Vec<_>>(),
            "counterexample": self.counterexample.as_ref().map(|c| json!({
                "trial": c.trial, "check": c.check, "instance": c.instance,
            })),
        })
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "olc {} random-suite seed={} trials={} precision={} p={} n={} mu={}\n",
            env!("CARGO_PKG_VERSION"),
            self.config.seed,
            self.config.trials,
            self.precision,
            self.config.p,
            self.config.n,
            format_datum(&self.config.mu)
        ));
        s.push_str(&format!("{:<30} {:>7} {:>7} {:>7}\n", "check", "passed", "failed", "skipped"));
        for (name, t) in &self.tallies {
            s.push_str(&format!("{:<30} {:>7} {:>7} {:>7}\n", name, t.passed, t.failed, t.skipped));
        }
        let cov = &self.coverage;
        s.push_str(&format!(
            "hasse entries with 0 < d < h: {} nonzero, {} zero; instances: {} mu-ordinary, {} not\n",
            cov.hasse_nonzero, cov.hasse_zero, cov.mu_ordinary, cov.not_mu_ordinary
        ));
        for (t, m) in &self.errors {
            s.push_str(&format!("error in trial {t}: {m}\n"));
        }
        match &self.counterexample {
            None => s.push_str("no counterexample\n"),
            Some(c) => {
                s.push_str(&format!("counterexample: trial {} fails {}\n", c.trial, c.check));
                s.push_str(&to_pretty(&c.instance));
            }
        }
        s
    }
}

/// `d_{0,1},...;d_{1,1},...` as in the command line syntax.
pub fn format_datum(mu: &PRDatum) -> String {
    mu.levels()
        .iter()
        .map(|l| l.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `t` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    splitmix(seed ^ splitmix(t as u64))
}

/// Check verdicts of one trial, `None` for a skipped check, with coverage counts.
#[derive(Default)]
struct Outcome {
    verdicts: Vec<(usize, Option<bool>)>,
    coverage: Coverage,
}

/// How often each side of the tested equivalences occurred.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Coverage {
    /// Hasse entries with `0 < d < h` that are nonzero.
    pub hasse_nonzero: usize,
    /// Hasse entries with `0 < d < h` that vanish.
    pub hasse_zero: usize,
    pub mu_ordinary: usize,
    pub not_mu_ordinary: usize,
}

impl Coverage {
    fn add(&mut self, other: &Coverage) {
        self.hasse_nonzero += other.hasse_nonzero;
        self.hasse_zero += other.hasse_zero;
        self.mu_ordinary += other.mu_ordinary;
        self.not_mu_ordinary += other.not_mu_ordinary;
    }
}

fn record(out: &mut Outcome, check: usize, ok: Option<bool>) {
    out.verdicts.push((check, ok));
}

fn run_checks(c: &OLCrystal, fil: &PRFiltration, mu: &PRDatum, oracle_bound: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let h = c.h;
    record(&mut out, 0, Some(validate_pr(c, fil, mu)?.ok));
    let newt = newton_polygon(c)?;
    let hdg = hodge_polygon(c)?;
    let pr = pr_polygon(mu);
    record(&mut out, 1, Some(newt.dominates(&hdg)?));
    record(&mut out, 2, Some(hdg.dominates(&pr)?));
    record(&mut out, 3, Some(newt.eval(h)? == hdg.eval(h)? && hdg.eval(h)? == pr.eval(h)?));
    let mut same = true;
    for tau in 1..c.f() {
        same &= newton_polygon_at(c, tau)? == newt;
    }
    record(&mut out, 4, Some(same));
    if oracle_bound == 0 {
        record(&mut out, 5, None);
    } else {
        match newton_oracle(c, oracle_bound) {
            Ok(o) => record(&mut out, 5, Some(o == newt)),
            Err(Error::NoConvergence(_)) => record(&mut out, 5, None),
            Err(e) => return Err(e),
        }
    }
    let mut ext_ok = true;
    for s in 1..=h {
        let (ec, efil) = exterior_power(c, fil, s)?;
        let emu = exterior_datum(mu, s)?;
        ext_ok &= validate_pr(&ec, &efil, &emu)?.ok;
        ext_ok &= newton_polygon(&ec)?.eval(1)? == newt.eval(s)?;
        for tau in 0..c.f() {
            ext_ok &= hodge_polygon_tau(&ec, tau)?.eval(1)? == hodge_polygon_tau(c, tau)?.eval(s)?;
        }
        ext_ok &= pr_polygon(&emu).eval(1)? == pr.eval(s)?;
    }
    record(&mut out, 6, Some(ext_ok));
    if mu.is_ordered() {
        let fq = c.ring.residue_field();
        let mut agree = true;
        let mut any = false;
        for tau in 0..c.f() {
            for i in 1..=mu.r() {
                let d = mu.d(tau, i);
                if d == 0 || d >= h {
                    continue;
                }
                any = true;
                let nonzero = !fq.is_zero(hasse_scalar(c, fil, mu, tau, i)?);
                if nonzero {
                    out.coverage.hasse_nonzero += 1;
                } else {
                    out.coverage.hasse_zero += 1;
                }
                agree &= nonzero == contact_test(c, mu, tau, i)?;
            }
        }
        record(&mut out, 7, if any { Some(agree) } else { None });
        let total = total_mu_hasse(c, fil, mu)?.total_nonzero;
        let ordinary = is_mu_ordinary(c, mu)?;
        if ordinary {
            out.coverage.mu_ordinary += 1;
        } else {
            out.coverage.not_mu_ordinary += 1;
        }
        record(&mut out, 8, Some(total == ordinary));
    } else {
        record(&mut out, 7, None);
        record(&mut out, 8, None);
    }
    Ok(out)
}

/// The ring used by a suite run.
pub fn suite_ring(cfg: &SuiteConfig) -> Result<std::sync::Arc<Ring>> {
    let (f, e, h) = (cfg.mu.f(), cfg.mu.r(), cfg.mu.h());
    let precision = cfg.precision.unwrap_or_else(|| default_precision(cfg.p, cfg.n, h, e));
    Ring::new(&LocalFieldDatum::new(cfg.p, f, e), &BaseFieldDatum::new(cfg.p, cfg.n, precision))
}

/// Runs the suite.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let ring = suite_ring(cfg)?;
    let results: Vec<(usize, Result<Outcome>, Option<Value>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(cfg.seed, t);
            match random_pr_crystal(&ring, &cfg.mu, seed, RandomMode::Mixed) {
                Err(e) => (t, Err(e), None),
                Ok((c, fil)) => {
                    let res = run_checks(&c, &fil, &cfg.mu, cfg.oracle_bound);
                    let failed = matches!(&res, Ok(o) if o.verdicts.iter().any(|(_, ok)| *ok == Some(false)));
                    let inst = failed.then(|| crystal_to_json(&c, Some(&fil), Some(&cfg.mu)));
                    (t, res, inst)
                }
            }
        })
        .collect();
    let mut tallies: Vec<(String, Tally)> = CHECKS.iter().map(|n| (n.to_string(), Tally::default())).collect();
    let mut counterexample = None;
    let mut errors = Vec::new();
    let mut precision_exhausted = false;
    let mut coverage = Coverage::default();
    for (t, res, inst) in results {
        match res {
            Err(e) => {
                precision_exhausted |= matches!(e, Error::PrecisionExhausted(_));
                errors.push((t, e.to_string()));
            }
            Ok(outcome) => {
                coverage.add(&outcome.coverage);
                for (check, ok) in outcome.verdicts {
                    let tally = &mut tallies[check].1;
                    match ok {
                        Some(true) => tally.passed += 1,
                        Some(false) => {
                            tally.failed += 1;
                            if counterexample.is_none() {
                                counterexample = Some(Counterexample {
                                    trial: t,
                                    check: CHECKS[check].to_string(),
                                    instance: inst.clone().expect("recorded for failing trials"),
                                });
                            }
                        }
                        None => tally.skipped += 1,
                    }
                }
            }
        }
    }
    Ok(SuiteReport {
        config: cfg.clone(),
        precision: ring.digits(),
        tallies,
        coverage,
        counterexample,
        errors,
        precision_exhausted,
    })
}
