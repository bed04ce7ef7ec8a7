//! The subcommands, as functions from parsed arguments to output text and exit code.

use std::sync::Arc;

use serde_json::{json, Value};

use ol_crystal::arith::{BaseFieldDatum, LocalFieldDatum, Ring};
use ol_crystal::arith::Fq;
use ol_crystal::bt1::{
    dual_family_ordered, dual_family_unordered, format_fq, total_general_hasse, validate_bt1, PreimageChoice,
};
use ol_crystal::crystal::{
    default_precision, hodge_polygon, hodge_polygon_tau, newton_polygon, pr_polygon, random_pr_crystal,
    validate_pr, with_precision_retries, OLCrystal, PRDatum, RandomMode,
};
use ol_crystal::hasse::{is_mu_ordinary, rapoport_test, total_mu_hasse};
use ol_crystal::io::{self, crystal_to_json, parse_crystal_str, polygon_to_json, to_pretty, CrystalFile};
use ol_crystal::mu_ordinary::{build_x_ord, hn_split, mu_ordinary_decomposition};
use ol_crystal::polygon::Polygon;
use ol_crystal::suite::{format_datum, run_suite, SuiteConfig};
use ol_crystal::Error;

use crate::render::{self, vertex_labels, Curve};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Svg,
    Ascii,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Base {
    Perfect,
    Artinian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Generic,
    Structured,
    Mixed,
}

/// Text for standard output and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

/// A failure reported on standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match e {
            Error::PrecisionExhausted(_) => EXIT_PRECISION,
            _ => EXIT_INVALID,
        };
        CliError { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_INVALID, message: message.into() }
}

pub type CliResult = std::result::Result<Output, CliError>;

fn ok(text: String) -> CliResult {
    Ok(Output { text, code: EXIT_OK })
}

fn header(command: &str, seed: Option<u64>, precision: u32) -> String {
    let seed = seed.map_or("none".to_string(), |s| s.to_string());
    format!("olc {} {command} seed={seed} precision={precision}\n", env!("CARGO_PKG_VERSION"))
}

fn json_header(command: &str, seed: Option<u64>, precision: u32) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "precision": precision,
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Some(a), Value::Object(b)) = (a.as_object_mut(), b) {
        a.extend(b);
    }
    a
}

fn require_table_or_json(format: Format) -> std::result::Result<(), CliError> {
    match format {
        Format::Table | Format::Json => Ok(()),
        other => Err(invalid(format!("format {other:?} is only available for render"))),
    }
}

/// Parses `d_{0,1},...,d_{0,e};d_{1,1},...` into a datum of rank `h`.
pub fn parse_mu(s: &str, h: usize) -> std::result::Result<PRDatum, CliError> {
    let levels = s
        .split(';')
        .map(|part| {
            part.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| invalid(format!("bad datum entry {x:?} in {s:?}"))))
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(PRDatum::new(h, levels)?)
}

fn ring_for(p: u64, n: Option<usize>, mu: &PRDatum, precision: Option<u32>) -> std::result::Result<Arc<Ring>, CliError> {
    let n = n.unwrap_or(mu.f());
    let digits = precision.unwrap_or_else(|| default_precision(p, n, mu.h(), mu.r()));
    Ok(Ring::new(&LocalFieldDatum::new(p, mu.f(), mu.r()), &BaseFieldDatum::new(p, n, digits))?)
}

fn read_crystal(text: &str, precision: Option<u32>) -> std::result::Result<CrystalFile, CliError> {
    Ok(parse_crystal_str(text, precision)?)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn abscissas(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn poly_row(name: &str, p: &Polygon) -> String {
    format!("{name:<14} {}   slopes {p}\n", vertex_labels(p))
}

struct Polygons {
    newton: Polygon,
    hodge: Polygon,
    hodge_tau: Vec<Polygon>,
    pr: Option<Polygon>,
}

fn compute_polygons(c: &OLCrystal, mu: Option<&PRDatum>) -> ol_crystal::Result<Polygons> {
    with_precision_retries(c, |c| {
        Ok(Polygons {
            newton: newton_polygon(c)?,
            hodge: hodge_polygon(c)?,
            hodge_tau: (0..c.f()).map(|t| hodge_polygon_tau(c, t)).collect::<ol_crystal::Result<_>>()?,
            pr: mu.map(pr_polygon),
        })
    })
}

/// Newton, Hodge (per embedding and mean) and PR polygons with contacts and dominance.
pub fn polygons(input: &str, precision: Option<u32>, format: Format) -> CliResult {
    require_table_or_json(format)?;
    let file = read_crystal(input, precision)?;
    let c = &file.crystal;
    let digits = c.ring.digits();
    let polys = compute_polygons(c, file.mu.as_ref())?;
    let newton_above_hodge = polys.newton.dominates(&polys.hodge)?;
    let mut code = if newton_above_hodge { EXIT_OK } else { EXIT_COUNTEREXAMPLE };
    let filtration = match (&file.fil, &file.mu) {
        (Some(fil), Some(mu)) => Some(validate_pr(c, fil, mu)?),
        _ => None,
    };
    let pr_facts = match &polys.pr {
        None => None,
        Some(pr) => {
            let hodge_above_pr = polys.hodge.dominates(pr)?;
            if !hodge_above_pr && filtration.as_ref().is_some_and(|r| r.ok) {
                code = EXIT_COUNTEREXAMPLE;
            }
            Some((
                hodge_above_pr,
                polys.newton.contact_abscissas(pr)?,
                polys.hodge.contact_abscissas(pr)?,
                polys.newton == *pr,
                polys.hodge == *pr,
            ))
        }
    };
    let newton_hodge_contact = polys.newton.contact_abscissas(&polys.hodge)?;
    let text = match format {
        Format::Json => {
            let mut v = merge(
                json_header("polygons", None, digits),
                json!({
                    "polygons": {
                        "newton": polygon_to_json(&polys.newton),
                        "hodge": polygon_to_json(&polys.hodge),
                        "hodge_tau": polys.hodge_tau.iter().map(polygon_to_json).collect::<Vec<_>>(),
                    },
                    "contact": { "newton_hodge": newton_hodge_contact },
                    "dominance": { "newton_hodge": newton_above_hodge },
                }),
            );
            if let (Some(pr), Some((hp, np_c, hp_c, mu_ord, rap))) = (&polys.pr, &pr_facts) {
                v["polygons"]["pr"] = polygon_to_json(pr);
                v["contact"]["newton_pr"] = json!(np_c);
                v["contact"]["hodge_pr"] = json!(hp_c);
                v["dominance"]["hodge_pr"] = json!(hp);
                v["mu_ordinary"] = json!(mu_ord);
                v["rapoport"] = json!(rap);
            }
            if let Some(r) = &filtration {
                v["filtration"] = json!({"ok": r.ok, "failures": r.failures});
            }
            to_pretty(&v)
        }
        _ => {
            let mut s = header("polygons", None, digits);
            s.push_str(&poly_row("newton", &polys.newton));
            s.push_str(&poly_row("hodge", &polys.hodge));
            for (t, p) in polys.hodge_tau.iter().enumerate() {
                s.push_str(&poly_row(&format!("hodge[tau={t}]"), p));
            }
            if let Some(pr) = &polys.pr {
                s.push_str(&poly_row("pr", pr));
            }
            s.push_str(&format!("contact newton/hodge: {}\n", abscissas(&newton_hodge_contact)));
            if let Some((_, np_c, hp_c, _, _)) = &pr_facts {
                s.push_str(&format!("contact newton/pr: {}\n", abscissas(np_c)));
                s.push_str(&format!("contact hodge/pr: {}\n", abscissas(hp_c)));
            }
            s.push_str(&format!("newton above hodge: {}\n", yes(newton_above_hodge)));
            if let Some((hp, _, _, mu_ord, rap)) = &pr_facts {
                s.push_str(&format!("hodge above pr: {}\n", yes(*hp)));
                s.push_str(&format!("mu-ordinary: {}\n", yes(*mu_ord)));
                s.push_str(&format!("generalized rapoport: {}\n", yes(*rap)));
            }
            if let Some(r) = &filtration {
                match r.first_failure() {
                    None => s.push_str("pr filtration: valid\n"),
                    Some(m) => s.push_str(&format!("pr filtration: invalid ({m})\n")),
                }
            }
            s
        }
    };
    Ok(Output { text, code })
}

/// Draws the polygons of a crystal file, or of the JSON output of `polygons`.
pub fn render(input: &str, precision: Option<u32>, format: Format) -> CliResult {
    let v: Value = serde_json::from_str(input)
        .map_err(|e| invalid(format!("parse error: {e}")))?;
    let (curves, digits) = if let Some(p) = v.get("polygons") {
        let mut curves = vec![
            Curve::new("newton", 'N', io::parse_polygon(&p["newton"])?),
            Curve::new("hodge", 'H', io::parse_polygon(&p["hodge"])?),
        ];
        if let Some(pr) = p.get("pr") {
            curves.push(Curve::new("pr", 'P', io::parse_polygon(pr)?));
        }
        let digits = v.get("precision").and_then(Value::as_u64).unwrap_or(0) as u32;
        (curves, digits)
    } else {
        let file = ol_crystal::io::parse_crystal(&v, precision)?;
        let polys = compute_polygons(&file.crystal, file.mu.as_ref())?;
        let mut curves = vec![Curve::new("newton", 'N', polys.newton), Curve::new("hodge", 'H', polys.hodge)];
        if let Some(pr) = polys.pr {
            curves.push(Curve::new("pr", 'P', pr));
        }
        (curves, file.crystal.ring.digits())
    };
    let text = match format {
        Format::Svg => {
            let body = render::svg(&curves);
            let (decl, rest) = body.split_once('\n').expect("declaration line");
            format!(
                "{decl}\n<!-- olc {} render seed=none precision={digits} -->\n{rest}",
                env!("CARGO_PKG_VERSION")
            )
        }
        Format::Ascii | Format::Table => format!("{}{}", header("render", None, digits), render::ascii(&curves)),
        Format::Json => {
            return Err(invalid("render produces ascii or svg; use polygons for json"));
        }
    };
    ok(text)
}

/// The mu-ordinary Hasse invariants over the perfect field, or over an artinian base.
pub fn hasse(input: &str, precision: Option<u32>, base: Base, seed: Option<u64>, format: Format) -> CliResult {
    require_table_or_json(format)?;
    match base {
        Base::Perfect => hasse_perfect(input, precision, format),
        Base::Artinian => hasse_artinian(input, seed, format),
    }
}

fn hasse_perfect(input: &str, precision: Option<u32>, format: Format) -> CliResult {
    let file = read_crystal(input, precision)?;
    let c = &file.crystal;
    let fil = file.fil.as_ref().ok_or_else(|| invalid("hasse needs a filtration (\"fil\")"))?;
    let mu = file.mu.as_ref().ok_or_else(|| invalid("hasse needs a datum (\"mu\")"))?;
    let validation = validate_pr(c, fil, mu)?;
    if let Some(m) = validation.first_failure() {
        return Err(invalid(format!("PR filtration is invalid: {m}")));
    }
    let report = total_mu_hasse(c, fil, mu)?;
    let polys = compute_polygons(c, Some(mu))?;
    let pr = polys.pr.clone().expect("datum given");
    let fq = c.ring.residue_field();
    let digits = c.ring.digits();
    let mu_ord = is_mu_ordinary(c, mu)?;
    let code = if report.total_nonzero == mu_ord { EXIT_OK } else { EXIT_COUNTEREXAMPLE };
    let text = match format {
        Format::Json => to_pretty(&merge(
            json_header("hasse", None, digits),
            json!({
                "base": "perfect",
                "entries": report.entries.iter().map(|e| json!({
                    "tau": e.tau, "i": e.i, "d": e.d, "exponent": e.exponent,
                    "scalar": fq.digits(e.scalar), "nonzero": e.nonzero,
                })).collect::<Vec<_>>(),
                "total_nonzero": report.total_nonzero,
                "mu_ordinary": mu_ord,
                "polygons": {
                    "newton": polygon_to_json(&polys.newton),
                    "hodge": polygon_to_json(&polys.hodge),
                    "pr": polygon_to_json(&pr),
                },
            }),
        )),
        _ => {
            let mut s = header("hasse", None, digits);
            s.push_str(&format!("{:>4} {:>3} {:>3} {:>9}  {:<12} {}\n", "tau", "i", "d", "exponent", "scalar", "nonzero"));
            for e in &report.entries {
                s.push_str(&format!(
                    "{:>4} {:>3} {:>3} {:>9}  {:<12} {}\n",
                    e.tau,
                    e.i,
                    e.d,
                    e.exponent,
                    format_fq(fq, e.scalar),
                    yes(e.nonzero)
                ));
            }
            s.push_str(&format!("total invariant nonzero: {}\n", yes(report.total_nonzero)));
            s.push_str(&format!("mu-ordinary: {}\n", yes(mu_ord)));
            s.push_str(&poly_row("newton", &polys.newton));
            s.push_str(&poly_row("hodge", &polys.hodge));
            s.push_str(&poly_row("pr", &pr));
            s
        }
    };
    Ok(Output { text, code })
}

fn hasse_artinian(input: &str, seed: Option<u64>, format: Format) -> CliResult {
    let v: Value = serde_json::from_str(input)
        .map_err(|e| invalid(format!("parse error: {e}")))?;
    let (b, mu) = io::parse_bt1(&v)?;
    let mu = mu.ok_or_else(|| invalid("hasse needs a datum (\"mu\")"))?;
    let validation = validate_bt1(&b, &mu);
    if let Some(m) = validation.first_failure() {
        return Err(invalid(format!("truncated PR data are invalid: {m}")));
    }
    let choice = seed.map_or(PreimageChoice::Canonical, PreimageChoice::Random);
    let report = total_general_hasse(&b, &mu, choice)?;
    let alg = &b.algebra;
    let text = match format {
        Format::Json => to_pretty(&merge(
            json_header("hasse", seed, 1),
            json!({
                "base": "artinian",
                "ring": io::algebra_to_json(alg),
                "entries": report.entries.iter().map(|e| json!({
                    "tau": e.tau, "i": e.i, "d": e.d, "value": alg.format(&e.value),
                    "nonzero": e.nonzero, "unit": e.unit,
                })).collect::<Vec<_>>(),
                "total": alg.format(&report.total),
                "total_nonzero": report.total_nonzero,
                "total_unit": report.total_unit,
            }),
        )),
        _ => {
            let mut s = header("hasse", seed, 1);
            let q = alg.fq().characteristic().pow(alg.fq().degree() as u32);
            s.push_str(&format!("base ring of dimension {} over F_{q}\n", alg.dim()));
            s.push_str(&format!("{:>4} {:>3} {:>3}  {:<24} {:<8} {}\n", "tau", "i", "d", "value", "nonzero", "unit"));
            for e in &report.entries {
                s.push_str(&format!(
                    "{:>4} {:>3} {:>3}  {:<24} {:<8} {}\n",
                    e.tau,
                    e.i,
                    e.d,
                    alg.format(&e.value),
                    yes(e.nonzero),
                    yes(e.unit)
                ));
            }
            s.push_str(&format!("total invariant: {}\n", alg.format(&report.total)));
            s.push_str(&format!("total invariant is a unit: {}\n", yes(report.total_unit)));
            s
        }
    };
    ok(text)
}

/// Builds the explicit mu-ordinary crystal for a datum and reports its polygons.
pub fn xord(p: u64, n: Option<usize>, mu: &PRDatum, precision: Option<u32>, format: Format) -> CliResult {
    require_table_or_json(format)?;
    let ring = ring_for(p, n, mu, precision)?;
    let (c, fil) = build_x_ord(&ring, mu)?;
    let polys = compute_polygons(&c, Some(mu))?;
    let pr = polys.pr.clone().expect("datum given");
    let validation = validate_pr(&c, &fil, mu)?;
    let hasse = if mu.is_ordered() { Some(total_mu_hasse(&c, &fil, mu)?.total_nonzero) } else { None };
    let digits = ring.digits();
    let text = match format {
        Format::Json => to_pretty(&merge(
            json_header("xord", None, digits),
            json!({
                "mu": io::datum_to_json(mu),
                "polygons": {
                    "newton": polygon_to_json(&polys.newton),
                    "hodge": polygon_to_json(&polys.hodge),
                    "pr": polygon_to_json(&pr),
                },
                "filtration_valid": validation.ok,
                "total_hasse_nonzero": hasse,
                "instance": crystal_to_json(&c, Some(&fil), Some(mu)),
            }),
        )),
        _ => {
            let mut s = header("xord", None, digits);
            s.push_str(&format!("mu = {}  h = {}  p = {p}\n", format_datum(mu), mu.h()));
            s.push_str(&poly_row("newton", &polys.newton));
            s.push_str(&poly_row("hodge", &polys.hodge));
            s.push_str(&poly_row("pr", &pr));
            s.push_str(&format!("pr filtration: {}\n", if validation.ok { "valid" } else { "invalid" }));
            s.push_str(&format!("rapoport: {}\n", yes(rapoport_test(&c, mu)?)));
            match hasse {
                Some(h) => s.push_str(&format!("total invariant nonzero: {}\n", yes(h))),
                None => s.push_str("total invariant: not defined for an unordered datum\n"),
            }
            s
        }
    };
    ok(text)
}

/// Hodge-Newton splitting at a break abscissa.
pub fn hn_split_cmd(input: &str, at: usize, precision: Option<u32>, format: Format) -> CliResult {
    require_table_or_json(format)?;
    let file = read_crystal(input, precision)?;
    let c = &file.crystal;
    let split = hn_split(c, at)?;
    let lower = newton_polygon(&split.lower)?;
    let upper = newton_polygon(&split.upper)?;
    let digits = c.ring.digits();
    let text = match format {
        Format::Json => to_pretty(&merge(
            json_header("hn-split", None, digits),
            json!({
                "at": at,
                "lower": {"rank": split.lower.h, "newton": polygon_to_json(&lower), "crystal": crystal_to_json(&split.lower, None, None)},
                "upper": {"rank": split.upper.h, "newton": polygon_to_json(&upper), "crystal": crystal_to_json(&split.upper, None, None)},
            }),
        )),
        _ => {
            let mut s = header("hn-split", None, digits);
            s.push_str(&format!("split at {at}\n"));
            s.push_str(&format!("lower factor: rank {}  newton slopes {lower}\n", split.lower.h));
            s.push_str(&format!("upper factor: rank {}  newton slopes {upper}\n", split.upper.h));
            s
        }
    };
    ok(text)
}

/// Block decomposition of a mu-ordinary crystal.
pub fn mu_decompose(input: &str, precision: Option<u32>, format: Format) -> CliResult {
    require_table_or_json(format)?;
    let file = read_crystal(input, precision)?;
    let c = &file.crystal;
    let fil = file.fil.as_ref().ok_or_else(|| invalid("mu-decompose needs a filtration (\"fil\")"))?;
    let mu = file.mu.as_ref().ok_or_else(|| invalid("mu-decompose needs a datum (\"mu\")"))?;
    let blocks = mu_ordinary_decomposition(c, fil, mu)?;
    let digits = c.ring.digits();
    let text = match format {
        Format::Json => to_pretty(&merge(
            json_header("mu-decompose", None, digits),
            json!({
                "blocks": blocks.iter().map(|b| json!({
                    "multiplicity": b.multiplicity, "beta": b.slope_datum.beta,
                    "slope": block_slope(&b.slope_datum.beta, c.e()).to_string(),
                })).collect::<Vec<_>>(),
                "certified": true,
            }),
        )),
        _ => {
            let mut s = header("mu-decompose", None, digits);
            s.push_str(&format!("{:>5} {:>12} {:>8}  {}\n", "block", "multiplicity", "slope", "exponents per embedding"));
            for (j, b) in blocks.iter().enumerate() {
                let beta = b.slope_datum.beta.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                let slope = block_slope(&b.slope_datum.beta, c.e());
                s.push_str(&format!("{:>5} {:>12} {:>8}  {beta}\n", j + 1, b.multiplicity, slope.to_string()));
            }
            s.push_str("every block is certified etale after untwisting\n");
            s
        }
    };
    ok(text)
}

fn block_slope(beta: &[usize], e: usize) -> num_rational::BigRational {
    let total: usize = beta.iter().sum();
    num_rational::BigRational::new((total as i64).into(), ((beta.len() * e) as i64).into())
}

/// A random crystal with a PR filtration, as a crystal file.
pub fn generate(
    p: u64,
    n: Option<usize>,
    mu: &PRDatum,
    seed: u64,
    mode: Mode,
    precision: Option<u32>,
) -> CliResult {
    let ring = ring_for(p, n, mu, precision)?;
    let mode = match mode {
        Mode::Generic => RandomMode::Generic,
        Mode::Structured => RandomMode::Structured,
        Mode::Mixed => RandomMode::Mixed,
    };
    let (c, fil) = random_pr_crystal(&ring, mu, seed, mode)?;
    let mut v = crystal_to_json(&c, Some(&fil), Some(mu));
    v["generated"] = json_header("generate", Some(seed), ring.digits());
    ok(to_pretty(&v))
}

/// Runs the randomized property suite.
#[allow(clippy::too_many_arguments)]
pub fn random_suite(
    p: u64,
    n: Option<usize>,
    mu: &PRDatum,
    trials: usize,
    seed: u64,
    precision: Option<u32>,
    oracle_bound: u64,
    format: Format,
) -> CliResult {
    require_table_or_json(format)?;
    let cfg = SuiteConfig {
        p,
        n: n.unwrap_or(mu.f()),
        mu: mu.clone(),
        trials,
        seed,
        precision,
        oracle_bound,
    };
    let report = run_suite(&cfg)?;
    let text = match format {
        Format::Json => to_pretty(&report.to_json()),
        _ => report.to_table(),
    };
    Ok(Output { text, code: report.exit_code() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Ordering {
    Ordered,
    Unordered,
}

/// Truncated data of the deformed mu-ordinary family over the dual numbers, with its
/// validation verdict.
pub fn dual_family(p: u64, n: usize, x: i64, y: i64, ordering: Ordering) -> CliResult {
    let fq = Fq::new(p, &Fq::default_modulus(p, n))?;
    let (x, y) = (fq.from_int(x), fq.from_int(y));
    let (b, mu) = match ordering {
        Ordering::Ordered => dual_family_ordered(p, n, x, y)?,
        Ordering::Unordered => dual_family_unordered(p, n, x, y)?,
    };
    let report = validate_bt1(&b, &mu);
    let mut v = io::bt1_to_json(&b, Some(&mu));
    v["generated"] = json_header("dual-family", None, 1);
    v["validation"] = json!({"ok": report.ok, "failures": report.failures});
    ok(to_pretty(&v))
}
