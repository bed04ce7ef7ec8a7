use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn olc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_olc")).args(args).output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn x_ord_file_has_three_equal_polygons() {
    let o = olc(&["polygons", "--input", &data("xord_e3_h2.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["polygons"]["newton"], v["polygons"]["hodge"]);
    assert_eq!(v["polygons"]["newton"], v["polygons"]["pr"]);
    assert_eq!(v["contact"]["newton_pr"], serde_json::json!([0, 1, 2]));
    assert_eq!(v["mu_ordinary"], true);
    assert_eq!(v["filtration"]["ok"], true);
}

#[test]
fn supersingular_file_has_newton_strictly_above_hodge() {
    let o = olc(&["polygons", &data("classical_supersingular.json")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("newton         (0,0) (1,1/2) (2,1)"), "{text}");
    assert!(text.contains("hodge          (0,0) (1,0) (2,1)"), "{text}");
    assert!(text.contains("contact newton/hodge: 0 2\n"), "{text}");
    assert!(text.contains("mu-ordinary: no"));
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = std::env::temp_dir().join("olc-cli-malformed.json");
    std::fs::write(&dir, "{\n  \"h\": 2,\n  \"Y\": [\n").unwrap();
    let o = olc(&["polygons", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("parse error") && err.contains("line 4"), "{err}");
    let o = olc(&["polygons", &data("does_not_exist.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn random_suite_is_reproducible_and_echoes_seed_and_precision() {
    let args = ["random-suite", "--p", "3", "--h", "3", "--mu", "2,1", "--trials", "40", "--seed", "11"];
    let a = olc(&args);
    let b = olc(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("olc 0.1.0 random-suite seed=11 trials=40 precision="));
    assert!(text.contains("no counterexample"));
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json", "--precision", "9"]);
    let v = json(&olc(&json_args));
    assert_eq!(v["seed"], 11);
    assert_eq!(v["precision"], 9);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["failed"] == 0));
}

#[test]
fn randomized_commands_require_a_seed() {
    let o = olc(&["random-suite", "--h", "2", "--mu", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = olc(&["generate", "--h", "2", "--mu", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generated_instances_round_trip_through_polygons() {
    let o = olc(&["generate", "--p", "5", "--h", "3", "--mu", "2,1;3,0", "--n", "2", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["generated"]["seed"], 4);
    let path = std::env::temp_dir().join("olc-cli-generated.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let o = olc(&["polygons", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["dominance"]["newton_hodge"], true);
    assert_eq!(v["dominance"]["hodge_pr"], true);
    assert_eq!(v["filtration"]["ok"], true);
}

#[test]
fn render_draws_equal_polygons_as_one_curve() {
    let o = olc(&["render", &data("xord_e3_h2.json"), "--format", "ascii"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let plot: Vec<&str> = text.lines().skip(1).take_while(|l| !l.contains("+--")).collect();
    assert!(plot.iter().any(|l| l.contains('#')));
    assert!(plot.iter().all(|l| !l.contains(['N', 'H', 'P', '*'])), "{text}");
    assert!(text.contains("N newton: (0,0) (1,1/3) (2,1)"));
}

#[test]
fn render_shows_separate_curves_for_a_non_ordinary_instance() {
    let o = olc(&["render", &data("classical_supersingular.json")]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.contains('N') && l.contains('|')), "{text}");
    let o = olc(&["render", &data("classical_supersingular.json"), "--format", "svg"]);
    assert_eq!(o.status.code(), Some(0));
    let svg = stdout(&o);
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains("version=\"1.1\""));
    assert!(svg.contains("precision=8"));
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert!(svg.contains("(1,1/2)") || svg.contains("newton: (0,0) (1,1/2) (2,1)"));
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn render_accepts_polygon_json_including_width_zero() {
    let o = olc(&["polygons", &data("classical_ordinary.json"), "--format", "json"]);
    let path = std::env::temp_dir().join("olc-cli-polys.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let o = olc(&["render", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("precision=8"));

    let empty = r#"{"polygons": {"newton": {"width": 0, "slopes": []}, "hodge": {"width": 0, "slopes": []}}}"#;
    let path = std::env::temp_dir().join("olc-cli-empty.json");
    std::fs::write(&path, empty).unwrap();
    for format in ["ascii", "svg"] {
        let o = olc(&["render", path.to_str().unwrap(), "--format", format]);
        assert_eq!(o.status.code(), Some(0));
    }
}

#[test]
fn classical_hasse_dichotomy() {
    let o = olc(&["hasse", &data("classical_ordinary.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["total_nonzero"], true);
    assert_eq!(v["polygons"]["newton"]["slopes"], serde_json::json!([["0", "1"], ["1", "1"]]));
    let v = json(&olc(&["hasse", &data("classical_supersingular.json"), "--format", "json"]));
    assert_eq!(v["total_nonzero"], false);
    assert_eq!(v["entries"][0]["scalar"], serde_json::json!([0]));
    assert_eq!(v["polygons"]["newton"]["slopes"], serde_json::json!([["1", "2"], ["1", "2"]]));
}

#[test]
fn hasse_over_an_artinian_base() {
    let o = olc(&["hasse", "--base", "artinian", &data("ordinary_dual_numbers.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("total invariant is a unit: yes"));
    let o = olc(&["hasse", "--base", "artinian", &data("supersingular_dual_numbers.json")]);
    assert!(stdout(&o).contains("total invariant is a unit: no"));
    let o = olc(&["hasse", "--base", "artinian", &data("dual_family_undeformed.json"), "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("olc 0.1.0 hasse seed=3 precision=1"));
    assert!(text.contains("total invariant is a unit: yes"));
    let o = olc(&["hasse", "--base", "artinian", &data("dual_family_doubly_deformed.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("not free"));
}

#[test]
fn dual_family_command_matches_the_fixtures() {
    let o = olc(&["dual-family", "--x", "0", "--y", "0"]);
    assert_eq!(stdout(&o), std::fs::read_to_string(data("dual_family_undeformed.json")).unwrap());
    let v = json(&olc(&["dual-family", "--x", "1", "--y", "0", "--ordering", "unordered"]));
    assert_eq!(v["validation"]["ok"], true);
    assert_eq!(v["mu"]["tau_0"], serde_json::json!([0, 1, 2]));
}

#[test]
fn x_ord_command_reports_golden_polygons() {
    let o = olc(&["xord", "--p", "3", "--h", "2", "--mu", "0,1,2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let slopes = serde_json::json!([["1", "3"], ["2", "3"]]);
    for name in ["newton", "hodge", "pr"] {
        assert_eq!(v["polygons"][name]["slopes"], slopes);
    }
    assert_eq!(v["filtration_valid"], true);
    let v = json(&olc(&["xord", "--p", "3", "--h", "2", "--mu", "2,1,0", "--format", "json"]));
    assert_eq!(v["total_hasse_nonzero"], true);
}

#[test]
fn hn_split_and_block_decomposition() {
    let o = olc(&["hn-split", &data("xord_e3_h2.json"), "--at", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["lower"]["rank"], 1);
    assert_eq!(v["lower"]["newton"]["slopes"], serde_json::json!([["1", "3"]]));
    assert_eq!(v["upper"]["newton"]["slopes"], serde_json::json!([["2", "3"]]));
    let o = olc(&["hn-split", &data("classical_supersingular.json"), "--at", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let v = json(&olc(&["mu-decompose", &data("xord_f2_e2_h3.json"), "--format", "json"]));
    let blocks = v["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 3);
    assert_eq!(blocks[2]["slope"], "1/4");
    let o = olc(&["mu-decompose", &data("classical_supersingular.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precision_exhaustion_has_its_own_exit_code() {
    let o = olc(&["polygons", &data("underdetermined_entry.json")]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8(o.stderr).unwrap().contains("precision exhausted"));
}

#[test]
fn unsupported_formats_are_rejected() {
    let o = olc(&["polygons", &data("classical_ordinary.json"), "--format", "svg"]);
    assert_eq!(o.status.code(), Some(2));
    let o = olc(&["render", &data("classical_ordinary.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
}
