use serde_json::Value;
use std::f64::consts::PI;
use std::process::{Command, Output};

fn body(name: &str) -> String {
    format!("{}/../../bodies/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affsurf"))
        .args(args)
        .env("AFFSURF_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout}"));
    (value, out.status.code().unwrap())
}

fn number(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap(),
        Value::String(s) if s == "inf" => f64::INFINITY,
        other => panic!("not a number: {other}"),
    }
}

#[test]
fn asp_of_disk_prints_six_digits() {
    let out = run(&["asp", "--body", &body("disk.json"), "--p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["value", "6.28319"]), "{text}");
}

#[test]
fn asp_of_ellipse_matches_closed_form() {
    let (v, code) = json(&["asp", "--body", &body("ellipse21.json"), "--p", "1"]);
    assert_eq!(code, 0);
    assert!((number(&v["value"]) - 2f64.cbrt() * 2.0 * PI).abs() < 1e-9);
    assert_eq!(v["body_id"], "ellipse21");
}

#[test]
fn floating_limit_of_square_vanishes() {
    let (v, code) = json(&["asp", "--body", &body("square.json"), "--p", "1", "--method", "floating"]);
    assert_eq!(code, 0);
    assert!(number(&v["value"]).abs() < 0.01);
}

#[test]
fn csv_has_header_and_row() {
    let out = run(&["asp", "--body", &body("disk.json"), "--p", "0", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "body,p,value,method,error_estimate");
    assert_eq!(lines[1], "disk,0,6.28319,closed_form,0");
}

#[test]
fn exit_codes_distinguish_failures() {
    assert_eq!(run(&["asp", "--body", &body("square.json"), "--p", "-2"]).status.code(), Some(3));
    assert_eq!(run(&["asp", "--body", "missing.json", "--p", "1"]).status.code(), Some(2));
    assert_eq!(run(&["asp", "--body", &body("square.json"), "--p", "x"]).status.code(), Some(2));
    assert_eq!(run(&["extremal", "--body", &body("square.json"), "--kind", "XS", "--p", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["extremal", "--body", &body("square.json"), "--kind", "IS", "--p", "1", "--probe"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["verify", "equivariance", "--trials", "3", "--tol", "0"]).status.code(), Some(1));
}

#[test]
fn malformed_body_is_an_input_error() {
    let path = std::env::temp_dir().join("affsurf_cli_malformed.json");
    std::fs::write(&path, "{\"type\": \"ball\", \"center\": [0, 0]}").unwrap();
    let out = run(&["asp", "--body", path.to_str().unwrap(), "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
}

#[test]
fn extremal_sandwiches_on_the_square() {
    let (v, code) = json(&["extremal", "--kind", "IS", "--p", "1", "--body", &body("square.json")]);
    assert_eq!(code, 0);
    let value = number(&v["value"]);
    let upper = 2.0 * PI.powf(2.0 / 3.0) * 4f64.cbrt();
    assert!(value >= 2.0 * PI - 1e-9 && value <= upper + 1e-9, "{value}");
    let (v, code) = json(&["extremal", "--kind", "is", "--p", "1", "--body", &body("square.json")]);
    assert_eq!(code, 0);
    assert_eq!(number(&v["value"]), 0.0);
    let (v, code) = json(&["extremal", "--kind", "os", "--p", "-1", "--body", &body("square.json")]);
    assert_eq!(code, 0);
    let value = number(&v["value"]);
    assert!((12.97..=103.8).contains(&value), "{value}");
}

#[test]
fn range_probe_is_monotone() {
    let (v, code) = json(&["extremal", "--kind", "IS", "--p", "3", "--probe", "--body", &body("square.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["monotone"], true);
    assert!(v["sequence"].as_array().unwrap().len() >= 5);
}

#[test]
fn thinshell_reports_the_partition() {
    let (v, code) = json(&["thinshell", "--body", &body("cube3.json"), "--seed", "7"]);
    assert_eq!(code, 0);
    let p = &v["partition"];
    let chosen = p["chosen_index"].as_u64().unwrap() as usize;
    let k_n = p["k_n"].as_u64().unwrap() as f64;
    let mass = number(&p["shells"][chosen]["mass"]);
    assert!(mass >= number(&p["thin_shell_mass"]) / (2.0 * (k_n + 1.0)));
    assert_eq!(v["inclusion_violations"], 0);
}

#[test]
fn thinshell_of_ball_holds_half_the_mass() {
    let (v, code) = json(&["thinshell", "--body", &body("ball3.json"), "--c-thin", "2"]);
    assert_eq!(code, 0);
    assert!(number(&v["thin_shell"]["mass"]) >= 0.5);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let args = ["thinshell", "--body", &body("cube3.json"), "--seed", "7", "--samples", "4000", "--format", "json"];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let args = ["isotropic", "--body", &body("square.json"), "--method", "sampling", "--samples", "4000"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn verify_suites_pass() {
    let (v, code) = json(&["verify", "iso-inequality", "--corpus", "random2d", "--n", "50"]);
    assert_eq!(code, 0);
    assert_eq!(v["bodies_passed"], 50);
    let (v, code) = json(&["verify", "steiner", "--body", &body("square.json")]);
    assert_eq!(code, 0);
    let w: Vec<f64> = v["fit"]["W"].as_array().unwrap().iter().map(number).collect();
    for (a, b) in w.iter().zip([4.0, 4.0, PI]) {
        assert!((a - b).abs() < 1e-9);
    }
    let (v, code) = json(&["verify", "equivariance", "--trials", "20", "--seed", "1"]);
    assert_eq!(code, 0);
    assert!(number(&v["max_relative_error"]) < 1e-7);
}

#[test]
fn quermass_modes() {
    let (v, code) = json(&["quermass", "--body", &body("cube3.json")]);
    assert_eq!(code, 0);
    assert!((number(&v["W"][3]) - 4.0 * PI / 3.0).abs() < 1e-9);
    let (v, code) = json(&["quermass", "--non-quermass", "2,3"]);
    assert_eq!(code, 0);
    assert_eq!(v.as_array().unwrap().len(), 2);
    let (v, code) = json(&["quermass", "--body", &body("disk.json"), "--estimator", "OS_n2"]);
    assert_eq!(code, 0);
    assert!((number(&v["degree"]) + 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn ellipsoid_fits_respect_containment_factors() {
    let (v, code) = json(&["mvee", "--body", &body("square.json")]);
    assert_eq!(code, 0);
    assert!((number(&v["fit"]["containment_ratio"]) - 2f64.sqrt()).abs() < 1e-6);
    let (_, code) = json(&["john", "--body", &body("cube3.json")]);
    assert_eq!(code, 0);
    let (v, code) = json(&["santalo", "--body", &body("square.json")]);
    assert_eq!(code, 0);
    assert!((number(&v["volume_product"]) - 8.0).abs() < 1e-6);
}
