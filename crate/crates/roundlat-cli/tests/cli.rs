//! End-to-end tests of the `roundlat` binary: exit-code contract, output
//! formats, and the canonical-form round trip.

use roundlat_cli::{canonical_json, parse_spec, spec_to_distribution};
use std::io::Write;
use std::process::{Command, Output};
use tempfile::NamedTempFile;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roundlat"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Writes a spec document to a temp file and runs the binary on it.
fn run_with_spec(spec: &str, args: &[&str]) -> (Output, NamedTempFile) {
    let mut file = NamedTempFile::new().expect("temp file");
    file.write_all(spec.as_bytes()).expect("write spec");
    let path = file.path().to_str().expect("utf-8 path").to_string();
    let mut full = vec![args[0], &path];
    full.extend_from_slice(&args[1..]);
    (run(&full), file)
}

fn stdout_str(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_str(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

/// Splits CRLF-terminated CSV into rows of fields.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.split("\r\n")
        .filter(|line| !line.is_empty())
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect()
}

const U3: &str = r#"{ "q": 3, "pmf": [
    { "k": 0, "p": "1/3" }, { "k": 1, "p": "1/3" }, { "k": 2, "p": "1/3" }
] }"#;

const U2: &str = r#"{ "q": 2, "pmf": [ { "k": 0, "p": "1/2" }, { "k": 1, "p": "1/2" } ] }"#;

// ---- moments ---------------------------------------------------------------

#[test]
fn moments_of_floored_uniform_are_zero() {
    let (out, _f) = run_with_spec(U3, &["moments", "--mode", "floor", "--max-r", "2"]);
    assert!(out.status.success());
    assert!(stderr_str(&out).is_empty(), "quiet on success");
    let rows = csv_rows(&stdout_str(&out));
    assert_eq!(rows[0], ["mode", "r", "formula", "oracle", "residual", "within_tolerance"]);
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        assert_eq!(row[0], "floor");
        assert_eq!(row[3], "0", "oracle moment of ⌊U_3⌋ is exactly zero");
        assert_eq!(row[5], "true");
    }
}

#[test]
fn moments_of_point_mass_track_the_rounded_cube() {
    // Point mass at 7/3: ⌊7/3⌋ = 2, so the third moment is exactly 8.
    let spec = r#"{ "q": 3, "pmf": [ { "k": 7, "p": "1" } ] }"#;
    let (out, _f) = run_with_spec(spec, &["moments", "--max-r", "3"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout_str(&out));
    assert_eq!(rows[3][1], "3");
    assert_eq!(rows[3][3], "8");
}

#[test]
fn moments_exit_one_when_tolerance_is_unreachable() {
    // The closed forms carry ~1e-16 float noise, so an absurdly small
    // tolerance must trip the residual gate without touching parsing.
    let spec = r#"{ "q": 7, "pmf": [
        { "k": 3, "p": "1/7" }, { "k": -2, "p": "2/7" }, { "k": 11, "p": "4/7" }
    ] }"#;
    let (out, _f) = run_with_spec(spec, &["moments", "--max-r", "4", "--tolerance", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("exceeded tolerance"));
    // The report is still printed in full.
    assert_eq!(csv_rows(&stdout_str(&out)).len(), 5);
}

#[test]
fn moments_exit_two_on_unparseable_input() {
    let zero_denom = r#"{ "q": 2, "pmf": [ { "k": 0, "p": "1/0" } ] }"#;
    let (out, _f) = run_with_spec(zero_denom, &["moments"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("zero denominator"));

    let (out, _f) = run_with_spec("not json at all", &["moments"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["moments", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn moments_exit_three_on_invariant_violation() {
    let leaky = r#"{ "q": 2, "pmf": [ { "k": 0, "p": "1/3" } ] }"#;
    let (out, _f) = run_with_spec(leaky, &["moments"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_str(&out).contains("sum"));

    let negative = r#"{ "q": 2, "pmf": [ { "k": 0, "p": "3/2" }, { "k": 1, "p": "-1/2" } ] }"#;
    let (out, _f) = run_with_spec(negative, &["moments"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn moments_order_flag_is_range_checked() {
    let (out, _f) = run_with_spec(U3, &["moments", "--max-r", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let (out, _f) = run_with_spec(U3, &["moments", "--max-r", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

// ---- charfun ---------------------------------------------------------------

#[test]
fn charfun_of_floored_uniform_is_constant_one() {
    let (out, _f) = run_with_spec(U2, &["charfun", "--mode", "floor"]);
    assert!(out.status.success());
    assert!(stderr_str(&out).is_empty());
    let rows = csv_rows(&stdout_str(&out));
    assert_eq!(rows[0], ["t", "re", "im", "oracle_re", "oracle_im", "residual"]);
    assert_eq!(rows.len(), 65, "default grid is 64 points plus the header");
    for row in &rows[1..] {
        let re: f64 = row[1].parse().unwrap();
        let im: f64 = row[2].parse().unwrap();
        assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12, "row {row:?}");
    }
}

#[test]
fn charfun_single_point_grid_sits_at_the_origin() {
    let (out, _f) = run_with_spec(U3, &["charfun", "--grid", "1", "--mode", "nearest-up"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout_str(&out));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "0.0000000000000000e0");
    assert_eq!(rows[1][1], "1.0000000000000000e0", "any charfun is 1 at t = 0");
}

#[test]
fn charfun_rejects_degenerate_grids() {
    let (out, _f) = run_with_spec(U3, &["charfun", "--grid", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let (out, _f) = run_with_spec(U3, &["charfun", "--t-max", "-1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let (out, _f) = run_with_spec(U3, &["charfun", "--t-max", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

// ---- verify ----------------------------------------------------------------

#[test]
fn verify_passes_and_prints_machine_summary() {
    let out = run(&["verify", "--samples", "25", "--q-max", "12", "--seed", "7"]);
    assert!(out.status.success());
    assert!(stderr_str(&out).is_empty());
    let text = stdout_str(&out);
    assert!(text.contains("all 5 checks passed"), "{text}");
    let last = text.lines().last().unwrap();
    let summary: serde_json::Value = serde_json::from_str(last).expect("summary is JSON");
    assert_eq!(summary["checks"], 5);
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["seed"], 7);
}

#[test]
fn verify_is_deterministic_for_a_fixed_seed() {
    let a = run(&["verify", "--samples", "10", "--q-max", "8", "--seed", "42"]);
    let b = run(&["verify", "--samples", "10", "--q-max", "8", "--seed", "42"]);
    assert_eq!(stdout_str(&a), stdout_str(&b));
}

#[test]
fn verify_injected_fault_exits_one() {
    let out = run(&["verify", "--samples", "3", "--q-max", "4", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_str(&out);
    assert!(text.contains("FAIL"));
    let summary: serde_json::Value =
        serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(summary["failed"], 1);
}

#[test]
fn verify_fault_flag_is_hidden_from_help() {
    let out = run(&["verify", "--help"]);
    assert!(out.status.success());
    assert!(!stdout_str(&out).contains("inject-fault"));
}

// ---- sheppard --------------------------------------------------------------

#[test]
fn sheppard_single_report_reproduces_exact_rationals() {
    let out = run(&["sheppard", "--q", "3", "--weights", "1,1"]);
    assert!(out.status.success());
    assert!(stderr_str(&out).is_empty());
    let text = stdout_str(&out);
    assert!(text.contains("var(X):                  4/27"));
    assert!(text.contains("exact error:             1/108"));
    assert!(text.contains("error bound:             2/27"));
    assert!(text.contains("bound satisfied:         yes"));
}

#[test]
fn sheppard_single_weight_has_no_bound() {
    let out = run(&["sheppard", "--q", "5", "--weights", "3"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.contains("n/a"));
    assert!(text.contains("bound satisfied:         n/a"));
}

#[test]
fn sheppard_rejects_bad_parameters() {
    let out = run(&["sheppard", "--q", "4", "--weights", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("odd"));

    let out = run(&["sheppard", "--q", "3", "--weights", "0,1"]);
    assert_eq!(out.status.code(), Some(2));

    // --q without --weights, bare invocation, and --sweep combined with an
    // explicit case are all argument errors.
    assert_eq!(run(&["sheppard", "--q", "3"]).status.code(), Some(2));
    assert_eq!(run(&["sheppard"]).status.code(), Some(2));
    let out = run(&["sheppard", "--sweep", "--q", "3", "--weights", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sheppard_sweep_emits_csv_with_header() {
    let out = run(&["sheppard", "--sweep", "--q-max", "5", "--n-max", "2", "--s-max", "2"]);
    assert!(out.status.success());
    assert!(stderr_str(&out).is_empty());
    let text = stdout_str(&out);
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["q", "s", "var_X", "exact_error", "bound", "ratio"]);
    // q ∈ {3, 5} × 4 weight vectors of length 2.
    assert_eq!(rows.len(), 9);
    for row in &rows[1..] {
        assert_eq!(row.len(), 6);
        let ratio: f64 = row[5].parse().expect("ratio is a float");
        assert!((0.0..=1.0).contains(&ratio), "bound holds: {row:?}");
    }
    assert!(text.ends_with("\r\n"), "RFC-4180 line endings");
}

#[test]
fn sheppard_sweep_subsample_is_seeded() {
    let args = [
        "sheppard", "--sweep", "--subsample", "20", "--seed", "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout_str(&a), stdout_str(&b));
    assert_eq!(csv_rows(&stdout_str(&a)).len(), 21);
}

// ---- canonical round trip --------------------------------------------------

#[test]
fn canonical_printer_round_trips_exactly() {
    let messy = r#"{ "q": 6, "pmf": [
        { "k": 10, "p": "3/9" }, { "k": -4, "p": "2/6" }, { "k": 10, "p": "0/5" },
        { "k": 0, "p": "1/3" }
    ] }"#;
    let d = spec_to_distribution(&parse_spec(messy).unwrap()).unwrap();
    let canonical = canonical_json(&d);
    let reparsed = spec_to_distribution(&parse_spec(&canonical).unwrap()).unwrap();
    assert_eq!(d, reparsed, "exact rational equality after a print/parse cycle");
    // Canonicalization reduced the fractions and sorted the support.
    let first_k = canonical.find("\"k\": -4").unwrap();
    let second_k = canonical.find("\"k\": 0").unwrap();
    assert!(first_k < second_k);
    assert!(canonical.contains("\"1/3\""));
}
