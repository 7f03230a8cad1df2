use std::process::Command;

use bconv_cli::dispatch;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bconv").chain(args.iter().copied());
    let code = dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn mahler_of_x_plus_one() {
    let (code, out, _) = run(&["mahler", "--poly", "1,1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["command"], "mahler");
    assert_eq!(v["result"]["mahler"], 1.0);
    assert!(v["precision_bits"].as_u64().unwrap() >= 64);
    assert!(v["tolerance"].is_object());
}

#[test]
fn check_lambda_passes() {
    let (code, out, _) = run(&["check-lambda", "--minpoly", "X^9-2X^8-X+1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["result"]["passes"], true);
    assert!((v["result"]["parameter"]["lambda"].as_f64().unwrap() - 0.799533).abs() < 1e-6);
}

#[test]
fn check_lambda_root_selection() {
    let (code, _, err) = run(&["check-lambda", "--minpoly", "X^2-3X+1"]);
    assert_eq!(code, 1);
    assert!(err.contains("no real root"));
    // roots near 0.644 and 0.878
    let (code, _, err) = run(&["check-lambda", "--minpoly", "23X^2-35X+13"]);
    assert_eq!(code, 1);
    assert!(err.contains("--near"));
    let (code, out, _) = run(&["check-lambda", "--minpoly", "23X^2-35X+13", "--near", "0.9"]);
    assert_eq!(code, 0);
    assert!((json(&out)["result"]["parameter"]["lambda"].as_f64().unwrap() - 0.878).abs() < 1e-3);
}

#[test]
fn qfamily_and_validation() {
    let (code, out, _) = run(&["qfamily", "--q", "17"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["result"]["passes"], true);
    let (code, _, err) = run(&["qfamily", "--q", "18"]);
    assert_eq!(code, 1);
    assert_eq!(json(&err)["error"], "NotPrime");
    let (code, _, _) = run(&["qfamily"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["mahler", "--poly", "X^^2"]);
    assert_eq!(code, 1);
}

#[test]
fn help_exits_cleanly() {
    let (code, _, err) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(err.contains("search"));
}

#[test]
fn computational_failure_exits_two() {
    // 2^30 atoms exceeds the support budget
    let (code, out, err) = run(&["detail-profile", "--minpoly", "X^9-2X^8-X+1", "--depth", "30"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(json(&err)["error"], "Overflow");
}

#[test]
fn not_certifiable_carries_report() {
    let (code, _, err) = run(&["certify", "--minpoly", "X^2+X-1", "--kmax", "6"]);
    assert_eq!(code, 2, "{err}");
    let v = json(&err);
    assert_eq!(v["error"], "NotCertifiable");
    assert!(v["report"]["garsia_sequence"].is_array());
}

#[test]
fn certify_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("sys.json");
    std::fs::write(
        &spec,
        r#"{"dim": 1, "lambda": {"minpoly": "X^9-2X^8-X+1", "near": 0.8},
            "translations": [-1, 1], "family": "bernoulli"}"#,
    )
    .unwrap();
    let (code, out, err) = run(&["certify", "--spec", spec.to_str().unwrap(), "--kmax", "10"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(json(&out)["result"]["absolutely_continuous"], true);
    let (code, _, _) = run(&["certify", "--spec", "/nonexistent/sys.json"]);
    assert_eq!(code, 1);
}

#[test]
fn search_csv_is_deterministic_across_jobs() {
    let (c1, a, _) = run(&["search", "--max-degree", "7", "--max-height", "2", "--csv", "--jobs", "1"]);
    let (c2, b, _) = run(&["search", "--max-degree", "7", "--max-height", "2", "--csv", "--jobs", "3"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(
        a,
        "minpoly,mahler,lambda,margin\n\
         X^7-X^6-2X^5-X^2+X+1,2.010432,0.879161,1.551086e-3\n\
         X^7+2X^6-X-1,2.015159,0.932864,3.346261e-3\n"
    );
}

#[test]
fn config_file_fills_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"max_degree": 6, "max_height": 1, "csv": true}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let (code, out, err) = run(&["search", "--config", c]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "minpoly,mahler,lambda,margin\n");
    // explicit flags take precedence over the file
    let (code, out, _) = run(&["search", "--config", c, "--max-degree", "7", "--max-height", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    std::fs::write(&cfg, "not json").unwrap();
    let (code, _, err) = run(&["search", "--config", c]);
    assert_eq!(code, 1);
    assert_eq!(json(&err)["error"], "Parse");
}

#[test]
fn output_file_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let (code, out, _) = run(&["f-graph", "--steps", "5", "--csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("lambda,F"));

    let (code, out, _) = run(&["family", "--n-lo", "13", "--n-hi", "15"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["result"]["all_pass"], true);
    let (code, out, _) = run(&["gauss2d", "--p", "7"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["result"]["passes"], true);
}

#[test]
fn small_polynomial_tools() {
    let (_, out, _) = run(&["roots", "--poly", "X^2-1", "--csv"]);
    assert_eq!(out.lines().count(), 3);
    let (_, out, _) = run(&["irreducible", "--poly", "X^2-1"]);
    let v = json(&out);
    assert_eq!(v["result"]["irreducible"], false);
    assert!(v["result"]["factor"].is_string());
    let (_, out, _) = run(&["schur-cohn", "--poly", "X^9-2X^8-X+1"]);
    assert_eq!(json(&out)["result"]["count"]["count"], 8);
}

#[test]
fn profiles_of_a_support_measure() {
    let (code, out, err) = run(&[
        "detail-profile", "--minpoly", "X^9-2X^8-X+1", "--depth", "8", "--r-min", "0.05", "--r-max", "0.5",
        "--points", "3", "--csv",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().next(), Some("r,s_r,err"));
    assert_eq!(out.lines().count(), 4);
    let (code, out, err) = run(&[
        "entropy-profile", "--minpoly", "X^9-2X^8-X+1", "--depth", "6", "--r-min", "0.1", "--r-max", "1",
        "--points", "2",
    ]);
    assert_eq!(code, 0, "{err}");
    let rows = json(&out)["result"]["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 2);
    assert!(rows[1]["entropy"].as_f64() > rows[0]["entropy"].as_f64());
    let (code, _, _) = run(&["detail-profile", "--minpoly", "X^2+X-1", "--r-min", "-1"]);
    assert_eq!(code, 1);
}

#[test]
fn verify_inequalities_small() {
    let (code, out, _) = run(&["verify-inequalities", "--profile", "small"]);
    assert_eq!(code, 0);
    assert!(out.contains("detail_point_mass"));
}

#[test]
fn binary_matches_library() {
    let out = Command::new(env!("CARGO_BIN_EXE_bconv"))
        .args(["qfamily", "--q", "17"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let (_, lib, _) = run(&["qfamily", "--q", "17"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), lib);
    let bad = Command::new(env!("CARGO_BIN_EXE_bconv")).args(["qfamily", "--q", "4"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
