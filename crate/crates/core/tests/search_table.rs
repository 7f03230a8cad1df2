use bconv_core::polyalg::{min_pm01_value, AlgebraicParameter};
use bconv_core::search::{results_csv, run_search, run_search_with, SearchConfig};

const SMALL_TABLE: [(&str, f64, f64); 5] = [
    ("X^7-X^6-2X^5-X^2+X+1", 2.010432, 0.879161),
    ("X^7+2X^6-X-1", 2.015159, 0.932864),
    ("X^8+2X^7-1", 2.007608, 0.860582),
    ("X^9-2X^8-X+1", 2.003861, 0.799533),
    ("X^9+2X^8-X-1", 2.003861, 0.949560),
];

#[test]
fn degree_nine_height_two_reproduces_table() {
    let cfg = SearchConfig::new(9, 2).unwrap();
    let rows = run_search(&cfg).unwrap();
    let got: Vec<&str> = rows.iter().map(|r| r.param.min_poly.as_str()).collect();
    let want: Vec<&str> = SMALL_TABLE.iter().map(|r| r.0).collect();
    assert_eq!(got, want, "{}", results_csv(&rows));
    for (r, (_, m, lam)) in rows.iter().zip(SMALL_TABLE) {
        assert!((r.param.mahler - m).abs() < 1e-5);
        assert!((r.param.lambda - lam).abs() < 1e-5);
        assert!(r.report.margin > 0.0);
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let cfg = SearchConfig::new(8, 2).unwrap();
    let one = results_csv(&run_search_with(&cfg, Some(1), &|_, _| {}).unwrap());
    let four = results_csv(&run_search_with(&cfg, Some(4), &|_, _| {}).unwrap());
    assert_eq!(one, four);
}

#[test]
fn checkpoint_resumes() {
    let dir = std::env::temp_dir().join(format!("bconv-cp-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cp.json");
    let cfg = SearchConfig::new(8, 2).unwrap().with_checkpoint(&path);
    let full = results_csv(&run_search(&cfg).unwrap());
    // pretend the run stopped once degree 7 was done: one linear block,
    // five quadratic blocks, 25 blocks for each degree from 3 to 7
    let mut cp: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    cp["last_completed_block"] = (1 + 5 + 5 * 25).into();
    let keep: Vec<serde_json::Value> = cp["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["minpoly"].as_str().unwrap().starts_with("X^7"))
        .cloned()
        .collect();
    cp["results"] = keep.into();
    std::fs::write(&path, cp.to_string()).unwrap();
    let resumed = results_csv(&run_search(&cfg).unwrap());
    assert_eq!(full, resumed);
    let other = SearchConfig::new(7, 2).unwrap().with_checkpoint(&path);
    assert!(run_search(&other).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn emitted_parameters_avoid_pm01_roots() {
    for (p, _, lam) in SMALL_TABLE {
        let a = AlgebraicParameter::nearest(&p.parse().unwrap(), lam).unwrap();
        assert!(a.has_conjugate_above_two());
        let mins = min_pm01_value(&a, 12).unwrap();
        assert!(mins.iter().all(|m| m.min_value > 0.0), "{p}");
    }
}

const FULL_TABLE: [&str; 23] = [
    "X^7-X^6-2X^5-X^2+X+1",
    "X^7+2X^6-X-1",
    "X^8+2X^7-1",
    "X^9-2X^8-X+1",
    "X^9+2X^8-X-1",
    "X^10-2X^9-X^2+1",
    "X^10-2X^9-X+1",
    "X^10-X^9-2X^8-X^5+X^4+X^3-X^2+1",
    "X^10-X^9-X^8-2X^7-X^5+X^4+X^2+1",
    "X^10-X^9-X^8-X^7-2X^6-X^5+X^3+X^2+X+1",
    "X^10-2X^8-3X^7-2X^6-X^5+X^3+2X^2+2X+1",
    "X^10+X^9-2X^8+X^7+X^6-X^5+X^4-X^3+X-1",
    "X^10+2X^9-X^4-1",
    "X^10+2X^9-1",
    "X^10+3X^9+3X^8+3X^7+2X^6-2X^4-3X^3-3X^2-2X-1",
    "X^11-2X^10-X^2+1",
    "X^11-2X^10-X+1",
    "X^11-X^10-2X^9-X^8+X^7+2X^6+X^5-X^4-2X^3-X^2+X+1",
    "X^11-X^10-X^9-2X^8-X^4+X^2+X+1",
    "X^11+X^10-2X^9+X^8+X^7-2X^6+X^5+X^4-2X^3+X^2+X-1",
    "X^11+X^10-X^9+2X^8+X^4-X^2+X-1",
    "X^11+2X^10-X-1",
    "X^11+2X^10+X^2-1",
];

/// Long run: `cargo test --release -- --ignored full_table`.
#[test]
#[ignore]
fn full_table() {
    let rows = run_search(&SearchConfig::new(11, 3).unwrap()).unwrap();
    let got: Vec<&str> = rows.iter().map(|r| r.param.min_poly.as_str()).collect();
    eprintln!("{}", results_csv(&rows));
    for p in FULL_TABLE {
        assert!(got.contains(&p), "missing {p}");
    }
}
