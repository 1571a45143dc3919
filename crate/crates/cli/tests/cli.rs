use std::process::{Command, Output};

fn coalforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coalforge")).args(args).output().expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("one JSON value per line"))
        .collect()
}

#[test]
fn rates_prints_one_row_per_pair() {
    let out = coalforge(&["rates", "--n", "5"]);
    assert!(out.status.success());
    let rows = json_lines(&out);
    assert!(!rows.is_empty());
}

#[test]
fn simulations_are_deterministic() {
    for cmd in ["simulate-prune", "simulate-lambda"] {
        let a = coalforge(&[cmd, "--n", "12", "--replicates", "50", "--seed", "9"]);
        let b = coalforge(&[cmd, "--n", "12", "--replicates", "50", "--seed", "9"]);
        assert!(a.status.success(), "{cmd}");
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        let logs = json_lines(&a);
        assert_eq!(logs.len(), 50);
        assert!(logs.iter().all(|l| l["n"] == 12));
    }
    let a = coalforge(&["simulate-crt", "--n", "20", "--replicates", "30", "--seed", "3"]);
    let b = coalforge(&["simulate-crt", "--n", "20", "--replicates", "30", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let runs = json_lines(&a);
    assert_eq!(runs.len(), 30);
    assert!(runs.iter().all(|r| r["U"].as_u64() >= r["V"].as_u64()));
}

#[test]
fn histogram_has_a_header() {
    let dir = std::env::temp_dir().join(format!("coalforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let h = dir.join("h.csv");
    let out = coalforge(&["simulate-crt", "--n", "10", "--replicates", "40", "--histogram", h.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&h).unwrap();
    assert_eq!(csv.lines().next(), Some("bin_low,bin_high,count"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn gf_evaluates_and_extracts() {
    let out = coalforge(&["gf", "--which", "psi", "--at", "1,1,1"]);
    assert!(out.status.success());
    let v = &json_lines(&out)[0];
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let out = coalforge(&["gf", "--which", "w", "--extract", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!json_lines(&out).is_empty());
}

#[test]
fn verify_reports_and_exit_codes() {
    let out = coalforge(&["verify", "--suite", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports[0]["experiment"], "rates");
    assert_eq!(reports[0]["pass"], true);
    // a threshold nothing can meet makes the gate fail
    let out = coalforge(&["verify", "--suite", "1", "--tolerance", "max_quadrature_error=0"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let out = coalforge(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let out = coalforge(&["rates", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
