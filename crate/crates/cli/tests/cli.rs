// SPDX-License-Identifier: Apache-2.0
//! The `systolic` binary end to end: output, exit codes and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn systolic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_systolic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("one JSON object")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_polygcd_passes() {
    let o = systolic(&["--seed", "1", "verify", "polygcd", "--count", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.ends_with("pass=true")).count(), 10);
    assert!(out.contains("passed: 10\nfailed: 0\n"), "{out}");
}

#[test]
fn verify_toeplitz_reports_expected_singular() {
    let o = systolic(&["--seed", "2", "--format", "json", "verify", "toeplitz", "--count", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let rows = v["instances"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[3]["status"], "expected-singular");
    assert_eq!(v["failed"], 0);
}

#[test]
fn verify_intgcd_and_eigen_pass() {
    for fam in ["intgcd", "eigen"] {
        let o = systolic(&["--seed", "3", "--format", "json", "verify", fam, "--count", "4"]);
        assert_eq!(o.status.code(), Some(0), "{fam}");
        assert_eq!(json(&o)["passed"], 4);
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(systolic(&["verify", "matrices"]).status.code(), Some(2));
    assert_eq!(systolic(&["intgcd", "--a", "9", "--b", "6", "--mode", "fast"]).status.code(), Some(2));
    assert_eq!(systolic(&["intgcd", "--a", "4", "--b", "6", "--mode", "serial"]).status.code(), Some(2));
    assert_eq!(systolic(&["polygcd", "--p", "8", "--a", "1", "--b", "1"]).status.code(), Some(2));
    assert_eq!(systolic(&["eigen", "--matrix", "/nonexistent/m.txt"]).status.code(), Some(2));
    assert_eq!(systolic(&[]).status.code(), Some(2));
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    for fam in ["polygcd", "intgcd", "toeplitz", "eigen"] {
        let (t1, t2) = (dir.path().join(format!("{fam}1")), dir.path().join(format!("{fam}2")));
        let a = systolic(&["--seed", "11", "--trace", s(&t1), "verify", fam, "--count", "3"]);
        let b = systolic(&["--seed", "11", "--trace", s(&t2), "verify", fam, "--count", "3"]);
        assert_eq!(a.stdout, b.stdout, "{fam}");
        let (x, y) = (std::fs::read(&t1).unwrap(), std::fs::read(&t2).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y, "{fam}");
    }
    let c = systolic(&["--seed", "12", "verify", "intgcd", "--count", "3"]);
    let d = systolic(&["--seed", "11", "verify", "intgcd", "--count", "3"]);
    assert_ne!(c.stdout, d.stdout);
}

#[test]
fn polygcd_restores_common_x_power() {
    // x(x+1)(x+2) and x(x+1)(x+3) over GF(7).
    let o = systolic(&["--format", "json", "polygcd", "--p", "7", "--a", "0,2,3,1", "--b", "0,3,4,1", "--variant", "appA"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["coefficients"], serde_json::json!([0, 1, 1]));
    assert!(v["latency"].as_u64().unwrap() <= 10);
}

#[test]
fn intgcd_modes() {
    let sys = json(&systolic(&["--format", "json", "intgcd", "--a", "9", "--b", "6"]));
    assert_eq!(sys["gcd"], 3);
    assert_eq!(sys["bits"], 4);
    assert_eq!(sys["cells"], 14);
    let ser = json(&systolic(&["--format", "json", "intgcd", "--a", "-45", "--b", "30", "--mode", "serial"]));
    assert_eq!(ser["gcd"], 15);
    let pre = json(&systolic(&["--format", "json", "intgcd", "--a", "45", "--b", "-30", "--mode", "precursor"]));
    assert_eq!(pre["gcd"], 15);
    assert!(pre["iterations"].as_u64().unwrap() <= pre["bound"].as_u64().unwrap());
    let wide = json(&systolic(&["--format", "json", "intgcd", "--a", "9", "--b", "6", "--conservative"]));
    assert_eq!(wide["cells"], 16);
}

#[test]
fn toeplitz_files_and_breakdown() {
    let dir = TempDir::new().unwrap();
    let bands = write(&dir, "bands", "0.5\n1\n4\n1\n0.25\n");
    let rhs = write(&dir, "rhs", "1\n2\n3\n");
    let trace = dir.path().join("t.ndjson");
    for mode in ["serial", "systolic"] {
        let o = systolic(&["--format", "json", "--trace", s(&trace), "toeplitz", "--n", "2", "--bands", s(&bands), "--rhs", s(&rhs), "--mode", mode]);
        assert_eq!(o.status.code(), Some(0), "{mode}");
        let v = json(&o);
        assert!(v["residual"].as_f64().unwrap() < 1e-14);
        assert_eq!(v["x"].as_array().unwrap().len(), 3);
    }
    let stats = json(&systolic(&["--format", "json", "trace-stats", s(&trace)]));
    assert_eq!(stats["cells"], 3);

    let singular = write(&dir, "sing", "0.5\n1\n0\n1\n0.25\n");
    let o = systolic(&["toeplitz", "--n", "2", "--bands", s(&singular), "--rhs", s(&rhs)]);
    assert_eq!(o.status.code(), Some(3));
    let short = write(&dir, "short", "1\n2\n");
    assert_eq!(systolic(&["toeplitz", "--n", "2", "--bands", s(&short), "--rhs", s(&rhs)]).status.code(), Some(2));
}

#[test]
fn eigen_file_with_vectors() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m", "3\n2\n1 2\n0 1 2\n");
    for mode in ["broadcast", "delayed"] {
        let o = systolic(&["--format", "json", "eigen", "--matrix", s(&m), "--mode", mode, "--vectors"]);
        assert_eq!(o.status.code(), Some(0), "{mode}");
        let v = json(&o);
        let mut ev: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        ev.sort_by(f64::total_cmp);
        let r2 = 2f64.sqrt();
        for (g, w) in ev.iter().zip([2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((g - w).abs() < 1e-12, "{ev:?}");
        }
        assert_eq!(v["converged"], true);
        assert_eq!(v["vector2"].as_array().unwrap().len(), 3);
    }
    let asym = write(&dir, "bad", "2\n1\nx 1\n");
    assert_eq!(systolic(&["eigen", "--matrix", s(&asym)]).status.code(), Some(2));
}

#[test]
fn trace_stats_utilisation() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty", "");
    let v = json(&systolic(&["--format", "json", "trace-stats", s(&empty)]));
    assert_eq!((v["cells"].as_u64(), v["mean"].as_f64()), (Some(0), Some(0.0)));
    let bad = write(&dir, "bad", "{\"tick\": 0}\n");
    assert_eq!(systolic(&["trace-stats", s(&bad)]).status.code(), Some(2));

    let bands: Vec<String> = (0..33).map(|k| if k == 16 { "40".into() } else { format!("{}", 0.03 * (k as f64 - 16.0)) }).collect();
    let bands = write(&dir, "b16", &bands.join("\n"));
    let rhs = write(&dir, "r16", &(0..17).map(|i| i.to_string()).collect::<Vec<_>>().join("\n"));
    let trace = dir.path().join("t16");
    let o = systolic(&["--trace", s(&trace), "toeplitz", "--n", "16", "--bands", s(&bands), "--rhs", s(&rhs)]);
    assert_eq!(o.status.code(), Some(0));
    let mean = json(&systolic(&["--format", "json", "trace-stats", s(&trace)]))["mean"].as_f64().unwrap();
    assert!((0.20..=0.30).contains(&mean), "{mean}");

    let mut m = String::from("16\n");
    for i in 0..16 {
        let row: Vec<String> = (0..=i).map(|j| if i == j { format!("{}", i + 1) } else { format!("{}", 1.0 / (1 + i + j) as f64) }).collect();
        m.push_str(&row.join(" "));
        m.push('\n');
    }
    let m = write(&dir, "m16", &m);
    let jt = dir.path().join("j16");
    assert_eq!(systolic(&["--trace", s(&jt), "eigen", "--matrix", s(&m), "--mode", "delayed"]).status.code(), Some(0));
    let diag = json(&systolic(&["--format", "json", "trace-stats", s(&jt)]))["diagonal_mean"].as_f64().unwrap();
    assert!((0.28..=0.38).contains(&diag), "{diag}");
}
