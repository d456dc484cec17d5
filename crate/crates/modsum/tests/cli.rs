//! End-to-end tests of the `modsum` binary: output schemas, exit codes,
//! determinism, and the environment-variable contract.

use std::process::{Command, Output};

fn modsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modsum"))
        .args(args)
        .output()
        .expect("failed to launch modsum binary")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is not valid JSON")
}

#[test]
fn eval_probdist_report() {
    let out = modsum(&["eval", "--probdist", "0.5"]);
    let v = stdout_json(&out);
    assert_eq!(v["source"]["p"], 0.5);
    assert_eq!(v["cut_set"], 1.0);
    assert!((v["theorem1"].as_f64().unwrap() - 1.415037).abs() < 1e-4);
    assert!((v["theorem2"].as_f64().unwrap() - 1.415037).abs() < 1e-3);
    assert!((v["witnesses"]["theorem1"]["d_star"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-3);
    assert_eq!(v["witnesses"]["nw_extension"]["kind"], "nw_extension");
}

#[test]
fn eval_explicit_source() {
    let out = modsum(&[
        "eval", "--source", "p=1.0", "x0=0.5", "x1=0.5", "y0=0.5", "y1=0.5",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["cut_set"], 2.0);
    assert!((v["theorem2"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    // the closed form applies only to the running-example family
    assert!(v["theorem1"].is_null());
}

#[test]
fn eval_rejects_bad_parameters() {
    let out = modsum(&["eval", "--probdist", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("p = 1.5"), "message must name the offending parameter: {msg}");

    for bad in [
        vec!["eval", "--source", "p=0.5", "x0=0.5", "x1=0.5", "y0=0.5", "q=0.5"],
        vec!["eval", "--source", "p=0.5", "x0=2.0", "x1=0.5", "y0=0.5", "y1=0.5"],
        vec!["eval", "--source", "p=0.5", "x0=abc", "x1=0.5", "y0=0.5", "y1=0.5"],
        vec!["eval", "--probdist", "0.5", "--source", "p=0.5", "x0=0.5", "x1=0.5", "y0=0.5", "y1=0.5"],
        vec!["eval"],
        vec!["eval", "--probdist", "0.5", "--tol", "-1"],
        vec!["frobnicate"],
    ] {
        let out = modsum(&bad);
        assert_eq!(out.status.code(), Some(2), "args {bad:?} must exit 2");
    }
}

#[test]
fn sweep_csv_contract() {
    let out = modsum(&["sweep", "--points", "9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,cut_set,nw_extension,theorem1"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            assert_eq!(cells.len(), 4);
            for c in &cells {
                // fixed 6-decimal formatting
                let (_, frac) = c.split_once('.').expect("cell must have a decimal point");
                assert_eq!(frac.len(), 6, "cell {c} must have 6 decimals");
            }
            cells.iter().map(|c| c.parse().unwrap()).collect()
        })
        .collect();
    assert_eq!(rows.len(), 9);
    // sorted by p, and p/1-p rows identical past the first column
    for w in rows.windows(2) {
        assert!(w[0][0] < w[1][0]);
    }
    for i in 0..rows.len() {
        let j = rows.len() - 1 - i;
        assert!((rows[i][0] + rows[j][0] - 1.0).abs() < 1e-9);
        for k in 1..4 {
            assert_eq!(rows[i][k], rows[j][k], "row {i} vs {j} column {k}");
        }
    }
    // theorem1 >= cut_set on every row
    for r in &rows {
        assert!(r[3] >= r[1] - 1e-6);
    }
}

#[test]
fn sweep_theorem2_column_is_opt_in() {
    let out = modsum(&["sweep", "--points", "3", "--with-theorem2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,cut_set,nw_extension,theorem1,theorem2"));
    for l in lines {
        assert_eq!(l.split(',').count(), 5);
    }
}

#[test]
fn sweep_is_byte_deterministic() {
    let a = modsum(&["sweep", "--points", "11"]);
    let b = modsum(&["sweep", "--points", "11"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_writes_output_file() {
    let dir = std::env::temp_dir().join(format!("modsum-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let out = modsum(&["sweep", "--points", "3", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("p,cut_set,nw_extension,theorem1\n"));
    std::fs::remove_dir_all(&dir).unwrap();

    let out = modsum(&["sweep", "--points", "3", "-o", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_reports() {
    let out = modsum(&["search", "--probdist", "0.5", "--n", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["n"], 1);
    assert!((v["min_entropy_sum"].as_f64().unwrap() - 1.622556).abs() < 1e-6);
    assert_eq!(v["exhaustive"], true);
    assert_eq!(v["schemes_enumerated"], 7);
    assert!(v["comparison"].as_f64().unwrap() >= 0.0);
    assert!(v["argmin_scheme"]["enc1_blocks"].is_array());

    let out = modsum(&[
        "search", "--source", "p=0.5", "x0=1.0", "x1=0.0", "y0=1.0", "y1=0.0", "--n", "1",
    ]);
    let v = stdout_json(&out);
    assert!(v["min_entropy_sum"].as_f64().unwrap().abs() < 1e-12);

    let out = modsum(&["search", "--probdist", "0.5", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_budget_exhaustion_is_soft() {
    let out = modsum(&[
        "search", "--probdist", "0.5", "--n", "2", "--max-nodes", "200",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["exhaustive"], false);
}

#[test]
fn verify_exit_codes() {
    let out = modsum(&["verify", "--probdist", "0.5", "--n", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["schemes_checked"], 7);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["lemma1_pass"], 7);
    assert_eq!(v["lemma2_pass"], 7);
    assert_eq!(v["lemma3_pass"], 7);

    // X = Y = Z: the constant scheme attains the coupling cap exactly.
    let out = modsum(&[
        "verify", "--source", "p=0.3", "x0=1.0", "x1=0.0", "y0=1.0", "y1=0.0", "--n", "1",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["violations"], 0);

    // Injected broken scheme: exit 1 with the counterexample listed.
    let out = modsum(&["verify", "--probdist", "0.5", "--n", "1", "--inject-broken"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"], 1);
    assert_eq!(v["counterexamples"][0]["lemma2_pass"], false);
    assert!(v["counterexamples"][0]["scheme"]["enc1_blocks"].is_array());
}

#[test]
fn threads_env_contract() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_modsum"))
            .env("MODSUM_THREADS", threads)
            .args(["sweep", "--points", "1"])
            .output()
            .unwrap()
    };
    assert!(run("1").status.success());
    assert!(run("8").status.success());
    assert_eq!(run("0").status.code(), Some(2));
    assert_eq!(run("-2").status.code(), Some(2));
    assert_eq!(run("many").status.code(), Some(2));
}
