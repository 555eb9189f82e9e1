use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn fintriple(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fintriple"))
        .args(args)
        .env_remove("FINTRIPLE_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn validate_circle_five() {
    let out = fintriple(&["validate", "--shape", "circle", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    let names: Vec<&str> = checks
        .iter()
        .map(|c| c["check_name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "self_adjoint",
            "grading_anticommutes",
            "reality_commutes",
            "zero_order",
            "first_order"
        ]
    );
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn validate_coupling_fixtures() {
    let good = fixture("circle5_default.csv");
    let out = fintriple(&[
        "validate",
        "--shape",
        "circle",
        "--n",
        "5",
        "--couplings",
        good.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let broken = fixture("circle5_broken_reality.csv");
    let out = fintriple(&[
        "validate",
        "--shape",
        "circle",
        "--n",
        "5",
        "--couplings",
        broken.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["coupling_check"]
        .as_str()
        .unwrap()
        .contains("reality partner"));
    let failing: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["check_name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["reality_commutes"]);
}

#[test]
fn output_is_reproducible() {
    let args = [
        "--seed",
        "42",
        "validate",
        "--shape",
        "segment",
        "--n",
        "7",
        "--normalization",
        "unit",
    ];
    let (a, b) = (fintriple(&args), fintriple(&args));
    assert_eq!(a.stdout, b.stdout);
    let args = [
        "product",
        "--n",
        "5",
        "--fn-x",
        "sin",
        "--fn-y",
        "exp",
        "--check-leibniz",
    ];
    assert_eq!(fintriple(&args).stdout, fintriple(&args).stdout);
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fintriple"))
        .args(["validate", "--shape", "circle", "--n", "4"])
        .env("FINTRIPLE_SEED", "0x2a")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 42);
    assert_eq!(
        json(&fintriple(&["validate", "--shape", "circle", "--n", "4"]))["seed"],
        0x5eed_0001
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        fintriple(&["validate", "--shape", "circle"]).status.code(),
        Some(2)
    );
    assert_eq!(
        fintriple(&["survey", "--shape", "disk", "--n-max", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fintriple(&["zeta", "--shape", "circle", "--n", "5", "--s", "-1", "--cutoff", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(fintriple(&["--help"]).status.code(), Some(0));
}

#[test]
fn converge_csv_and_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = fintriple(&[
        "converge",
        "--shape",
        "circle",
        "--fn",
        "sin",
        "--n-list",
        "8,16,32,64",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,dx,metric,value,reference,error"));
    assert_eq!(lines.count(), 4);
    assert!(json(&out)["order"].as_f64().unwrap() >= 0.9);

    let bad = dir.path().join("missing").join("out.csv");
    let out = fintriple(&[
        "converge",
        "--shape",
        "circle",
        "--fn",
        "sin",
        "--n-list",
        "8,16",
        "--csv",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn survey_and_qmatrix() {
    let out = fintriple(&["survey", "--shape", "segment", "--n-max", "11", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,det,kernel_dim\n2,0,1\n3,1,0\n4,-1,0\n5,0,1\n"));

    let v = json(&fintriple(&[
        "qmatrix",
        "--shape",
        "circle",
        "--n",
        "3",
        "--det-seq",
        "9",
    ]));
    assert_eq!(v["det"], "4");
    let seq: Vec<i64> = v["det_sequence"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["det"].as_i64().unwrap())
        .collect();
    assert_eq!(seq, [4, -3, 1, 0, 1, -3, 4]);
}

#[test]
fn commutator_single_block() {
    let out = fintriple(&[
        "commutator",
        "--shape",
        "circle",
        "--n",
        "8",
        "--fn",
        "sin",
        "--block",
        "2",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let blocks = v["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 1);
    let b = &blocks[0];
    assert_eq!(b["l"], 2);
    for key in ["a_minus", "a_plus", "nu", "kernel"] {
        assert!(b.get(key).is_some(), "missing {key}");
    }
    assert_eq!(b["kernel"].as_array().unwrap().len(), 3);
}

#[test]
fn commutator_from_sample_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.txt");
    std::fs::write(&path, "# samples\n0,0\n1,0\n4,0\n9,0\n16,0\n25,0\n36,0\n").unwrap();
    let spec = format!("file:{}", path.display());
    let out = fintriple(&[
        "commutator",
        "--shape",
        "segment",
        "--n",
        "7",
        "--fn",
        &spec,
        "--block",
        "3",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let b = &json(&out)["blocks"][0];
    // Δx = 1/6, so the quotients are 6·(9 − 4) and 6·(16 − 9).
    assert!((b["a_minus"][0].as_f64().unwrap() - 30.0).abs() < 1e-9);
    assert!((b["a_plus"][0].as_f64().unwrap() - 42.0).abs() < 1e-9);

    let out = fintriple(&[
        "commutator",
        "--shape",
        "segment",
        "--n",
        "6",
        "--fn",
        &spec,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn product_report_fields() {
    let out = fintriple(&[
        "product",
        "--n",
        "6",
        "--fn-x",
        "exp",
        "--fn-y",
        "exp",
        "--check-leibniz",
        "--limit-study",
        "8,16",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert!(v["leibniz_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["anticomm_norm"].as_f64().is_some());
    assert_eq!(v["block_sv_table"].as_array().unwrap().len(), 2);
}

#[test]
fn zeta_is_labeled_exploratory() {
    let out = fintriple(&[
        "zeta", "--shape", "circle", "--n", "13", "--s", "1.0", "--cutoff", "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["zeta"]["exploratory"], true);
    assert_eq!(v["zeta"]["terms"], 10);
}
