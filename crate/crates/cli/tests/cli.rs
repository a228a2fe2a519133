use std::io::Write;
use std::process::{Command, Stdio};

use conelcp_cli::commands::{classify, gen, Settings};
use conelcp_cli::input::InstanceFile;
use conelcp_core::random::MatrixKind;
use regex::Regex;

fn settings(seed: u64) -> Settings {
    Settings {
        tol: 1e-9,
        samples: 20,
        seed,
    }
}

#[test]
fn generated_instances_classify_as_requested() {
    for kind in MatrixKind::ALL {
        for seed in 0..100u64 {
            let dim = 2 + (seed % 5) as usize;
            let inst = InstanceFile::parse(&gen(kind, dim, seed).unwrap()).unwrap();
            assert_eq!(inst.dim(), dim);
            let r = classify(&inst, &settings(seed)).unwrap().result;
            let ok = match kind {
                MatrixKind::Pd => r["class"] == "PositiveDefinite",
                MatrixKind::Indefinite => r["class"] == "Indefinite",
                MatrixKind::Skew => r["class"] == "NonpositiveForm",
                MatrixKind::PMatrix => r["p_property"]["verdict"] == "CertifiedTrue",
                MatrixKind::Positive => r["q_property"]["verdict"] == "CertifiedTrue",
            };
            assert!(ok, "{kind} seed {seed}: {r}");
        }
    }
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_conelcp"));
    c.current_dir(env!("CARGO_MANIFEST_DIR"));
    c
}

fn masked(stdout: &[u8]) -> String {
    let re = Regex::new(r#""wall_time_ms": [-+0-9.eE]+"#).unwrap();
    re.replace_all(&String::from_utf8_lossy(stdout), "")
        .into_owned()
}

#[test]
fn gen_pipes_into_classify() {
    let generated = bin()
        .args(["gen", "--kind", "skew", "--dim", "4", "--seed", "3"])
        .output()
        .unwrap();
    assert!(generated.status.success());
    let mut child = bin()
        .args(["classify", "-", "--samples", "5"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(&generated.stdout)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["class"], "NonpositiveForm");
    assert_eq!(report["settings"]["seed"], 3, "instance seed carries over");
    assert_eq!(report["settings"]["samples"], 5);
    assert_eq!(
        out.status.code(),
        Some(1),
        "skew matrices lack the F-property"
    );
}

#[test]
fn reports_are_deterministic() {
    for args in [
        ["witness", "tests/fixtures/witness_rotation.csv"],
        ["classify", "tests/fixtures/classify_rotation.json"],
        ["oracle", "tests/fixtures/oracle_three_solutions.json"],
    ] {
        let a = bin().args(args).output().unwrap();
        let b = bin().args(args).output().unwrap();
        assert_eq!(masked(&a.stdout), masked(&b.stdout), "{args:?}");
    }
    let a = bin()
        .args(["gen", "--kind", "pmatrix", "--dim", "5"])
        .output()
        .unwrap();
    let b = bin()
        .args(["gen", "--kind", "pmatrix", "--dim", "5"])
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_envelope_fields() {
    let out = bin()
        .args([
            "solve",
            "tests/fixtures/solve_identity.json",
            "--tol",
            "1e-7",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["command"], "solve");
    assert_eq!(r["settings"]["tol"], 1e-7);
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    assert!(r["wall_time_ms"].as_f64().unwrap() >= 0.0);
    assert_eq!(
        r["result"]["solution"]["x"]["values"],
        serde_json::json!([1.0, 2.0])
    );
}

#[test]
fn verbose_summary_goes_to_stderr() {
    let out = bin()
        .args([
            "oracle",
            "tests/fixtures/oracle_three_solutions.json",
            "--verbose",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("3 solution(s)"), "{stderr}");
    let quiet = bin()
        .args(["oracle", "tests/fixtures/oracle_three_solutions.json"])
        .output()
        .unwrap();
    assert!(quiet.stderr.is_empty());
}

#[test]
fn oracle_exit_one_without_solutions() {
    let out = bin()
        .args(["oracle", "tests/fixtures/solve_no_solution.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["result"]["count"], 0);
}

#[test]
fn input_errors_exit_two() {
    for args in [
        vec!["gen", "--kind", "pd", "--dim", "0"],
        vec!["gen", "--kind", "pd", "--dim", "13"],
        vec!["gen", "--kind", "circle", "--dim", "2"],
        vec!["classify", "tests/fixtures/does_not_exist.json"],
        vec![
            "classify",
            "tests/fixtures/classify_identity.json",
            "--tol",
            "0",
        ],
        vec!["solve", "tests/fixtures/missing_q.json"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}
