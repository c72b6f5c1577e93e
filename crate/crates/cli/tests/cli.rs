use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;

use fibbraid::braidrep::paper_generator;
use fibbraid::scalar::q_pow;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibbraid")).args(args).env_remove("FIBBRAID_THREADS").output().expect("binary runs")
}

fn payload(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["elapsed_ms"], 0);
    v["payload"].clone()
}

fn entry(m: &Value, i: usize, j: usize) -> Complex64 {
    let e = &m["entries"][i][j];
    Complex64::new(e[0].as_f64().unwrap(), e[1].as_f64().unwrap())
}

#[test]
fn gens_four_strands() {
    let out = run(&["gens", "--n", "4"]);
    assert!(out.status.success());
    let p = payload(&out);
    let g = p["generators"].as_array().unwrap();
    assert_eq!(g.len(), 3);
    assert!((entry(&g[0], 0, 0) - q_pow::<f64>(-1)).norm() < 1e-15);
    assert!((entry(&g[0], 1, 1) + q_pow::<f64>(1)).norm() < 1e-15);
    assert!(entry(&g[0], 0, 1).norm() < 1e-15);
}

#[test]
fn gens_six_strands_in_paper_basis() {
    let out = run(&["gens", "--n", "6", "--basis", "paper"]);
    let p = payload(&out);
    let g = p["generators"].as_array().unwrap();
    assert_eq!(g.len(), 5);
    for i in [1usize, 2, 4, 5] {
        let paper = paper_generator::<f64>(6, i).unwrap().matrix;
        for r in 0..5 {
            for c in 0..5 {
                assert!((entry(&g[i - 1], r, c) - paper[(r, c)]).norm() < 1e-12, "B{i} ({r},{c})");
            }
        }
    }
}

#[test]
fn gens_two_strands_is_one_by_one() {
    let p = payload(&run(&["gens", "--n", "2"]));
    let g = p["generators"].as_array().unwrap();
    assert_eq!(g.len(), 1);
    assert_eq!(g[0]["rows"], 1);
}

#[test]
fn compile_examples() {
    let p = payload(&run(&["compile", "--target", "minusF", "--max-weaves", "3"]));
    assert_eq!(p["word"], "B1 B2 B1");
    assert!(p["distance"].as_f64().unwrap() < 1e-12);
    let p = payload(&run(&["compile", "--target", "minusZ", "--max-weaves", "5"]));
    assert_eq!(p["word"], "B1^5");
    let p = payload(&run(&["compile", "--target", "identity"]));
    assert_eq!(p["word"], "");
}

#[test]
fn compile_trace_csv() {
    let path = std::env::temp_dir().join(format!("fibbraid-trace-{}.csv", std::process::id()));
    let out = run(&["compile", "--target", "minusF", "--max-weaves", "4", "--trace", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "max_weaves,distance,weave_count,word");
    assert_eq!(lines.len(), 5);
    assert!(lines[3].ends_with(",3,B1 B2 B1"));
}

#[test]
fn output_is_byte_identical() {
    let args = ["compile", "--target", "T", "--phase-mode", "up-to-phase", "--max-weaves", "8", "--method", "mitm"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let threaded = Command::new(env!("CARGO_BIN_EXE_fibbraid")).args(args).env("FIBBRAID_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, threaded.stdout);
}

#[test]
fn exit_codes() {
    let words = run(&["verify", "--suite", "paper-words"]);
    assert_eq!(words.status.code(), Some(1));
    let rows = payload(&words)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 6);
    let failing: Vec<&str> = rows.iter().filter(|r| r["pass"] == false).map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(failing, ["-H -> minusH"]);

    assert_eq!(run(&["verify", "--suite", "artin", "--n", "8"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--suite", "chars"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["gens", "--n", "4", "--charge", "psi1"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--word", "B7", "--strands", "4"]).status.code(), Some(2));
    assert_eq!(run(&["--threads", "0", "gens"]).status.code(), Some(2));
    let budget = run(&["compile", "--target", "H", "--phase-mode", "up-to-phase", "--max-weaves", "4", "--max-error", "1e-6"]);
    assert_eq!(budget.status.code(), Some(3));
    assert_eq!(payload(&budget)["budget_exhausted"], true);
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn eval_and_leakage() {
    let p = payload(&run(&["eval", "--word", "B1 B2 B1", "--target", "minusF"]));
    assert!(p["distance"].as_f64().unwrap() < 1e-12);
    assert_eq!(p["weave_count"], 3);
    let p = payload(&run(&["leakage", "--word", "B3", "--qubits", "2"]));
    let tau: f64 = 2.0 / (1.0 + 5f64.sqrt());
    assert!((p["leakage"].as_f64().unwrap() - tau.sqrt()).abs() < 1e-12);
    let p = payload(&run(&["leakage", "--word", "B1 B2^-1 B4^3 B5", "--qubits", "2"]));
    assert!(p["leakage"].as_f64().unwrap() < 1e-12);
}

#[test]
fn interference_and_initialization() {
    let p = payload(&run(&["interfere", "--inner", "eps"]));
    assert!((p["monodromy"].as_f64().unwrap() + 0.381966011250105).abs() < 1e-12);
    let csv = run(&["interfere", "--sweep", "8", "--csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("alpha,sigma_xx,inner_label\n"));
    assert_eq!(text.lines().count(), 9);
    let a = run(&["init-sim", "--qubits", "2", "--seed", "11"]);
    let b = run(&["init-sim", "--qubits", "2", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(payload(&a)["antidots"].as_array().unwrap().len(), 6);
}

#[test]
fn chars_and_blocks() {
    let p = payload(&run(&["chars", "--sector", "eps", "--order", "4"]));
    assert_eq!(p["leading_exponent"], "11/30");
    let table = run(&["chars", "--sector", "I", "--order", "3", "--format", "table"]);
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.starts_with("q_exponent\ty_exponent\tcoefficient\n-1/30\t0\t1\n"));
    assert_eq!(run(&["chars", "--full", "1,0"]).status.code(), Some(2));

    let p = payload(&run(&["blocks", "--around", "0"]));
    let m = &p["monodromy"];
    assert!((entry(m, 0, 0) - 1.0).norm() < 1e-9);
    assert!((entry(m, 1, 1) - Complex64::from_polar(1.0, -1.2 * std::f64::consts::PI)).norm() < 1e-9);
    assert!(entry(m, 0, 1).norm() < 1e-9);
    let c = run(&["blocks", "--consistency"]);
    assert!(c.status.success());
    assert_eq!(payload(&c)["consistency"]["pass"], true);
}
