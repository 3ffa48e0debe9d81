use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use luinv::decomposition::MpsChain;
use luinv::state::{random_density, random_pure_state, save_state, QuantumState};
use luinv::tensor::Tensor;
use luinv::C64;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_luinv")).args(args).output().unwrap()
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let code = out.status.code().unwrap();
    let value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, value)
}

fn write_state(dir: &Path, name: &str, state: QuantumState) -> String {
    let path: PathBuf = dir.join(name);
    save_state(&state, &path).unwrap();
    path.to_str().unwrap().to_string()
}

fn basis_state(dims: Vec<usize>, amps: &[(usize, f64)]) -> QuantumState {
    let n: usize = dims.iter().product();
    let mut data = vec![C64::new(0.0, 0.0); n];
    for &(i, a) in amps {
        data[i] = C64::new(a, 0.0);
    }
    QuantumState::pure(Tensor::new(dims, data).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn list_single_subsystem_degree_two() {
    let (code, v) = run_json(&["invariants", "list", "-n", "1", "-k", "2"]);
    assert_eq!(code, 0);
    let values = v["values"].as_object().unwrap();
    assert_eq!(values["classes"], 2);
    assert!(values.contains_key("2; e") && values.contains_key("2; (12)"));
    let table = String::from_utf8(run(&["invariants", "list", "-n", "1", "-k", "2"]).stdout).unwrap();
    assert!(table.contains("2; (12)") && table.contains("connected"));
}

#[test]
fn eval_purity_of_maximally_mixed_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let rho = Tensor::identity_matrix(2).scale(C64::new(0.5, 0.0));
    let path = write_state(dir.path(), "mixed.json", QuantumState::density(vec![2], rho).unwrap());
    let (code, v) = run_json(&["invariants", "eval", &path, "--label", "2; (12)"]);
    assert_eq!(code, 0);
    assert!((num(&v["values"]["2; (12)"]["re"]) - 0.5).abs() < 1e-15);
    let table = String::from_utf8(run(&["invariants", "eval", &path, "--label", "2;(12)"]).stdout).unwrap();
    assert!(table.contains("0.5"));
}

#[test]
fn verify_random_two_qubit_density() {
    let dir = tempfile::tempdir().unwrap();
    let state = QuantumState::density(vec![2, 2], random_density(&[2, 2], 17).unwrap()).unwrap();
    let path = write_state(dir.path(), "rho.json", state);
    let (code, v) = run_json(&[
        "invariants",
        "verify",
        &path,
        "-n",
        "2",
        "-k",
        "3",
        "--trials",
        "50",
        "--seed",
        "5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["values"].as_object().unwrap().len(), 11);
    assert!(num(&v["diagnostics"]["max_deviation"]) <= 1e-8);
    let (code, _) = run_json(&["invariants", "verify", &path, "-n", "3", "-k", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn entropy_of_bell_and_product_states() {
    let dir = tempfile::tempdir().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = write_state(dir.path(), "bell.json", basis_state(vec![2, 2], &[(0, s), (3, s)]));
    let (code, v) = run_json(&["entropy", &bell, "--keep", "0", "--alpha", "2"]);
    assert_eq!(code, 0);
    assert!((num(&v["values"]["S_2"]) - 2f64.ln()).abs() < 1e-12);
    assert!(num(&v["diagnostics"]["max_deviation"]) <= 1e-9);

    let product = write_state(dir.path(), "prod.json", basis_state(vec![2, 2, 2], &[(5, 1.0)]));
    let (code, v) = run_json(&["entropy", &product, "--keep", "0,2", "--alpha", "0.5,2,3"]);
    assert_eq!(code, 0);
    for (_, value) in v["values"].as_object().unwrap() {
        assert!(num(value).abs() < 1e-12);
    }
}

#[test]
fn entropy_cross_check_on_five_qubits() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(
        dir.path(),
        "r5.json",
        QuantumState::pure(random_pure_state(&[2; 5], 8).unwrap()).unwrap(),
    );
    let (code, v) = run_json(&["entropy", &path, "--keep", "0,1", "--alpha", "3"]);
    assert_eq!(code, 0);
    assert!(num(&v["diagnostics"]["deviation[3; (123) | (123) | e | e | e]"]) <= 1e-9);
    let (code, _) = run_json(&["entropy", &path, "--keep", "7"]);
    assert_eq!(code, 2);
}

#[test]
fn factor_reports() {
    let dir = tempfile::tempdir().unwrap();
    let product = write_state(dir.path(), "prod.json", basis_state(vec![2; 4], &[(6, 1.0)]));
    let (code, v) = run_json(&["factor", &product]);
    assert_eq!(code, 0);
    assert_eq!(v["values"]["bond_dims"], serde_json::json!([1, 1, 1, 1, 1]));
    assert!((num(&v["values"]["fidelity"]) - 1.0).abs() < 1e-15);

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ghz = write_state(dir.path(), "ghz.json", basis_state(vec![2; 5], &[(0, s), (31, s)]));
    let (_, v) = run_json(&["factor", &ghz]);
    let middle: Vec<f64> = v["values"]["bond_sigmas"][2]
        .as_array()
        .unwrap()
        .iter()
        .map(num)
        .collect();
    assert_eq!(middle.len(), 2);
    assert!(middle.iter().all(|x| (x - s).abs() < 1e-12));

    let random = write_state(
        dir.path(),
        "r.json",
        QuantumState::pure(random_pure_state(&[2; 5], 3).unwrap()).unwrap(),
    );
    let out = dir.path().join("chain.json");
    let (code, v) = run_json(&["factor", &random, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(num(&v["values"]["fidelity"]) >= 1.0 - 1e-10);
    let chain = MpsChain::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(chain.len(), 5);

    let (code, v) = run_json(&["factor", &random, "--truncate-chi", "2"]);
    assert_eq!(code, 0);
    assert!(v["values"]["bond_dims"]
        .as_array()
        .unwrap()
        .iter()
        .all(|b| b.as_u64().unwrap() <= 2));
    assert!(num(&v["diagnostics"]["loss_bound"]) > 0.0);
}

#[test]
fn errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let corrupt = dir.path().join("bad.json");
    std::fs::write(&corrupt, "{\"kind\": \"pure\", \"dims\": [2], \"data\": [[1.0, 0.0]]}").unwrap();
    let out = run(&["factor", corrupt.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let mixed = write_state(
        dir.path(),
        "m.json",
        QuantumState::density(vec![2], random_density(&[2], 1).unwrap()).unwrap(),
    );
    assert_eq!(run(&["factor", &mixed]).status.code(), Some(2));
    assert_eq!(
        run(&["invariants", "eval", &mixed, "--label", "2; (13)"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["invariants", "list", "-n", "1", "-k", "9"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["invariants", "bogus"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let p = path.to_str().unwrap();
    assert_eq!(
        run(&["random", "--dims", "2,3", "--seed", "4", "--density", "--out", p])
            .status
            .code(),
        Some(0)
    );
    let first = std::fs::read(&path).unwrap();
    run(&["random", "--dims", "2,3", "--seed", "4", "--density", "--out", p]);
    assert_eq!(first, std::fs::read(&path).unwrap());
    let args = [
        "--json",
        "invariants",
        "verify",
        p,
        "-k",
        "2",
        "--trials",
        "10",
        "--seed",
        "9",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
