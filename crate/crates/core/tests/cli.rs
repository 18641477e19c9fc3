use std::path::PathBuf;
use std::process::{Command, Output};

use hybridfock::encoding::build_jw_hamiltonian;
use hybridfock::integrals::parse_fcidump;
use hybridfock::QubitOperator;

fn h2_path() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/h2_sto3g_0.74.fcidump").display().to_string()
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hybridfock")).args(args).env("HYBRIDFOCK_THREADS", "1").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_op(path: &std::path::Path) -> QubitOperator {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    QubitOperator::from_json(&v).unwrap()
}

#[test]
fn encode_pure_pair_h2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let o = bin(&["encode", "--fcidump", &h2_path(), "--bosonic", "0,1", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n_qubits=2"));
    assert_eq!(read_op(&path).n_qubits(), 2);
}

#[test]
fn encode_without_bosons_is_jordan_wigner() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let o = bin(&["encode", "--fcidump", &h2_path(), "--bosonic", "", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let ints = parse_fcidump(&std::fs::read_to_string(h2_path()).unwrap()).unwrap();
    let jw = build_jw_hamiltonian(&ints);
    let op = read_op(&path);
    assert_eq!(op.len(), jw.len());
    assert!(op.max_difference(&jw) < 1e-12);
}

#[test]
fn encode_interaction_only() {
    let o = bin(&["encode", "--fcidump", &h2_path(), "--bosonic", "1", "--interaction-only"]);
    assert_eq!(o.status.code(), Some(0));
    let op = QubitOperator::from_json(&serde_json::from_str(&stdout(&o)).unwrap()).unwrap();
    assert_eq!(op.n_qubits(), 3);
    assert_eq!(op.len(), 10);
}

#[test]
fn terms_scan_golden_h2() {
    let o = bin(&["terms-scan", "--fcidump", &h2_path()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n_bosonic,total_terms,interaction_terms\n0,15,0\n1,11,10\n2,6,0\n");
}

#[test]
fn groups_golden_h2() {
    let o = bin(&["groups", "--fcidump", &h2_path()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n_bosonic,fc_groups,qwc_groups,fc_groups_hi,qwc_groups_hi\n0,2,5,0,0\n1,2,5,2,5\n2,2,3,0,0\n");
}

#[test]
fn hybrid_fci_h2() {
    let o = bin(&["hybrid-fci", "--fcidump", &h2_path()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n_fermionic,energy_hartree,error_hartree"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!((r[1] + 1.1372838344885028).abs() < 1e-9);
        assert_eq!(r[2], 0.0);
    }
}

#[test]
fn gates_pair_circuit_golden() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let o = bin(&["gates", "--excitation", "p:0->3", "--bosonic", "0..3", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["cnot"], 4);
    assert_eq!(report["parameterized"], 2);
    let circ: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let names: Vec<&str> = circ["gates"].as_array().unwrap().iter().map(|g| g["g"].as_str().unwrap()).collect();
    assert_eq!(names, ["CNOT", "RX", "RZ", "CNOT", "RZ", "CNOT", "RX", "CNOT"]);
}

#[test]
fn gates_compare_semi_paired() {
    for backend in ["direct", "optimized"] {
        let o = bin(&["gates", "--excitation", "0d,2u->4d,4u", "--bosonic", "1,3,4", "--backend", backend, "--compare"]);
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert!(v["ratio"].as_f64().unwrap() >= 2.0, "{backend}: {v}");
    }
}

#[test]
fn malformed_excitation_exit_two() {
    let o = bin(&["gates", "--excitation", "0u->"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0u->"));
}

#[test]
fn incompatible_excitation_exit_two() {
    let o = bin(&["gates", "--excitation", "0u->2u", "--bosonic", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn vqe_h2_pair_ansatz() {
    let o = bin(&["vqe", "--fcidump", &h2_path(), "--bosonic", "0,1", "--pool", "upccd"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["energy"].as_f64().unwrap() + 1.1372838344885028).abs() < 1e-8);
    assert_eq!(v["converged"], true);
}

#[test]
fn adapt_h2_trace() {
    let o = bin(&["adapt", "--fcidump", &h2_path()]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!lines.is_empty());
    assert_eq!(lines[0]["spec"], "p:0->1");
    for (k, l) in lines.iter().enumerate() {
        assert_eq!(l["cycle"], k);
    }
    let summary: serde_json::Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(summary["partition"]["bosonic"], serde_json::json!([0, 1]));
}

#[test]
fn adapt_cycle_cap_exit_three() {
    let o = bin(&["adapt", "--random", "3", "--seed", "4", "--n-elec", "2", "--max-cycles", "1", "--grad-min", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn large_random_encode_beats_jordan_wigner() {
    let count = |bosonic: &str| {
        let o = bin(&["encode", "--random", "22", "--seed", "3", "--bosonic", bosonic, "-o", "/dev/null"]);
        assert_eq!(o.status.code(), Some(0));
        let s = stdout(&o);
        s.trim().rsplit("n_terms=").next().unwrap().parse::<usize>().unwrap()
    };
    let hybrid = count("11..21");
    let jw = count("");
    assert!(hybrid < jw, "{hybrid} vs {jw}");
}
