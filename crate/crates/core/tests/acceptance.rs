//! Acceptance checks. Prints one PASS/FAIL line per criterion. With
//! `HYBRIDFOCK_ACCEPTANCE_STRICT=1` any failing criterion makes the process
//! exit nonzero.

use std::path::PathBuf;
use std::time::Instant;

use hybridfock::circuits::{compile, ExcitationSpec, Backend, PoolKind, trotter_ucc, validate, generator};
use hybridfock::cli::group_counts;
use hybridfock::encoding::{
    build_hcb_hamiltonian, build_hybrid_hamiltonian, build_hybrid_parts, build_jw_hamiltonian, projection_oracle,
};
use hybridfock::integrals::{parse_fcidump, write_fcidump};
use hybridfock::pauli::{sorted_insertion, CommutationMode};
use hybridfock::sim::{
    circuit_unitary, exp_hermitian, ground_state, hybrid_fci_energy, hybrid_fci_scan, max_entry_difference,
    reference_state, Sector, SectorBasis,
};
use hybridfock::vqe::{adapt_select_encoding, minimize, AdaptThresholds};
use hybridfock::{IntegralSet, OrbitalPartition, QubitOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn h2() -> (IntegralSet, f64) {
    let ints = parse_fcidump(&std::fs::read_to_string(data("h2_sto3g_0.74.fcidump")).unwrap()).unwrap();
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(data("h2_sto3g_0.74.json")).unwrap()).unwrap();
    (ints, meta["e_fci"].as_f64().unwrap())
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Same operator term for term, up to `tol` per coefficient.
fn same_terms(a: &QubitOperator, b: &QubitOperator, tol: f64) -> bool {
    a.n_qubits() == b.n_qubits() && a.clone().simplified().len() == b.clone().simplified().len() && a.max_difference(b) <= tol
}

fn fci(ints: &IntegralSet) -> f64 {
    let p = OrbitalPartition::all_fermionic(ints.n_orb());
    let basis = SectorBasis::new(&p, ints.n_elec(), ints.ms2());
    ground_state(&build_jw_hamiltonian(ints), Sector::Basis(&basis)).unwrap().energy
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 1..=3 {
        for seed in 0..5 {
            let ints = IntegralSet::random(n, None, 100 + seed);
            for p in OrbitalPartition::enumerate_all(n) {
                let dense = build_hybrid_hamiltonian(&ints, &p).map_err(|e| e.to_string())?.to_dense();
                let oracle = projection_oracle(&ints, &p).map_err(|e| e.to_string())?;
                worst = worst.max(max_entry_difference(&dense, &oracle));
                cases += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-10 && secs < 60.0, format!("{cases} cases, max deviation {worst:.2e}, {secs:.1} s"))
}

fn reduction_limits() -> Outcome {
    let (h2, _) = h2();
    let mut sets = vec![("H2", h2)];
    for seed in 0..3 {
        sets.push(("random n=3", IntegralSet::random(3, None, 200 + seed)));
    }
    let mut worst: f64 = 0.0;
    for (name, ints) in &sets {
        let n = ints.n_orb();
        let jw = build_hybrid_hamiltonian(ints, &OrbitalPartition::all_fermionic(n)).unwrap();
        let hcb = build_hybrid_hamiltonian(ints, &OrbitalPartition::all_bosonic(n)).unwrap();
        let (ref_jw, ref_hcb) = (build_jw_hamiltonian(ints), build_hcb_hamiltonian(ints));
        if !same_terms(&jw, &ref_jw, 1e-12) || !same_terms(&hcb, &ref_hcb, 1e-12) {
            return Err(format!("{name}: JW diff {:.2e}, HCB diff {:.2e}", jw.max_difference(&ref_jw), hcb.max_difference(&ref_hcb)));
        }
        worst = worst.max(jw.max_difference(&ref_jw)).max(hcb.max_difference(&ref_hcb));
    }
    Ok(format!("{} integral sets, max coefficient deviation {worst:.2e}", sets.len()))
}

fn qubit_count_law() -> Outcome {
    let mut cases = 0;
    for n in 1..=4 {
        let ints = IntegralSet::random(n, None, 300 + n as u64);
        for p in OrbitalPartition::enumerate_all(n) {
            let expect = 2 * p.fermionic().len() + p.bosonic().len();
            let op = build_hybrid_hamiltonian(&ints, &p).unwrap();
            let max_support = op.iter().map(|(s, _)| 128 - s.support().leading_zeros() as usize).max().unwrap_or(0);
            if op.n_qubits() != expect || max_support > expect {
                return Err(format!("n={n} B={:?}: {} qubits, expected {expect}", p.bosonic(), op.n_qubits()));
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} partitions"))
}

fn hcb_measurement() -> Outcome {
    let (h2, _) = h2();
    let mut worst = 0;
    let mut sets = vec![h2];
    for n in 3..=8 {
        sets.push(IntegralSet::random(n, None, 400 + n as u64));
    }
    for ints in &sets {
        let op = build_hybrid_hamiltonian(ints, &OrbitalPartition::all_bosonic(ints.n_orb())).unwrap();
        let groups = sorted_insertion(&op.without_identity(), CommutationMode::QWC).len();
        worst = worst.max(groups);
    }
    check(worst <= 3, format!("max QWC groups {worst} over H2 and n=3..8"))
}

fn non_increasing(v: &[usize]) -> Option<usize> {
    v.windows(2).position(|w| w[1] > w[0])
}

fn term_group_monotonicity() -> Outcome {
    let start = Instant::now();
    let n = 22;
    let ints = IntegralSet::random(n, None, 1);
    let (mut terms, mut fc, mut qwc) = (vec![], vec![], vec![]);
    for k in 0..=n {
        let bosonic: Vec<usize> = (n - k..n).collect();
        let p = OrbitalPartition::from_bosonic(n, &bosonic).unwrap();
        let total = build_hybrid_parts(&ints, &p).unwrap().total();
        let (f, q) = group_counts(&total);
        terms.push(total.len());
        fc.push(f);
        qwc.push(q);
    }
    let secs = start.elapsed().as_secs_f64();
    let spin_orbitals = (2 * n) as f64;
    let scale = spin_orbitals.powi(4) / 8.0;
    let ratio = terms[0] as f64 / scale;
    let hcb_bound = 1 + n + 3 * n * (n - 1) / 2;
    let mut problems = Vec::new();
    for (name, col) in [("terms", &terms), ("fc_groups", &fc), ("qwc_groups", &qwc)] {
        if let Some(i) = non_increasing(col) {
            problems.push(format!("{name} rises at |B|={}->{} ({}->{})", i, i + 1, col[i], col[i + 1]));
        }
    }
    if !(0.5..=2.0).contains(&ratio) {
        problems.push(format!("|B|=0 terms / (2n)^4/8 = {ratio:.2}"));
    }
    if terms[n] > hcb_bound {
        problems.push(format!("|B|=n terms {} > {hcb_bound}", terms[n]));
    }
    if secs >= 600.0 {
        problems.push(format!("{secs:.0} s"));
    }
    let detail = format!(
        "terms {}..{} (|B|=0 is {ratio:.2}x of (2n)^4/8, |B|=n bound {hcb_bound}), fc {:?}, qwc {}..{}, {secs:.0} s",
        terms[0], terms[n], fc, qwc[0], qwc[n]
    );
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", problems.join("; ")))
    }
}

fn circuit_depth() -> Outcome {
    let spec: ExcitationSpec = "0d,2u->4d,4u".parse().unwrap();
    let hybrid = OrbitalPartition::new(5, vec![0, 2], vec![1, 3, 4]).unwrap();
    let jw = OrbitalPartition::all_fermionic(5);
    let mut detail = Vec::new();
    let mut ok = true;
    for backend in [Backend::Direct, Backend::Optimized] {
        let h = compile(&spec, &hybrid, backend).unwrap().counts().cnot;
        let j = compile(&spec, &jw, backend).unwrap().counts().cnot;
        ok &= 2 * h <= j;
        detail.push(format!("{backend:?} {h} vs {j}"));
    }
    check(ok, format!("CNOT hybrid vs JW: {}", detail.join(", ")))
}

fn candidate_specs(n: usize) -> Vec<ExcitationSpec> {
    let mut out = Vec::new();
    let so: Vec<String> = (0..n).flat_map(|o| [format!("{o}u"), format!("{o}d")]).collect();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                out.push(format!("p:{a}->{b}"));
                out.push(format!("{a}u->{b}u"));
                out.push(format!("{a}d->{b}d"));
            }
        }
    }
    for i in 0..so.len() {
        for j in i + 1..so.len() {
            for k in 0..so.len() {
                for l in k + 1..so.len() {
                    let src = [&so[i], &so[j]];
                    if src.contains(&&so[k]) || src.contains(&&so[l]) {
                        continue;
                    }
                    out.push(format!("{},{}->{},{}", so[i], so[j], so[k], so[l]));
                }
            }
        }
    }
    out.iter().filter_map(|s| s.parse().ok()).collect()
}

fn compilation_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut circuits = 0;
    let mut kinds = std::collections::BTreeSet::new();
    for n in 1..=4 {
        for p in OrbitalPartition::enumerate_all(n).into_iter().filter(|p| p.n_qubits() <= 6) {
            for spec in candidate_specs(n) {
                if validate(&spec, &p).is_err() {
                    continue;
                }
                // one double in eight
                if spec.kind() == hybridfock::circuits::ExcitationKind::Double && rng.gen_range(0..8) != 0 {
                    continue;
                }
                let g = generator(&spec, &p).map_err(|e| e.to_string())?.to_dense();
                for backend in [Backend::Direct, Backend::Optimized] {
                    let circ = compile(&spec, &p, backend).map_err(|e| format!("{spec}: {e}"))?;
                    for _ in 0..10 {
                        let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                        let u = circuit_unitary(&circ, &[theta]).map_err(|e| e.to_string())?;
                        let d = max_entry_difference(&u, &exp_hermitian(&g, theta / 2.0));
                        if d > 1e-10 {
                            return Err(format!("{spec} on B={:?} ({backend:?}): {d:.2e}", p.bosonic()));
                        }
                        worst = worst.max(d);
                    }
                    circuits += 1;
                }
                kinds.insert(format!("{:?}", spec.kind()));
            }
        }
    }
    Ok(format!("{circuits} circuits x 10 angles, kinds {kinds:?}, max deviation {worst:.2e}"))
}

fn hybrid_fci_ordering() -> Outcome {
    let (h2, _) = h2();
    let mut sets = vec![("H2".to_string(), h2)];
    for seed in 0..5 {
        sets.push((format!("random n=3 seed {seed}"), IntegralSet::random(3, Some(2), 500 + seed)));
        sets.push((format!("random n=3 seed {seed} (3e)"), IntegralSet::random(3, Some(3), 500 + seed)));
    }
    let mut worst_end: f64 = 0.0;
    for (name, ints) in &sets {
        let n = ints.n_orb();
        let exact = fci(ints);
        let scan = hybrid_fci_scan(ints, &(0..n).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
        // scan order is |F| = n down to 0
        if scan.windows(2).any(|w| w[1].1 < w[0].1 - 1e-10) {
            return Err(format!("{name}: scan not monotone {scan:?}"));
        }
        worst_end = worst_end.max((scan[0].1 - exact).abs());
        if (scan[0].1 - exact).abs() > 1e-10 {
            return Err(format!("{name}: full-F {} vs FCI {exact}", scan[0].1));
        }
        for p in OrbitalPartition::enumerate_all(n) {
            let e = hybrid_fci_energy(ints, &p).map_err(|e| e.to_string())?;
            if e < exact - 1e-10 {
                return Err(format!("{name}: B={:?} gives {e} below FCI {exact}", p.bosonic()));
            }
        }
    }
    Ok(format!("{} integral sets, full-F endpoint deviation {worst_end:.2e}", sets.len()))
}

fn end_to_end_vqe() -> Outcome {
    let (ints, e_fci) = h2();
    let start = Instant::now();
    let p = OrbitalPartition::all_bosonic(2);
    let h = build_hybrid_hamiltonian(&ints, &p).unwrap();
    let circ = trotter_ucc(&[ExcitationSpec::paired(0, 1)], &p, Backend::Optimized).unwrap();
    let reference = reference_state(&p, ints.n_elec(), ints.ms2()).unwrap();
    let r = minimize(&h, &circ, &reference, &[0.0]).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let err = (r.energy - e_fci).abs();
    check(
        err <= 1e-8 && secs < 5.0 && circ.params().len() == 1,
        format!("E = {:.12}, |E - E_FCI| = {err:.2e}, {} iterations, {secs:.3} s", r.energy, r.iterations),
    )
}

/// Three orbitals with a strong one-body coupling between orbitals 0 and 1,
/// so that the Hartree-Fock state is far from Brillouin-stationary.
pub fn single_favoring_system() -> IntegralSet {
    let n = 3;
    let base = IntegralSet::random(n, Some(2), 11);
    let h = vec![-1.2, 0.45, 0.0, 0.45, -0.7, 0.08, 0.0, 0.08, 0.3];
    let mut chem = vec![0.0; n.pow(4)];
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    chem[((p * n + q) * n + r) * n + s] = 0.25 * base.chemist(p, q, r, s);
                }
            }
        }
    }
    IntegralSet::from_chemist_tensor(n, 2, 0, 0.0, h, &chem).unwrap()
}

fn adaptive_encoding() -> Outcome {
    let (h2, _) = h2();
    let t = adapt_select_encoding(&h2, PoolKind::UpCCGSD, AdaptThresholds::default(), 10).map_err(|e| e.to_string())?;
    if t.partition != OrbitalPartition::all_bosonic(2) {
        return Err(format!("H2 selected B={:?}", t.partition.bosonic()));
    }
    let ints = single_favoring_system();
    let s = adapt_select_encoding(&ints, PoolKind::UpCCGSD, AdaptThresholds::default(), 10).map_err(|e| e.to_string())?;
    let exact = fci(&ints);
    let e_sel = hybrid_fci_energy(&ints, &s.partition).unwrap() - exact;
    let e_bos = hybrid_fci_energy(&ints, &OrbitalPartition::all_bosonic(3)).unwrap() - exact;
    let first = s.cycles.first().map(|c| c.spec.to_string()).unwrap_or_default();
    check(
        e_sel < e_bos && !s.partition.fermionic().is_empty(),
        format!(
            "H2 -> all bosonic ({} cycles); 3-orbital system first pick {first}, F={:?}, error {e_sel:.2e} vs all-bosonic {e_bos:.2e}",
            t.cycles.len(),
            s.partition.fermionic()
        ),
    )
}

fn parser_round_trip() -> Outcome {
    let (h2, _) = h2();
    let mut sets = vec![h2];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for seed in 0..20 {
        let n = rng.gen_range(1..=6);
        sets.push(IntegralSet::random(n, None, 600 + seed).with_core(rng.gen_range(-5.0..5.0)));
    }
    let mut worst: f64 = 0.0;
    for ints in &sets {
        let back = parse_fcidump(&write_fcidump(ints)).map_err(|e| e.to_string())?;
        if back.n_orb() != ints.n_orb() || back.n_elec() != ints.n_elec() || back.ms2() != ints.ms2() {
            return Err("header mismatch".into());
        }
        let pairs = ints.h_matrix().iter().zip(back.h_matrix()).chain(ints.g_tensor().iter().zip(back.g_tensor()));
        for (a, b) in pairs {
            worst = worst.max((a - b).abs());
        }
        worst = worst.max((ints.core() - back.core()).abs());
    }
    check(worst <= 1e-14, format!("{} sets, max entry deviation {worst:.2e}", sets.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("oracle equivalence", oracle_equivalence),
        ("reduction limits", reduction_limits),
        ("qubit-count law", qubit_count_law),
        ("HCB measurement groups", hcb_measurement),
        ("term/group monotonicity", term_group_monotonicity),
        ("circuit CNOT reduction", circuit_depth),
        ("compilation correctness", compilation_correctness),
        ("hybrid-FCI ordering", hybrid_fci_ordering),
        ("end-to-end VQE", end_to_end_vqe),
        ("adaptive encoding", adaptive_encoding),
        ("FCIDUMP round trip", parser_round_trip),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1} s]", i + 1),
            Err(d) => {
                failed.push(i + 1);
                println!("FAIL {:>2} {name}: {d} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failing: {failed:?}");
        if std::env::var("HYBRIDFOCK_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}
