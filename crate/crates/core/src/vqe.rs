//! Variational minimization and ADAPT-driven selection of the orbital partition.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::circuits::{
    compile_optimized, enumerate_pool, generator, Angle, CircuitError, ExcitationSpec, Gate, ParameterizedCircuit, PoolKind,
};
use crate::encoding::{build_hybrid_hamiltonian, EncodingError, OrbitalPartition};
use crate::integrals::IntegralSet;
use crate::pauli::QubitOperator;
use crate::sim::{apply_circuit, apply_operator, expectation, reference_state, Assignment, SimError, StateVector};

pub const GRADIENT_TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 500;
/// Largest ‖Δθ‖∞ taken in one optimizer step.
const MAX_STEP: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum VqeError {
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("energy is not finite")]
    NonFinite,
    #[error("operator pool is empty")]
    EmptyPool,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub energy: f64,
    pub parameters: Assignment,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

impl VqeResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "energy": self.energy,
            "parameters": self.parameters,
            "iterations": self.iterations,
            "gradient_norm": self.gradient_norm,
            "converged": self.converged,
        })
    }
}

pub fn energy(h: &QubitOperator, circuit: &ParameterizedCircuit, reference: &StateVector, theta: &[f64]) -> Result<f64, VqeError> {
    let e = expectation(h, &apply_circuit(reference, circuit, theta)?)?;
    if !e.is_finite() {
        return Err(VqeError::NonFinite);
    }
    Ok(e)
}

fn with_shift(gate: &Gate, delta: f64, theta: &[f64]) -> Gate {
    let shifted = |a: &Angle| Angle::Const(a.value(theta) + delta);
    match gate {
        Gate::Rx(t, a) => Gate::Rx(*t, shifted(a)),
        Gate::Ry(t, a) => Gate::Ry(*t, shifted(a)),
        Gate::Rz(t, a) => Gate::Rz(*t, shifted(a)),
        Gate::CRy { control, target, angle } => Gate::CRy { control: *control, target: *target, angle: shifted(angle) },
        g => g.clone(),
    }
}

/// Energy with gate `k` replaced by its `delta`-shifted copy; `prefix` is the state before gate `k`.
fn shifted_energy(
    h: &QubitOperator,
    circuit: &ParameterizedCircuit,
    prefix: &StateVector,
    k: usize,
    delta: f64,
    theta: &[f64],
) -> Result<f64, VqeError> {
    let mut st = prefix.clone();
    st.apply_gate(&with_shift(&circuit.gates()[k], delta, theta), theta);
    for g in &circuit.gates()[k + 1..] {
        st.apply_gate(g, theta);
    }
    Ok(expectation(h, &st)?)
}

/// `dE/dθ_index` by the parameter-shift rule applied to every gate carrying the parameter.
pub fn gradient_at(
    h: &QubitOperator,
    circuit: &ParameterizedCircuit,
    reference: &StateVector,
    theta: &[f64],
    index: usize,
) -> Result<f64, VqeError> {
    apply_circuit(reference, circuit, theta)?;
    let mut prefix = reference.clone();
    let mut total = 0.0;
    for (k, g) in circuit.gates().iter().enumerate() {
        if let Some(&Angle::Param { index: i, scale }) = g.angle() {
            if i == index {
                let e = |d: f64| shifted_energy(h, circuit, &prefix, k, d, theta);
                let d = if matches!(g, Gate::CRy { .. }) {
                    // controlled rotation: generator spectrum {0, ±½}
                    let c1 = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
                    let c2 = (SQRT_2 - 1.0) / (4.0 * SQRT_2);
                    c1 * (e(FRAC_PI_2)? - e(-FRAC_PI_2)?) - c2 * (e(3.0 * FRAC_PI_2)? - e(-3.0 * FRAC_PI_2)?)
                } else {
                    0.5 * (e(FRAC_PI_2)? - e(-FRAC_PI_2)?)
                };
                total += scale * d;
            }
        }
        prefix.apply_gate(g, theta);
    }
    Ok(total)
}

/// Gradient with respect to a named parameter.
pub fn gradient(
    h: &QubitOperator,
    circuit: &ParameterizedCircuit,
    reference: &StateVector,
    values: &Assignment,
    param: &str,
) -> Result<f64, VqeError> {
    let index = circuit.param_index(param).ok_or_else(|| VqeError::UnknownParameter(param.to_string()))?;
    let theta = crate::sim::bind(circuit, values)?;
    gradient_at(h, circuit, reference, &theta, index)
}

pub fn full_gradient(h: &QubitOperator, circuit: &ParameterizedCircuit, reference: &StateVector, theta: &[f64]) -> Result<Vec<f64>, VqeError> {
    (0..theta.len()).into_par_iter().map(|i| gradient_at(h, circuit, reference, theta, i)).collect()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS with Armijo backtracking until `‖g‖∞ ≤ 1e-6` or 500 iterations.
pub fn minimize(h: &QubitOperator, circuit: &ParameterizedCircuit, reference: &StateVector, init: &[f64]) -> Result<VqeResult, VqeError> {
    let n = init.len();
    let mut x = init.to_vec();
    let mut e = energy(h, circuit, reference, &x)?;
    let mut g = full_gradient(h, circuit, reference, &x)?;
    let identity = |n: usize| {
        let mut m = vec![vec![0.0; n]; n];
        (0..n).for_each(|i| m[i][i] = 1.0);
        m
    };
    let mut hinv = identity(n);
    let mut iterations = 0;
    let mut fresh = true;
    while iterations < MAX_ITERATIONS && inf_norm(&g) > GRADIENT_TOLERANCE {
        iterations += 1;
        let mut p: Vec<f64> = (0..n).map(|i| -dot(&hinv[i], &g)).collect();
        if dot(&p, &g) >= 0.0 {
            hinv = identity(n);
            p = g.iter().map(|v| -v).collect();
        }
        let cap = inf_norm(&p);
        if cap > MAX_STEP {
            p.iter_mut().for_each(|v| *v *= MAX_STEP / cap);
        }
        let slope = dot(&p, &g);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            let et = energy(h, circuit, reference, &trial)?;
            if et <= e + 1e-4 * alpha * slope {
                accepted = Some((trial, et));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, en)) = accepted else {
            if fresh {
                break;
            }
            hinv = identity(n);
            fresh = true;
            continue;
        };
        let gn = full_gradient(h, circuit, reference, &xn)?;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 {
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        fresh = false;
        x = xn;
        e = en;
        g = gn;
    }
    let gradient_norm = inf_norm(&g);
    let parameters = circuit.params().iter().cloned().zip(x.iter().copied()).collect();
    Ok(VqeResult { energy: e, parameters, values: x, iterations, gradient_norm, converged: gradient_norm <= GRADIENT_TOLERANCE })
}

/// `dE/dθ` at `θ = 0` for appending `exp(−iθ/2·G)` to a state: `−Im⟨Gψ|Hψ⟩`.
pub fn commutator_gradient(h_psi: &StateVector, gen: &QubitOperator, psi: &StateVector) -> Result<f64, VqeError> {
    let g_psi = apply_operator(gen, psi)?;
    Ok(-g_psi.inner(h_psi).im)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptThresholds {
    pub grad_min: f64,
    pub e_min: f64,
}

impl Default for AdaptThresholds {
    fn default() -> Self {
        Self { grad_min: 1e-3, e_min: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptCycle {
    pub cycle: usize,
    pub spec: ExcitationSpec,
    pub grad: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptTrace {
    pub reference_energy: f64,
    pub cycles: Vec<AdaptCycle>,
    pub partition: OrbitalPartition,
    pub converged: bool,
}

impl AdaptTrace {
    /// One JSON object per cycle.
    pub fn to_json_lines(&self) -> String {
        self.cycles
            .iter()
            .map(|c| json!({"cycle": c.cycle, "spec": c.spec.to_string(), "grad": c.grad, "energy": c.energy}).to_string() + "\n")
            .collect()
    }

    pub fn final_energy(&self) -> f64 {
        self.cycles.last().map_or(self.reference_energy, |c| c.energy)
    }
}

/// Fermionic: every orbital touched by a selected single or unpaired double.
pub fn partition_from_selection(n_orb: usize, selected: &[ExcitationSpec]) -> OrbitalPartition {
    let mut fermionic = vec![false; n_orb];
    for s in selected.iter().filter(|s| s.is_unpaired()) {
        for o in s.orbitals() {
            fermionic[o] = true;
        }
    }
    let f = (0..n_orb).filter(|&o| fermionic[o]).collect();
    let b = (0..n_orb).filter(|&o| !fermionic[o]).collect();
    OrbitalPartition::new(n_orb, f, b).expect("complementary sets")
}

/// ADAPT loop in the full fermionic encoding, starting from the aufbau state.
///
/// Each cycle appends the pool element with the largest |gradient| (lowest
/// index on ties) and re-optimizes all parameters from the previous optimum.
/// Stops when the largest gradient falls below `grad_min`, the energy gain of a
/// cycle falls below `e_min`, or after `max_cycles`.
pub fn adapt_select_encoding(
    ints: &IntegralSet,
    pool_kind: PoolKind,
    thresholds: AdaptThresholds,
    max_cycles: usize,
) -> Result<AdaptTrace, VqeError> {
    let n = ints.n_orb();
    let partition = OrbitalPartition::all_fermionic(n);
    let h = build_hybrid_hamiltonian(ints, &partition)?;
    let reference = reference_state(&partition, ints.n_elec(), ints.ms2())?;
    let pool = enumerate_pool(pool_kind, &partition, ints.n_elec(), None)?;
    if pool.is_empty() {
        return Err(VqeError::EmptyPool);
    }
    let generators: Vec<QubitOperator> = pool.iter().map(|s| generator(s, &partition)).collect::<Result<_, _>>()?;
    let reference_energy = expectation(&h, &reference)?;
    let mut circuit = ParameterizedCircuit::new(partition.n_qubits());
    let mut theta: Vec<f64> = Vec::new();
    let mut selected: Vec<ExcitationSpec> = Vec::new();
    let mut cycles = Vec::new();
    let mut e_prev = reference_energy;
    let mut converged = false;
    for cycle in 0..max_cycles {
        let psi = apply_circuit(&reference, &circuit, &theta)?;
        let h_psi = apply_operator(&h, &psi)?;
        let grads: Vec<f64> =
            generators.par_iter().map(|g| commutator_gradient(&h_psi, g, &psi)).collect::<Result<_, _>>()?;
        let mut best = 0;
        for (i, g) in grads.iter().enumerate() {
            if g.abs() > grads[best].abs() {
                best = i;
            }
        }
        if grads[best].abs() < thresholds.grad_min {
            converged = true;
            break;
        }
        let spec = pool[best].clone().with_param(format!("{}@{}", pool[best], cycle));
        circuit.append(&compile_optimized(&spec, &partition)?);
        theta.push(0.0);
        let result = minimize(&h, &circuit, &reference, &theta)?;
        theta = result.values;
        selected.push(spec.clone());
        cycles.push(AdaptCycle { cycle, spec, grad: grads[best].abs(), energy: result.energy });
        if e_prev - result.energy < thresholds.e_min {
            converged = true;
            break;
        }
        e_prev = result.energy;
    }
    Ok(AdaptTrace { reference_energy, cycles, partition: partition_from_selection(n, &selected), converged })
}

/// Convenience: energy of the reference with no parameters, as a [`VqeResult`].
pub fn reference_result(h: &QubitOperator, reference: &StateVector) -> Result<VqeResult, VqeError> {
    let e = expectation(h, reference)?;
    Ok(VqeResult { energy: e, parameters: Assignment::new(), values: vec![], iterations: 0, gradient_norm: 0.0, converged: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{trotter_ucc, Backend};
    use crate::pauli::PauliString;
    use num_complex::Complex64;
    use crate::sim::{ground_energy, Sector};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn flat_landscape_has_zero_gradient() {
        let p = OrbitalPartition::all_bosonic(2);
        let circ = trotter_ucc(&[ExcitationSpec::paired(0, 1)], &p, Backend::Optimized).unwrap();
        let h = QubitOperator::identity(2);
        let reference = StateVector::basis(2, 1);
        let mut values = Assignment::new();
        values.insert("p:0->1".into(), 0.3);
        assert!(gradient(&h, &circ, &reference, &values, "p:0->1").unwrap().abs() < 1e-14);
        assert!(matches!(gradient(&h, &circ, &reference, &values, "nope"), Err(VqeError::UnknownParameter(_))));
    }

    #[test]
    fn shift_rule_matches_finite_difference() {
        let ints = IntegralSet::random(3, Some(2), 4);
        let p = OrbitalPartition::from_bosonic(3, &[2]).unwrap();
        let h = build_hybrid_hamiltonian(&ints, &p).unwrap();
        let specs: Vec<ExcitationSpec> = ["0u->1u", "p:0->2", "0d,1u->2d,2u"].iter().map(|s| s.parse().unwrap()).collect();
        let reference = reference_state(&p, 2, 0).unwrap();
        for backend in [Backend::Direct, Backend::Optimized] {
            let circ = trotter_ucc(&specs, &p, backend).unwrap();
            let theta = [0.3, -0.7, 0.45];
            for i in 0..3 {
                let g = gradient_at(&h, &circ, &reference, &theta, i).unwrap();
                let step = 1e-4;
                let mut tp = theta;
                let mut tm = theta;
                tp[i] += step;
                tm[i] -= step;
                let fd = (energy(&h, &circ, &reference, &tp).unwrap() - energy(&h, &circ, &reference, &tm).unwrap()) / (2.0 * step);
                assert!((g - fd).abs() < 1e-6, "{backend:?} {i}: {g} vs {fd}");
            }
        }
    }

    #[test]
    fn commutator_gradient_matches_shift() {
        let ints = IntegralSet::random(3, Some(2), 8);
        let p = OrbitalPartition::all_fermionic(3);
        let h = build_hybrid_hamiltonian(&ints, &p).unwrap();
        let reference = reference_state(&p, 2, 0).unwrap();
        for s in ["0u->2u", "p:0->1", "0u,0d->1u,2d"] {
            let spec: ExcitationSpec = s.parse().unwrap();
            let circ = compile_optimized(&spec, &p).unwrap();
            let g = generator(&spec, &p).unwrap();
            let hpsi = apply_operator(&h, &reference).unwrap();
            let a = commutator_gradient(&hpsi, &g, &reference).unwrap();
            let b = gradient_at(&h, &circ, &reference, &[0.0], 0).unwrap();
            assert!((a - b).abs() < 1e-10, "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn zero_parameters_returns_reference() {
        let h = QubitOperator::term(1, "Z0".parse().unwrap(), c(0.5));
        let circ = ParameterizedCircuit::new(1);
        let r = minimize(&h, &circ, &StateVector::zero(1), &[]).unwrap();
        assert_eq!(r.energy, 0.5);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn variational_bound_on_random_two_qubit() {
        let h = QubitOperator::from_terms(
            2,
            [
                ("Z0".parse::<PauliString>().unwrap(), c(0.4)),
                ("X0 X1".parse().unwrap(), c(0.3)),
                ("Y0 Y1".parse().unwrap(), c(0.3)),
                ("Z1".parse().unwrap(), c(-0.2)),
            ],
        );
        let p = OrbitalPartition::all_bosonic(2);
        let circ = trotter_ucc(&[ExcitationSpec::paired(0, 1), ExcitationSpec::paired(1, 0).with_param("b")], &p, Backend::Optimized).unwrap();
        let reference = StateVector::basis(2, 1);
        let r = minimize(&h, &circ, &reference, &[0.1, 0.0]).unwrap();
        let (emin, _) = ground_energy(&h, Sector::Full).unwrap();
        assert!(r.energy >= emin - 1e-9);
        assert!(r.converged);
        let shifted = h.clone() + QubitOperator::identity(2).scale(c(1.5));
        let rs = minimize(&shifted, &circ, &reference, &[0.1, 0.0]).unwrap();
        assert!((rs.energy - r.energy - 1.5).abs() < 1e-9);
    }

    #[test]
    fn adapt_zero_cycles_is_bosonic() {
        let ints = IntegralSet::random(2, Some(2), 1);
        let trace = adapt_select_encoding(&ints, PoolKind::UpCCGSD, AdaptThresholds::default(), 0).unwrap();
        assert!(trace.cycles.is_empty());
        assert_eq!(trace.partition, OrbitalPartition::all_bosonic(2));
        assert_eq!(trace.to_json_lines(), "");
    }

    #[test]
    fn selection_rule() {
        let sel: Vec<ExcitationSpec> = ["p:0->3", "1u->2u"].iter().map(|s| s.parse().unwrap()).collect();
        let p = partition_from_selection(4, &sel);
        assert_eq!(p.fermionic(), &[1, 2]);
        assert_eq!(p.bosonic(), &[0, 3]);
    }
}
