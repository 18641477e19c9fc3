//! Statevector simulation, expectation values and sector-restricted exact
//! diagonalization.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::{Gate, ParameterizedCircuit};
use crate::encoding::{build_hybrid_hamiltonian, EncodingError, OrbitalPartition, Spin};
use crate::integrals::IntegralSet;
use crate::pauli::{Group, QubitOperator};

/// Sector dimensions up to this size are diagonalized densely.
pub const DENSE_LIMIT: usize = 1 << 10;

/// Largest sector accepted by the iterative solver.
pub const SECTOR_LIMIT: usize = 1 << 22;

/// Largest register materialized as a statevector.
pub const STATE_QUBIT_LIMIT: usize = 30;

pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("parameter `{0}` is not bound")]
    Unbound(String),
    #[error("expected {expected} parameter values, got {found}")]
    ParameterCount { expected: usize, found: usize },
    #[error("expectation has imaginary part {0:e}; operator is not Hermitian")]
    NotHermitian(f64),
    #[error("sector is empty")]
    EmptySector,
    #[error("sector dimension {0} exceeds limit {SECTOR_LIMIT}")]
    SectorTooLarge(usize),
    #[error("register of {0} qubits is too large for a statevector")]
    RegisterTooLarge(usize),
    #[error("no valid reference state: {0}")]
    Reference(String),
    #[error("iterative eigensolver stalled at residual {0:e}")]
    NotConverged(f64),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

/// Dense amplitudes over `2^n` little-endian basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct StateDoc {
    n_qubits: usize,
    amps: Vec<[f64; 2]>,
}

impl StateVector {
    pub fn basis(n_qubits: usize, index: u128) -> Self {
        assert!(n_qubits <= STATE_QUBIT_LIMIT, "register too large for a statevector");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1 << n_qubits, "amplitude count must be 2^n");
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(StateDoc { n_qubits: self.n_qubits, amps: self.amps.iter().map(|a| [a.re, a.im]).collect() })
            .expect("plain data")
    }

    pub fn from_json(value: &serde_json::Value) -> Option<Self> {
        let doc: StateDoc = serde_json::from_value(value.clone()).ok()?;
        if doc.amps.len() != 1 << doc.n_qubits {
            return None;
        }
        Some(Self { n_qubits: doc.n_qubits, amps: doc.amps.into_iter().map(|[r, i]| Complex64::new(r, i)).collect() })
    }

    fn apply_1q(&mut self, t: usize, u: [[Complex64; 2]; 2]) {
        let bit = 1 << t;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = u[0][0] * a + u[0][1] * b;
                self.amps[i | bit] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    fn apply_controlled_1q(&mut self, c: usize, t: usize, u: [[Complex64; 2]; 2]) {
        let (cb, tb) = (1 << c, 1 << t);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                let (a, b) = (self.amps[i], self.amps[i | tb]);
                self.amps[i] = u[0][0] * a + u[0][1] * b;
                self.amps[i | tb] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    /// Applies one gate with parameter values `theta`.
    pub fn apply_gate(&mut self, gate: &Gate, theta: &[f64]) {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let rot = |phi: f64| ((phi / 2.0).cos(), (phi / 2.0).sin());
        let ry = |phi: f64| {
            let (c, s) = rot(phi);
            [[one * c, -one * s], [one * s, one * c]]
        };
        match gate {
            Gate::X(t) => self.apply_1q(*t, [[z, one], [one, z]]),
            Gate::H(t) => {
                let h = one * std::f64::consts::FRAC_1_SQRT_2;
                self.apply_1q(*t, [[h, h], [h, -h]])
            }
            Gate::Rx(t, a) => {
                let (c, s) = rot(a.value(theta));
                let mi = Complex64::new(0.0, -s);
                self.apply_1q(*t, [[one * c, mi], [mi, one * c]])
            }
            Gate::Ry(t, a) => self.apply_1q(*t, ry(a.value(theta))),
            Gate::Rz(t, a) => {
                let phi = a.value(theta);
                self.apply_1q(*t, [[Complex64::from_polar(1.0, -phi / 2.0), z], [z, Complex64::from_polar(1.0, phi / 2.0)]])
            }
            Gate::Cnot { control, target } => self.apply_controlled_1q(*control, *target, [[z, one], [one, z]]),
            Gate::Cz { control, target } => self.apply_controlled_1q(*control, *target, [[one, z], [z, -one]]),
            Gate::CRy { control, target, angle } => self.apply_controlled_1q(*control, *target, ry(angle.value(theta))),
        }
    }
}

/// Parameter values by name.
pub type Assignment = BTreeMap<String, f64>;

/// Positional parameter values for `circuit` from a named assignment.
pub fn bind(circuit: &ParameterizedCircuit, values: &Assignment) -> Result<Vec<f64>, SimError> {
    circuit
        .params()
        .iter()
        .map(|p| values.get(p).copied().ok_or_else(|| SimError::Unbound(p.clone())))
        .collect()
}

/// Applies the circuit with positional parameter values.
pub fn apply_circuit(state: &StateVector, circuit: &ParameterizedCircuit, theta: &[f64]) -> Result<StateVector, SimError> {
    if state.n_qubits != circuit.n_qubits() {
        return Err(SimError::QubitMismatch(state.n_qubits, circuit.n_qubits()));
    }
    if theta.len() != circuit.params().len() {
        if let Some(p) = circuit.params().get(theta.len()) {
            return Err(SimError::Unbound(p.clone()));
        }
        return Err(SimError::ParameterCount { expected: circuit.params().len(), found: theta.len() });
    }
    let mut out = state.clone();
    for g in circuit.gates() {
        out.apply_gate(g, theta);
    }
    Ok(out)
}

pub fn apply_circuit_named(state: &StateVector, circuit: &ParameterizedCircuit, values: &Assignment) -> Result<StateVector, SimError> {
    apply_circuit(state, circuit, &bind(circuit, values)?)
}

/// Dense unitary of the circuit, column by column.
pub fn circuit_unitary(circuit: &ParameterizedCircuit, theta: &[f64]) -> Result<DMatrix<Complex64>, SimError> {
    let n = circuit.n_qubits();
    let dim = 1usize << n;
    let mut u = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let out = apply_circuit(&StateVector::basis(n, col as u128), circuit, theta)?;
        for (row, a) in out.amps.iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}

/// `exp(−i·t·G)` for a Hermitian `G`.
pub fn exp_hermitian(g: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(g.clone());
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -t * l)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Largest entrywise modulus of `a − b`.
pub fn max_entry_difference(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `op |state⟩` without materializing the operator.
pub fn apply_operator(op: &QubitOperator, state: &StateVector) -> Result<StateVector, SimError> {
    if op.n_qubits() > state.n_qubits {
        return Err(SimError::QubitMismatch(op.n_qubits(), state.n_qubits));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    for (p, c) in op.iter() {
        for (x, a) in state.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (phase, y) = p.apply_to_basis(x as u128);
            out[y as usize] += c * phase * a;
        }
    }
    Ok(StateVector { n_qubits: state.n_qubits, amps: out })
}

fn complex_expectation(op: &QubitOperator, state: &StateVector) -> Result<Complex64, SimError> {
    if op.n_qubits() > state.n_qubits {
        return Err(SimError::QubitMismatch(op.n_qubits(), state.n_qubits));
    }
    let terms: Vec<_> = op.iter().map(|(p, c)| (*p, *c)).collect();
    let parts: Vec<Complex64> = terms
        .par_iter()
        .map(|(p, c)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, a) in state.amps.iter().enumerate() {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let (phase, y) = p.apply_to_basis(x as u128);
                acc += state.amps[y as usize].conj() * phase * a;
            }
            c * acc
        })
        .collect();
    Ok(pairwise_sum(&parts))
}

/// Tree summation, independent of thread scheduling.
fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// `⟨state|op|state⟩` for a Hermitian operator.
pub fn expectation(op: &QubitOperator, state: &StateVector) -> Result<f64, SimError> {
    let e = complex_expectation(op, state)?;
    let scale = 1.0 + e.re.abs();
    if e.im.abs() > 1e-10 * scale {
        return Err(SimError::NotHermitian(e.im));
    }
    Ok(e.re)
}

/// Expectation assembled group by group, plus the identity coefficient.
pub fn grouped_expectation(groups: &[Group], identity: f64, state: &StateVector) -> Result<f64, SimError> {
    let mut total = identity;
    for g in groups {
        let op = QubitOperator::from_terms(state.n_qubits, g.iter().copied());
        total += expectation(&op, state)?;
    }
    Ok(total)
}

/// Hybrid occupation patterns with fixed electron number and fermionic `2Sz`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    partition: OrbitalPartition,
    n_elec: usize,
    ms2: i32,
    states: Vec<u128>,
}

/// All `k`-subsets of `0..n` as bit masks in ascending order.
fn subsets(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return vec![];
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut x: u64 = (1u64 << k) - 1;
    let limit = 1u64.checked_shl(n as u32).unwrap_or(0);
    loop {
        if limit != 0 && x >= limit {
            break;
        }
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        if r == 0 {
            break;
        }
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

fn spread(mask: u64, positions: &[usize]) -> u128 {
    positions.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &q)| 1u128 << q).sum()
}

impl SectorBasis {
    pub fn new(partition: &OrbitalPartition, n_elec: usize, ms2: i32) -> Self {
        let nf = partition.fermionic().len();
        let nb = partition.bosonic().len();
        let up: Vec<usize> = (0..nf).map(|p| 2 * p).collect();
        let down: Vec<usize> = (0..nf).map(|p| 2 * p + 1).collect();
        let bos: Vec<usize> = (0..nb).map(|q| 2 * nf + q).collect();
        let mut states = Vec::new();
        for pairs in 0..=nb.min(n_elec / 2) {
            let rest = n_elec - 2 * pairs;
            let twice_up = rest as i64 + ms2 as i64;
            if twice_up < 0 || twice_up % 2 != 0 {
                continue;
            }
            let n_up = (twice_up / 2) as usize;
            if n_up > rest || n_up > nf || rest - n_up > nf {
                continue;
            }
            let ups = subsets(nf, n_up);
            let downs = subsets(nf, rest - n_up);
            for b in subsets(nb, pairs) {
                let bb = spread(b, &bos);
                for &u in &ups {
                    let uu = spread(u, &up);
                    for &d in &downs {
                        states.push(bb | uu | spread(d, &down));
                    }
                }
            }
        }
        states.sort_unstable();
        Self { partition: partition.clone(), n_elec, ms2, states }
    }

    pub fn partition(&self) -> &OrbitalPartition {
        &self.partition
    }

    pub fn n_elec(&self) -> usize {
        self.n_elec
    }

    pub fn ms2(&self) -> i32 {
        self.ms2
    }

    pub fn states(&self) -> &[u128] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: u128) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }
}

/// Aufbau filling: electron pairs occupy the lowest orbitals, then `|ms2|`
/// unpaired electrons (up if `ms2 > 0`) occupy the next fermionic orbitals.
pub fn reference_bits(partition: &OrbitalPartition, n_elec: usize, ms2: i32) -> Result<u128, SimError> {
    let unpaired = ms2.unsigned_abs() as usize;
    if unpaired > n_elec || !(n_elec - unpaired).is_multiple_of(2) {
        return Err(SimError::Reference(format!("ms2={ms2} incompatible with {n_elec} electrons")));
    }
    let pairs = (n_elec - unpaired) / 2;
    if pairs + unpaired > partition.n_orb() {
        return Err(SimError::Reference(format!("{n_elec} electrons do not fit")));
    }
    let mut bits = 0u128;
    for o in 0..pairs {
        if partition.is_bosonic(o) {
            bits |= 1 << partition.boson_qubit(o)?;
        } else {
            bits |= 1 << partition.spin_orbital_qubit(o, Spin::Up)?;
            bits |= 1 << partition.spin_orbital_qubit(o, Spin::Down)?;
        }
    }
    let spin = if ms2 > 0 { Spin::Up } else { Spin::Down };
    for o in pairs..pairs + unpaired {
        if partition.is_bosonic(o) {
            return Err(SimError::Reference(format!("unpaired electron would occupy bosonic orbital {o}")));
        }
        bits |= 1 << partition.spin_orbital_qubit(o, spin)?;
    }
    Ok(bits)
}

pub fn reference_state(partition: &OrbitalPartition, n_elec: usize, ms2: i32) -> Result<StateVector, SimError> {
    let bits = reference_bits(partition, n_elec, ms2)?;
    if partition.n_qubits() > STATE_QUBIT_LIMIT {
        return Err(SimError::RegisterTooLarge(partition.n_qubits()));
    }
    Ok(StateVector::basis(partition.n_qubits(), bits))
}

#[derive(Debug, Clone, Copy)]
pub enum Sector<'a> {
    Full,
    Basis(&'a SectorBasis),
}

/// Sparse matrix of `op` in a sorted basis, with the norm of the part that leaks out of it.
pub struct SectorMatrix {
    pub rows: Vec<Vec<(usize, Complex64)>>,
    pub leakage: f64,
}

pub fn sector_matrix(op: &QubitOperator, states: &[u128]) -> SectorMatrix {
    let cols: Vec<(Vec<(usize, Complex64)>, f64)> = states
        .par_iter()
        .map(|&x| {
            let mut out: BTreeMap<u128, Complex64> = BTreeMap::new();
            for (p, c) in op.iter() {
                let (phase, y) = p.apply_to_basis(x);
                *out.entry(y).or_default() += c * phase;
            }
            let mut col = Vec::new();
            let mut leak = 0.0;
            for (y, a) in out {
                if a.norm() < 1e-14 {
                    continue;
                }
                match states.binary_search(&y) {
                    Ok(i) => col.push((i, a)),
                    Err(_) => leak += a.norm_sqr(),
                }
            }
            (col, leak)
        })
        .collect();
    // the operator is Hermitian, so column j read as row j gives conj entries
    let leakage = cols.iter().map(|c| c.1).sum::<f64>().sqrt();
    let rows = cols.into_iter().map(|(col, _)| col.into_iter().map(|(i, a)| (i, a.conj())).collect()).collect();
    SectorMatrix { rows, leakage }
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.rows.par_iter().map(|row| row.iter().map(|(j, a)| a * v[*j]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, a) in row {
                m[(i, *j)] += a;
            }
        }
        m
    }
}

/// Lowest eigenpair of an operator within a basis.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub residual: f64,
    pub n_qubits: usize,
    pub basis: Vec<u128>,
    pub amplitudes: Vec<Complex64>,
}

impl GroundState {
    pub fn state_vector(&self) -> Result<StateVector, SimError> {
        if self.n_qubits > STATE_QUBIT_LIMIT {
            return Err(SimError::RegisterTooLarge(self.n_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.n_qubits];
        for (x, a) in self.basis.iter().zip(&self.amplitudes) {
            amps[*x as usize] = *a;
        }
        Ok(StateVector { n_qubits: self.n_qubits, amps })
    }
}

/// Global phase making the largest amplitude (lowest index on ties) real positive.
fn normalize_phase(v: &mut [Complex64]) {
    let mut best = 0;
    for (i, a) in v.iter().enumerate() {
        if a.norm() > v[best].norm() + 1e-10 {
            best = i;
        }
    }
    let r = v[best].norm();
    if r > 0.0 {
        let phase = v[best].conj() / r;
        for a in v.iter_mut() {
            *a *= phase;
        }
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn residual(m: &SectorMatrix, v: &[Complex64], e: f64) -> f64 {
    let hv = m.apply(v);
    hv.iter().zip(v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted Lanczos with full reorthogonalization.
fn lanczos(m: &SectorMatrix) -> Result<(f64, Vec<Complex64>), SimError> {
    let n = m.dim();
    let krylov = 80.min(n);
    let mut start: Vec<Complex64> =
        (0..n).map(|i| Complex64::new(1.0 + 0.25 * ((i as f64) * 0.618_033_988_75).fract(), 0.0)).collect();
    let mut last_res = f64::INFINITY;
    for _restart in 0..200 {
        let nrm = vec_norm(&start);
        let mut basis: Vec<Vec<Complex64>> = vec![start.iter().map(|a| a / nrm).collect()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for k in 0..krylov {
            let mut w = m.apply(&basis[k]);
            let a: Complex64 = basis[k].iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            alpha.push(a.re);
            for _ in 0..2 {
                for b in &basis {
                    let proj: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= proj * bi;
                    }
                }
            }
            let bnorm = vec_norm(&w);
            if k + 1 == krylov || bnorm < 1e-12 {
                break;
            }
            beta.push(bnorm);
            basis.push(w.into_iter().map(|x| x / bnorm).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imin, &e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
            .expect("nonempty");
        let y = eig.eigenvectors.column(imin);
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for (j, b) in basis.iter().take(k).enumerate() {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += bi * y[j];
            }
        }
        let nv = vec_norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let res = residual(m, &v, e);
        if res <= RESIDUAL_TOLERANCE {
            return Ok((e, v));
        }
        last_res = res;
        start = v;
    }
    Err(SimError::NotConverged(last_res))
}

/// Dense below [`DENSE_LIMIT`], restarted Lanczos above.
pub fn ground_state(op: &QubitOperator, sector: Sector<'_>) -> Result<GroundState, SimError> {
    let (states, n_qubits) = match sector {
        Sector::Full => {
            if op.n_qubits() > STATE_QUBIT_LIMIT.min(22) {
                return Err(SimError::SectorTooLarge(1 << op.n_qubits().min(62)));
            }
            ((0..1u128 << op.n_qubits()).collect::<Vec<_>>(), op.n_qubits())
        }
        Sector::Basis(b) => {
            if op.n_qubits() > b.partition.n_qubits() {
                return Err(SimError::QubitMismatch(op.n_qubits(), b.partition.n_qubits()));
            }
            (b.states.clone(), b.partition.n_qubits())
        }
    };
    if states.is_empty() {
        return Err(SimError::EmptySector);
    }
    if states.len() > SECTOR_LIMIT {
        return Err(SimError::SectorTooLarge(states.len()));
    }
    let m = sector_matrix(op, &states);
    let (energy, mut v) = if m.dim() <= DENSE_LIMIT {
        let eig = SymmetricEigen::new(m.to_dense());
        let (imin, &e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
            .expect("nonempty");
        (e, eig.eigenvectors.column(imin).iter().copied().collect::<Vec<_>>())
    } else {
        lanczos(&m)?
    };
    normalize_phase(&mut v);
    let res = residual(&m, &v, energy);
    Ok(GroundState { energy, residual: res, n_qubits, basis: states, amplitudes: v })
}

/// Lowest eigenvalue and eigenvector.
pub fn ground_energy(op: &QubitOperator, sector: Sector<'_>) -> Result<(f64, StateVector), SimError> {
    let gs = ground_state(op, sector)?;
    Ok((gs.energy, gs.state_vector()?))
}

/// Lowest eigenvalue of a dense Hermitian matrix.
pub fn dense_min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Hybrid-FCI energy of one partition in the integrals' electron sector.
/// `+∞` when the sector is empty (e.g. an odd electron count with no fermionic orbital).
pub fn hybrid_fci_energy(ints: &IntegralSet, partition: &OrbitalPartition) -> Result<f64, SimError> {
    let basis = SectorBasis::new(partition, ints.n_elec(), ints.ms2());
    if basis.is_empty() {
        return Ok(f64::INFINITY);
    }
    let h = build_hybrid_hamiltonian(ints, partition)?;
    Ok(ground_state(&h, Sector::Basis(&basis))?.energy)
}

/// For `k = n_orb … 0`: the first `k` orbitals of `order` fermionic, the rest bosonic.
pub fn hybrid_fci_scan(ints: &IntegralSet, order: &[usize]) -> Result<Vec<(usize, f64)>, SimError> {
    let n = ints.n_orb();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(SimError::Encoding(EncodingError::InvalidPartition(format!("{order:?} is not an orbital order"))));
    }
    (0..=n)
        .rev()
        .map(|k| {
            let p = OrbitalPartition::new(n, order[..k].to_vec(), order[k..].to_vec())?;
            Ok((k, hybrid_fci_energy(ints, &p)?))
        })
        .collect()
}
