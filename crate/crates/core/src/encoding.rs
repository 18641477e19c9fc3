//! Qubit Hamiltonians for the Jordan-Wigner, hard-core-boson and hybrid encodings.
//!
//! The hybrid register holds the fermionic block first: fermionic orbital at
//! position `p` of `F` owns qubits `2p` (up) and `2p+1` (down). Bosonic orbital
//! at position `q` of `B` owns qubit `2|F| + q`. Parity strings never leave the
//! fermionic block.
//!
//! A boson is a spin pair, `b† = a†↑ a†↓` and `b = a↓ a↑`.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrals::IntegralSet;
use crate::pauli::{PauliString, QubitOperator, StableHashMap};

/// Below this magnitude an integral contributes nothing to a Hamiltonian.
const INTEGRAL_CUTOFF: f64 = 1e-14;

/// Oracle guard: qubits of the full Jordan-Wigner register.
pub const ORACLE_MAX_QUBITS: usize = 14;

#[derive(Debug, Error, PartialEq)]
pub enum EncodingError {
    #[error("orbital {orbital} is not {expected}")]
    WrongSubspace { orbital: usize, expected: &'static str },
    #[error("orbital {orbital} is bosonic but carries an odd number of spin factors")]
    UnpairedBosonicSpin { orbital: usize },
    #[error("spin sign needs opposite spins")]
    EqualSpins,
    #[error("orbital {0} out of range")]
    OrbitalOutOfRange(usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partition covers {partition} orbitals but integrals have {integrals}")]
    SizeMismatch { partition: usize, integrals: usize },
    #[error("oracle needs {0} qubits, limit is {ORACLE_MAX_QUBITS}")]
    OracleTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "u",
            Spin::Down => "d",
        })
    }
}

/// `σk − σl` with up = +½ and down = −½.
pub fn spin_sign(sigma_k: Spin, sigma_l: Spin) -> Result<i32, EncodingError> {
    match (sigma_k, sigma_l) {
        (Spin::Up, Spin::Down) => Ok(1),
        (Spin::Down, Spin::Up) => Ok(-1),
        _ => Err(EncodingError::EqualSpins),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Fermion(Spin),
    Boson,
}

/// One creation or annihilation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LadderFactor {
    pub orbital: usize,
    pub mode: Mode,
    pub dagger: bool,
}

impl LadderFactor {
    pub fn create(orbital: usize, spin: Spin) -> Self {
        Self { orbital, mode: Mode::Fermion(spin), dagger: true }
    }

    pub fn annihilate(orbital: usize, spin: Spin) -> Self {
        Self { orbital, mode: Mode::Fermion(spin), dagger: false }
    }

    pub fn boson_create(orbital: usize) -> Self {
        Self { orbital, mode: Mode::Boson, dagger: true }
    }

    pub fn boson_annihilate(orbital: usize) -> Self {
        Self { orbital, mode: Mode::Boson, dagger: false }
    }

    pub fn adjoint(self) -> Self {
        Self { dagger: !self.dagger, ..self }
    }
}

/// Coefficient times an ordered product of ladder operators.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderTerm {
    pub factors: Vec<LadderFactor>,
    pub coefficient: Complex64,
}

impl LadderTerm {
    pub fn new(factors: Vec<LadderFactor>, coefficient: f64) -> Self {
        Self { factors, coefficient: Complex64::new(coefficient, 0.0) }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            factors: self.factors.iter().rev().map(|f| f.adjoint()).collect(),
            coefficient: self.coefficient.conj(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Fermionic(usize),
    Bosonic(usize),
}

/// Disjoint fermionic and bosonic orbital sets covering `0..n_orb`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitalPartition {
    n_orb: usize,
    fermionic: Vec<usize>,
    bosonic: Vec<usize>,
    slots: Vec<Slot>,
}

impl OrbitalPartition {
    /// Ordered sets; positions within each set fix the qubit layout.
    pub fn new(n_orb: usize, fermionic: Vec<usize>, bosonic: Vec<usize>) -> Result<Self, EncodingError> {
        let mut slots = vec![None; n_orb];
        for (pos, &o) in fermionic.iter().enumerate() {
            let slot = slots.get_mut(o).ok_or(EncodingError::OrbitalOutOfRange(o))?;
            if slot.is_some() {
                return Err(EncodingError::InvalidPartition(format!("orbital {o} listed twice")));
            }
            *slot = Some(Slot::Fermionic(pos));
        }
        for (pos, &o) in bosonic.iter().enumerate() {
            let slot = slots.get_mut(o).ok_or(EncodingError::OrbitalOutOfRange(o))?;
            if slot.is_some() {
                return Err(EncodingError::InvalidPartition(format!("orbital {o} listed twice")));
            }
            *slot = Some(Slot::Bosonic(pos));
        }
        let slots = slots
            .into_iter()
            .enumerate()
            .map(|(o, s)| s.ok_or_else(|| EncodingError::InvalidPartition(format!("orbital {o} unassigned"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { n_orb, fermionic, bosonic, slots })
    }

    /// `B` in the given order, `F` the ascending complement.
    pub fn from_bosonic(n_orb: usize, bosonic: &[usize]) -> Result<Self, EncodingError> {
        let fermionic = (0..n_orb).filter(|o| !bosonic.contains(o)).collect();
        Self::new(n_orb, fermionic, bosonic.to_vec())
    }

    pub fn all_fermionic(n_orb: usize) -> Self {
        Self::new(n_orb, (0..n_orb).collect(), vec![]).expect("trivial partition")
    }

    pub fn all_bosonic(n_orb: usize) -> Self {
        Self::new(n_orb, vec![], (0..n_orb).collect()).expect("trivial partition")
    }

    /// Every partition of `n_orb` orbitals, indexed by the bosonic bit mask.
    pub fn enumerate_all(n_orb: usize) -> Vec<Self> {
        (0..1usize << n_orb)
            .map(|mask| {
                let b: Vec<usize> = (0..n_orb).filter(|o| mask >> o & 1 == 1).collect();
                Self::from_bosonic(n_orb, &b).expect("mask partition")
            })
            .collect()
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }

    pub fn fermionic(&self) -> &[usize] {
        &self.fermionic
    }

    pub fn bosonic(&self) -> &[usize] {
        &self.bosonic
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.fermionic.len() + self.bosonic.len()
    }

    pub fn fermionic_qubits(&self) -> usize {
        2 * self.fermionic.len()
    }

    pub fn is_fermionic(&self, orbital: usize) -> bool {
        matches!(self.slots.get(orbital), Some(Slot::Fermionic(_)))
    }

    pub fn is_bosonic(&self, orbital: usize) -> bool {
        matches!(self.slots.get(orbital), Some(Slot::Bosonic(_)))
    }

    /// Qubit of a fermionic spin-orbital.
    pub fn spin_orbital_qubit(&self, orbital: usize, spin: Spin) -> Result<usize, EncodingError> {
        match self.slots.get(orbital) {
            Some(Slot::Fermionic(p)) => Ok(2 * p + spin.offset()),
            Some(Slot::Bosonic(_)) => Err(EncodingError::WrongSubspace { orbital, expected: "fermionic" }),
            None => Err(EncodingError::OrbitalOutOfRange(orbital)),
        }
    }

    /// Qubit of a bosonic orbital.
    pub fn boson_qubit(&self, orbital: usize) -> Result<usize, EncodingError> {
        match self.slots.get(orbital) {
            Some(Slot::Bosonic(q)) => Ok(self.fermionic_qubits() + q),
            Some(Slot::Fermionic(_)) => Err(EncodingError::WrongSubspace { orbital, expected: "bosonic" }),
            None => Err(EncodingError::OrbitalOutOfRange(orbital)),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"n_orb": self.n_orb, "bosonic": self.bosonic})
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, EncodingError> {
        #[derive(Deserialize)]
        struct Doc {
            n_orb: usize,
            bosonic: Vec<usize>,
        }
        let doc: Doc = serde_json::from_value(value.clone())
            .map_err(|e| EncodingError::InvalidPartition(e.to_string()))?;
        Self::from_bosonic(doc.n_orb, &doc.bosonic)
    }

    fn check_size(&self, ints: &IntegralSet) -> Result<(), EncodingError> {
        if self.n_orb != ints.n_orb() {
            return Err(EncodingError::SizeMismatch { partition: self.n_orb, integrals: ints.n_orb() });
        }
        Ok(())
    }
}

type Expansion = Vec<(PauliString, Complex64)>;

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `a = Z_{<q} ½(X + iY)` and `a† = Z_{<q} ½(X − iY)` on qubit `q`.
#[inline]
fn fermion_factor(qubit: usize, dagger: bool) -> [(PauliString, Complex64); 2] {
    let bit = 1u128 << qubit;
    let string = bit - 1;
    let x = PauliString::from_masks(bit, string);
    let y = PauliString::from_masks(bit, string | bit);
    let im = if dagger { -0.5 } else { 0.5 };
    [(x, cplx(0.5, 0.0)), (y, cplx(0.0, im))]
}

/// Multiplies out a product of two-term factors into `acc`.
#[inline]
fn accumulate_product(
    factors: &[[(PauliString, Complex64); 2]],
    coeff: Complex64,
    acc: &mut StableHashMap<PauliString, Complex64>,
) {
    for choice in 0..1usize << factors.len() {
        let mut p = PauliString::IDENTITY;
        let mut c = coeff;
        for (k, f) in factors.iter().enumerate() {
            let (fp, fc) = f[choice >> k & 1];
            let (phase, prod) = p.mul_with_phase(&fp);
            p = prod;
            c *= fc * crate::pauli::i_pow(phase);
        }
        *acc.entry(p).or_default() += c;
    }
}

/// Local 4×4 matrix of a spin-orbital operator on one spatial orbital
/// (bit 0 = up, bit 1 = down, local parity string on the up mode).
fn local_matrix(spin: Spin, dagger: bool) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for s in 0..4usize {
        let bit = 1 << spin.offset();
        let occupied = s & bit != 0;
        if occupied == dagger {
            continue;
        }
        let sign = if spin == Spin::Down && s & 1 == 1 { -1.0 } else { 1.0 };
        m[s ^ bit][s] = sign;
    }
    m
}

fn matmul4(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Restriction of a product of spin-orbital operators on a bosonic orbital to
/// the pair subspace `{|00⟩, |11⟩}`, written on the orbital's qubit.
fn boson_block(ops: &[(Spin, bool)], qubit: usize) -> Expansion {
    let mut m = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    for &(spin, dagger) in ops {
        m = matmul4(&m, &local_matrix(spin, dagger));
    }
    let (empty, full, raise, lower) = (m[0][0], m[3][3], m[3][0], m[0][3]);
    let z = PauliString::from_masks(0, 1u128 << qubit);
    let x = PauliString::from_masks(1u128 << qubit, 0);
    let y = PauliString::from_masks(1u128 << qubit, 1u128 << qubit);
    let terms = [
        (PauliString::IDENTITY, cplx(0.5 * (empty + full), 0.0)),
        (z, cplx(0.5 * (empty - full), 0.0)),
        (x, cplx(0.5 * (raise + lower), 0.0)),
        (y, cplx(0.0, 0.5 * (lower - raise))),
    ];
    terms.into_iter().filter(|(_, c)| c.norm() > 0.0).collect()
}

fn multiply_expansions(a: &Expansion, b: &Expansion) -> Expansion {
    let mut acc: StableHashMap<PauliString, Complex64> = StableHashMap::default();
    for (pa, ca) in a {
        for (pb, cb) in b {
            let (phase, p) = pa.mul_with_phase(pb);
            *acc.entry(p).or_default() += ca * cb * crate::pauli::i_pow(phase);
        }
    }
    let mut v: Expansion = acc.into_iter().collect();
    v.sort_by_key(|x| x.0);
    v
}

/// Pauli expansion of one ladder term under `partition` (unsimplified).
fn ladder_expansion(term: &LadderTerm, partition: &OrbitalPartition) -> Result<Expansion, EncodingError> {
    // spin-level factors with a group key: 0 for the fermionic block, 1 + position for bosonic orbitals
    let mut ops: Vec<(usize, usize, Spin, bool)> = Vec::new();
    for f in &term.factors {
        let slot = *partition.slots.get(f.orbital).ok_or(EncodingError::OrbitalOutOfRange(f.orbital))?;
        let key = match slot {
            Slot::Fermionic(_) => 0,
            Slot::Bosonic(q) => q + 1,
        };
        match f.mode {
            Mode::Fermion(spin) => ops.push((key, f.orbital, spin, f.dagger)),
            Mode::Boson => {
                if key == 0 {
                    return Err(EncodingError::WrongSubspace { orbital: f.orbital, expected: "bosonic" });
                }
                let pair = if f.dagger { [Spin::Up, Spin::Down] } else { [Spin::Down, Spin::Up] };
                for spin in pair {
                    ops.push((key, f.orbital, spin, f.dagger));
                }
            }
        }
    }
    let mut inversions = 0usize;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            if ops[i].0 > ops[j].0 {
                inversions += 1;
            }
        }
    }
    let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };

    let fermionic: Vec<[(PauliString, Complex64); 2]> = ops
        .iter()
        .filter(|o| o.0 == 0)
        .map(|&(_, orb, spin, dagger)| {
            let q = partition.spin_orbital_qubit(orb, spin).expect("fermionic slot");
            fermion_factor(q, dagger)
        })
        .collect();
    let mut acc = StableHashMap::default();
    accumulate_product(&fermionic, term.coefficient * sign, &mut acc);
    let mut out: Expansion = acc.into_iter().collect();
    out.sort_by_key(|x| x.0);

    let mut keys: Vec<usize> = ops.iter().map(|o| o.0).filter(|&k| k > 0).collect();
    keys.sort_unstable();
    keys.dedup();
    for key in keys {
        let group: Vec<(Spin, bool)> = ops.iter().filter(|o| o.0 == key).map(|o| (o.2, o.3)).collect();
        let orbital = partition.bosonic[key - 1];
        if group.len() % 2 == 1 {
            return Err(EncodingError::UnpairedBosonicSpin { orbital });
        }
        let block = boson_block(&group, partition.fermionic_qubits() + key - 1);
        out = multiply_expansions(&out, &block);
    }
    Ok(out)
}

/// Encodes a ladder term in the hybrid register.
///
/// Spin-orbital factors on a bosonic orbital are allowed when they come in
/// pairs; the product is restricted to the orbital's empty and doubly occupied
/// states.
pub fn jw_ladder(term: &LadderTerm, partition: &OrbitalPartition) -> Result<QubitOperator, EncodingError> {
    let terms = ladder_expansion(term, partition)?;
    Ok(QubitOperator::from_terms(partition.n_qubits(), terms).simplified())
}

/// Sum of ladder terms, encoded and simplified.
pub fn encode_terms(terms: &[LadderTerm], partition: &OrbitalPartition) -> Result<QubitOperator, EncodingError> {
    let mut acc: StableHashMap<PauliString, Complex64> = StableHashMap::default();
    for t in terms {
        for (p, c) in ladder_expansion(t, partition)? {
            *acc.entry(p).or_default() += c;
        }
    }
    Ok(QubitOperator::from_accumulator(partition.n_qubits(), acc))
}

/// Every term of the electronic Hamiltonian as ladder products.
pub fn electronic_ladder_terms(ints: &IntegralSet) -> Vec<LadderTerm> {
    let n = ints.n_orb();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let h = ints.h(i, j);
            if h.abs() <= INTEGRAL_CUTOFF {
                continue;
            }
            for s in Spin::BOTH {
                terms.push(LadderTerm::new(vec![LadderFactor::create(i, s), LadderFactor::annihilate(j, s)], h));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let g = ints.g(i, j, k, l);
                    if g.abs() <= INTEGRAL_CUTOFF {
                        continue;
                    }
                    for s in Spin::BOTH {
                        for t in Spin::BOTH {
                            terms.push(LadderTerm::new(
                                vec![
                                    LadderFactor::create(i, s),
                                    LadderFactor::create(j, t),
                                    LadderFactor::annihilate(k, t),
                                    LadderFactor::annihilate(l, s),
                                ],
                                0.5 * g,
                            ));
                        }
                    }
                }
            }
        }
    }
    terms
}

/// Full Jordan-Wigner Hamiltonian on `2·n_orb` qubits, term by term.
pub fn build_jw_hamiltonian(ints: &IntegralSet) -> QubitOperator {
    let partition = OrbitalPartition::all_fermionic(ints.n_orb());
    let mut op = encode_terms(&electronic_ladder_terms(ints), &partition).expect("all orbitals fermionic");
    op.add_term(PauliString::IDENTITY, cplx(ints.core(), 0.0));
    op.simplified()
}

/// Pure hard-core-boson Hamiltonian on `n_orb` qubits, written directly in Pauli form.
pub fn build_hcb_hamiltonian(ints: &IntegralSet) -> QubitOperator {
    let n = ints.n_orb();
    let mut op = QubitOperator::zero(n);
    let id = PauliString::IDENTITY;
    let z = |i: usize| PauliString::z_mask(1u128 << i);
    op.add_term(id, cplx(ints.core(), 0.0));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                // occupation: (g_ii^ii + 2h_ii) ½(1 − Z)
                let c = ints.g(i, i, i, i) + 2.0 * ints.h(i, i);
                op.add_term(id, cplx(0.5 * c, 0.0));
                op.add_term(z(i), cplx(-0.5 * c, 0.0));
                continue;
            }
            // hopping b†_i b_j + h.c. gives ½c (XX + YY) per unordered pair
            if i < j {
                let c = ints.g(i, i, j, j);
                let xx = PauliString::from_masks(1u128 << i | 1u128 << j, 0);
                let yy = PauliString::from_masks(1u128 << i | 1u128 << j, 1u128 << i | 1u128 << j);
                op.add_term(xx, cplx(0.5 * c, 0.0));
                op.add_term(yy, cplx(0.5 * c, 0.0));
            }
            // density: c N_i N_j = ¼c (1 − Z_i − Z_j + Z_i Z_j)
            let c = 2.0 * ints.g(j, i, i, j) - ints.g(j, i, j, i);
            op.add_term(id, cplx(0.25 * c, 0.0));
            op.add_term(z(i), cplx(-0.25 * c, 0.0));
            op.add_term(z(j), cplx(-0.25 * c, 0.0));
            op.add_term(PauliString::z_mask(1u128 << i | 1u128 << j), cplx(0.25 * c, 0.0));
        }
    }
    op.simplified()
}

/// The three blocks of the hybrid Hamiltonian plus the constant.
#[derive(Debug, Clone)]
pub struct HybridParts {
    pub fermionic: QubitOperator,
    pub bosonic: QubitOperator,
    pub interaction: QubitOperator,
    pub core: f64,
}

impl HybridParts {
    pub fn total(&self) -> QubitOperator {
        let mut op = self.fermionic.clone() + self.bosonic.clone() + self.interaction.clone();
        op.add_term(PauliString::IDENTITY, cplx(self.core, 0.0));
        op.simplified()
    }
}

/// Fermionic block: the electronic Hamiltonian restricted to `F`.
fn fermionic_block(ints: &IntegralSet, partition: &OrbitalPartition) -> QubitOperator {
    let f = partition.fermionic();
    let nq = partition.n_qubits();
    let qubit = |p: usize, s: Spin| 2 * p + s.offset();
    let mut acc: StableHashMap<PauliString, Complex64> = StableHashMap::default();
    for (pi, &i) in f.iter().enumerate() {
        for (pj, &j) in f.iter().enumerate() {
            let h = ints.h(i, j);
            if h.abs() <= INTEGRAL_CUTOFF {
                continue;
            }
            for s in Spin::BOTH {
                let factors = [fermion_factor(qubit(pi, s), true), fermion_factor(qubit(pj, s), false)];
                accumulate_product(&factors, cplx(h, 0.0), &mut acc);
            }
        }
    }
    // one chunk per leading index, merged in order
    let chunks: Vec<StableHashMap<PauliString, Complex64>> = (0..f.len())
        .into_par_iter()
        .map(|pi| {
            let i = f[pi];
            let mut acc: StableHashMap<PauliString, Complex64> = StableHashMap::default();
            for (pj, &j) in f.iter().enumerate() {
                for (pk, &k) in f.iter().enumerate() {
                    for (pl, &l) in f.iter().enumerate() {
                        let g = ints.g(i, j, k, l);
                        if g.abs() <= INTEGRAL_CUTOFF {
                            continue;
                        }
                        for s in Spin::BOTH {
                            for t in Spin::BOTH {
                                if (pi == pj && s == t) || (pk == pl && s == t) {
                                    continue;
                                }
                                let factors = [
                                    fermion_factor(qubit(pi, s), true),
                                    fermion_factor(qubit(pj, t), true),
                                    fermion_factor(qubit(pk, t), false),
                                    fermion_factor(qubit(pl, s), false),
                                ];
                                accumulate_product(&factors, cplx(0.5 * g, 0.0), &mut acc);
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();
    for chunk in chunks {
        for (p, c) in chunk {
            *acc.entry(p).or_default() += c;
        }
    }
    QubitOperator::from_accumulator(nq, acc)
}

/// Bosonic block: pair hopping and pair density couplings within `B`.
fn bosonic_terms(ints: &IntegralSet, partition: &OrbitalPartition) -> Vec<LadderTerm> {
    let mut terms = Vec::new();
    let b = partition.bosonic();
    for &i in b {
        for &j in b {
            let hop = ints.g(i, i, j, j) + if i == j { 2.0 * ints.h(i, i) } else { 0.0 };
            terms.push(LadderTerm::new(vec![LadderFactor::boson_create(i), LadderFactor::boson_annihilate(j)], hop));
            if i != j {
                let density = 2.0 * ints.g(j, i, i, j) - ints.g(j, i, j, i);
                terms.push(LadderTerm::new(
                    vec![
                        LadderFactor::boson_create(i),
                        LadderFactor::boson_annihilate(i),
                        LadderFactor::boson_create(j),
                        LadderFactor::boson_annihilate(j),
                    ],
                    density,
                ));
            }
        }
    }
    terms.retain(|t| t.coefficient.norm() > INTEGRAL_CUTOFF);
    terms
}

/// Interaction block: pair transfer between `B` and `F`, and `B` occupations
/// dressing `F` one-body hops.
fn interaction_terms(ints: &IntegralSet, partition: &OrbitalPartition) -> Vec<LadderTerm> {
    let mut terms = Vec::new();
    for &i in partition.bosonic() {
        for &k in partition.fermionic() {
            for &l in partition.fermionic() {
                for sk in Spin::BOTH {
                    let sl = sk.flip();
                    let s = spin_sign(sk, sl).expect("opposite spins") as f64;
                    terms.push(LadderTerm::new(
                        vec![
                            LadderFactor::boson_create(i),
                            LadderFactor::annihilate(k, sk),
                            LadderFactor::annihilate(l, sl),
                        ],
                        -0.5 * ints.g(i, i, k, l) * s,
                    ));
                    terms.push(LadderTerm::new(
                        vec![LadderFactor::create(k, sk), LadderFactor::create(l, sl), LadderFactor::boson_annihilate(i)],
                        0.5 * ints.g(k, l, i, i) * s,
                    ));
                }
                let c = 0.5
                    * (2.0 * ints.g(i, k, l, i) + 2.0 * ints.g(k, i, i, l) - ints.g(k, i, l, i) - ints.g(i, k, i, l));
                for s in Spin::BOTH {
                    terms.push(LadderTerm::new(
                        vec![
                            LadderFactor::boson_create(i),
                            LadderFactor::boson_annihilate(i),
                            LadderFactor::create(k, s),
                            LadderFactor::annihilate(l, s),
                        ],
                        c,
                    ));
                }
            }
        }
    }
    terms.retain(|t| t.coefficient.norm() > INTEGRAL_CUTOFF);
    terms
}

pub fn build_hybrid_parts(ints: &IntegralSet, partition: &OrbitalPartition) -> Result<HybridParts, EncodingError> {
    partition.check_size(ints)?;
    let nq = partition.n_qubits();
    Ok(HybridParts {
        fermionic: fermionic_block(ints, partition).with_n_qubits(nq),
        bosonic: encode_terms(&bosonic_terms(ints, partition), partition)?.with_n_qubits(nq),
        interaction: encode_terms(&interaction_terms(ints, partition), partition)?.with_n_qubits(nq),
        core: ints.core(),
    })
}

/// `H_F + H_B + H_I + C` on `2|F| + |B|` qubits.
pub fn build_hybrid_hamiltonian(ints: &IntegralSet, partition: &OrbitalPartition) -> Result<QubitOperator, EncodingError> {
    Ok(build_hybrid_parts(ints, partition)?.total())
}

/// Maps a hybrid basis state into the full register ordered `F` then `B` pairs.
fn embed(x: u128, nf: usize, nb: usize) -> u128 {
    let fmask = (1u128 << nf) - 1;
    let mut y = x & fmask;
    for q in 0..nb {
        if x >> (nf + q) & 1 == 1 {
            y |= 0b11 << (nf + 2 * q);
        }
    }
    y
}

fn project(y: u128, nf: usize, nb: usize) -> Option<u128> {
    let fmask = (1u128 << nf) - 1;
    let mut x = y & fmask;
    for q in 0..nb {
        match y >> (nf + 2 * q) & 0b11 {
            0b00 => {}
            0b11 => x |= 1 << (nf + q),
            _ => return None,
        }
    }
    Some(x)
}

/// Dense `V†·H_full·V` where `V` embeds the hybrid space into the full
/// Jordan-Wigner space by doubly occupying every set bosonic qubit.
pub fn projection_oracle(
    ints: &IntegralSet,
    partition: &OrbitalPartition,
) -> Result<nalgebra::DMatrix<Complex64>, EncodingError> {
    partition.check_size(ints)?;
    if 2 * ints.n_orb() > ORACLE_MAX_QUBITS {
        return Err(EncodingError::OracleTooLarge(2 * ints.n_orb()));
    }
    let order: Vec<usize> = partition.fermionic().iter().chain(partition.bosonic()).copied().collect();
    let full = build_jw_hamiltonian(&ints.permuted(&order));
    let nf = partition.fermionic_qubits();
    let nb = partition.bosonic().len();
    let dim = 1usize << partition.n_qubits();
    let mut m = nalgebra::DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let y = embed(col as u128, nf, nb);
        for (p, c) in full.iter() {
            let (phase, y2) = p.apply_to_basis(y);
            if let Some(row) = project(y2, nf, nb) {
                m[(row as usize, col)] += c * phase;
            }
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumberTarget {
    SpinOrbital(usize, Spin),
    /// Electrons on a fermionic orbital, or pairs on a bosonic one.
    Orbital(usize),
}

fn projector_one(qubit: usize) -> QubitOperator {
    QubitOperator::from_terms(
        qubit + 1,
        [(PauliString::IDENTITY, cplx(0.5, 0.0)), (PauliString::z_mask(1u128 << qubit), cplx(-0.5, 0.0))],
    )
}

/// Occupation operator `½(1 − Z)` of a spin-orbital or bosonic orbital.
pub fn number_operator(partition: &OrbitalPartition, target: NumberTarget) -> Result<QubitOperator, EncodingError> {
    let nq = partition.n_qubits();
    let op = match target {
        NumberTarget::SpinOrbital(o, s) => {
            if partition.is_bosonic(o) {
                projector_one(partition.boson_qubit(o)?)
            } else {
                projector_one(partition.spin_orbital_qubit(o, s)?)
            }
        }
        NumberTarget::Orbital(o) => {
            if partition.is_bosonic(o) {
                projector_one(partition.boson_qubit(o)?)
            } else {
                projector_one(partition.spin_orbital_qubit(o, Spin::Up)?)
                    + projector_one(partition.spin_orbital_qubit(o, Spin::Down)?)
            }
        }
    };
    Ok(op.with_n_qubits(nq).simplified())
}

/// `Σ_F n + 2 Σ_B N`.
pub fn total_number_operator(partition: &OrbitalPartition) -> QubitOperator {
    let mut op = QubitOperator::zero(partition.n_qubits());
    for &o in partition.fermionic() {
        op += number_operator(partition, NumberTarget::Orbital(o)).expect("fermionic orbital");
    }
    for &o in partition.bosonic() {
        op += number_operator(partition, NumberTarget::Orbital(o)).expect("bosonic orbital").scale(cplx(2.0, 0.0));
    }
    op.simplified()
}

/// `½ Σ_F (n↑ − n↓)`; bosonic pairs carry no spin.
pub fn sz_operator(partition: &OrbitalPartition) -> QubitOperator {
    let mut op = QubitOperator::zero(partition.n_qubits());
    for &o in partition.fermionic() {
        op += number_operator(partition, NumberTarget::SpinOrbital(o, Spin::Up)).expect("fermionic").scale(cplx(0.5, 0.0));
        op += number_operator(partition, NumberTarget::SpinOrbital(o, Spin::Down)).expect("fermionic").scale(cplx(-0.5, 0.0));
    }
    op.simplified()
}

/// True if no term uses a bosonic qubit inside a parity string: a term that
/// moves bosons (`X`/`Y` on bosonic qubits) carries no bosonic `Z`, so bosonic
/// `Z` factors only ever come from occupation projectors.
pub fn parity_strings_confined(op: &QubitOperator, partition: &OrbitalPartition) -> bool {
    let nf = partition.fermionic_qubits();
    let nq = partition.n_qubits();
    let bmask = if nq == nf { 0 } else { (u128::MAX >> (128 - nq)) & !((1u128 << nf) - 1) };
    op.iter().all(|(p, _)| {
        let moves = p.x_mask() & bmask != 0;
        let z_on_b = p.z_bits() & !p.x_mask() & bmask;
        !moves || z_on_b == 0
    })
}
