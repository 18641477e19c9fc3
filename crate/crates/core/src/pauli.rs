//! Sparse Pauli strings, qubit operators, commutation predicates and
//! sorted-insertion measurement grouping.
//!
//! A [`PauliString`] is stored as a pair of bit masks: qubit `q` carries
//! `X` if only the x-bit is set, `Z` if only the z-bit is set and `Y` if both
//! are set. Registers are limited to [`MAX_QUBITS`] qubits.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::BuildHasherDefault;
use std::collections::hash_map::DefaultHasher;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_QUBITS: usize = 128;

/// Terms with a coefficient magnitude below this are dropped by `simplify`.
pub const SIMPLIFY_THRESHOLD: f64 = 1e-12;

/// Deterministic hasher so accumulation order never depends on the process.
pub(crate) type StableHashMap<K, V> = HashMap<K, V, BuildHasherDefault<DefaultHasher>>;

#[derive(Debug, Error, PartialEq)]
pub enum PauliError {
    #[error("cannot parse Pauli factor `{0}`")]
    Factor(String),
    #[error("qubit {0} exceeds the {MAX_QUBITS}-qubit register limit")]
    QubitLimit(usize),
    #[error("qubit {0} appears twice in `{1}`")]
    Repeated(usize, String),
    #[error("malformed operator JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn bits(self) -> (bool, bool) {
        match self {
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Option<Self> {
        match (x, z) {
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
            (false, false) => None,
        }
    }

    fn symbol(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// Phase-free tensor product of single-qubit Paulis; identity on absent qubits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    x: u128,
    z: u128,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    pub fn single(qubit: usize, axis: Axis) -> Self {
        assert!(qubit < MAX_QUBITS, "qubit {qubit} exceeds register limit");
        let (x, z) = axis.bits();
        let bit = 1u128 << qubit;
        Self { x: if x { bit } else { 0 }, z: if z { bit } else { 0 } }
    }

    /// Builds a string from `(qubit, axis)` pairs; later entries overwrite earlier ones.
    pub fn from_axes<I: IntoIterator<Item = (usize, Axis)>>(axes: I) -> Self {
        let mut s = Self::IDENTITY;
        for (q, a) in axes {
            s.set(q, Some(a));
        }
        s
    }

    /// Product of `Z` on every qubit set in `mask`.
    pub fn z_mask(mask: u128) -> Self {
        Self { x: 0, z: mask }
    }

    pub(crate) fn from_masks(x: u128, z: u128) -> Self {
        Self { x, z }
    }

    pub fn x_mask(&self) -> u128 {
        self.x
    }

    pub fn z_bits(&self) -> u128 {
        self.z
    }

    pub fn set(&mut self, qubit: usize, axis: Option<Axis>) {
        assert!(qubit < MAX_QUBITS, "qubit {qubit} exceeds register limit");
        let bit = 1u128 << qubit;
        self.x &= !bit;
        self.z &= !bit;
        if let Some(a) = axis {
            let (x, z) = a.bits();
            if x {
                self.x |= bit;
            }
            if z {
                self.z |= bit;
            }
        }
    }

    pub fn get(&self, qubit: usize) -> Option<Axis> {
        if qubit >= MAX_QUBITS {
            return None;
        }
        let bit = 1u128 << qubit;
        Axis::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    pub fn support(&self) -> u128 {
        self.x | self.z
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// One past the highest qubit carrying a non-identity factor.
    pub fn min_register(&self) -> usize {
        let s = self.support();
        if s == 0 {
            0
        } else {
            MAX_QUBITS - s.leading_zeros() as usize
        }
    }

    /// `(qubit, axis)` pairs in ascending qubit order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Axis)> + '_ {
        let mut rest = self.support();
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some((q, self.get(q).expect("qubit in support")))
        })
    }

    pub fn qubits(&self) -> Vec<usize> {
        self.iter().map(|(q, _)| q).collect()
    }

    /// Product `self · other = phase · result`, with the phase as a power of `i`.
    #[inline]
    pub fn mul_with_phase(&self, other: &PauliString) -> (u8, PauliString) {
        // P = i^{|x&z|} X^x Z^z, so Z^z1 X^x2 contributes (-1)^{|z1&x2|}
        let n1 = (self.x & self.z).count_ones();
        let n2 = (other.x & other.z).count_ones();
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let n3 = (x & z).count_ones();
        let swaps = (self.z & other.x).count_ones();
        let phase = (n1 + n2 + 2 * swaps + 4 * MAX_QUBITS as u32 - n3) % 4;
        (phase as u8, PauliString { x, z })
    }

    /// True iff the strings commute as operators.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones().is_multiple_of(2)
    }

    /// True iff the strings agree on every qubit both act on.
    pub fn qubitwise_commutes_with(&self, other: &PauliString) -> bool {
        let shared = self.support() & other.support();
        (self.x ^ other.x) & shared == 0 && (self.z ^ other.z) & shared == 0
    }

    /// Action on a computational basis state: `P|b⟩ = phase · |b'⟩`.
    #[inline]
    pub fn apply_to_basis(&self, basis: u128) -> (Complex64, u128) {
        // X^x Z^z |b⟩ = (-1)^{|b&z|} |b ^ x⟩, times i^{#Y}
        let sign = if (basis & self.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let phase = i_pow(self.y_count() as u8) * sign;
        (phase, basis ^ self.x)
    }

    /// Dense `2^n × 2^n` matrix, little-endian (qubit 0 is the least significant bit).
    pub fn to_dense(&self, n_qubits: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let (phase, row) = self.apply_to_basis(col as u128);
            m[(row as usize, col)] = phase;
        }
        m
    }
}

pub(crate) fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl Ord for PauliString {
    /// Lexicographic order on the ascending `(qubit, axis)` sequence, X < Y < Z.
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.support(), other.support());
        let axis_diff = (self.x ^ other.x) | (self.z ^ other.z);
        let diff = (sa ^ sb) | (axis_diff & sa & sb);
        if diff == 0 {
            return Ordering::Equal;
        }
        let q = diff.trailing_zeros();
        let bit = 1u128 << q;
        let above = !((bit << 1).wrapping_sub(1));
        match (sa & bit != 0, sb & bit != 0) {
            (true, true) => self.get(q as usize).cmp(&other.get(q as usize)),
            // other's next element sits at a higher qubit, or other has ended
            (true, false) => {
                if sb & above != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            (false, true) => {
                if sa & above != 0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            (false, false) => unreachable!("diff bit lies in a support"),
        }
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (q, a) in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", a.symbol(), q)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            f.write_str("I")
        } else {
            write!(f, "{self}")
        }
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Parses `"X0 Z3 Y7"`; the empty string (or `"I"`) is the identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = PauliString::IDENTITY;
        for token in s.split_whitespace() {
            if token == "I" {
                continue;
            }
            let mut chars = token.chars();
            let axis = match chars.next() {
                Some('X') => Axis::X,
                Some('Y') => Axis::Y,
                Some('Z') => Axis::Z,
                _ => return Err(PauliError::Factor(token.into())),
            };
            let q: usize = chars.as_str().parse().map_err(|_| PauliError::Factor(token.into()))?;
            if q >= MAX_QUBITS {
                return Err(PauliError::QubitLimit(q));
            }
            if out.get(q).is_some() {
                return Err(PauliError::Repeated(q, s.into()));
            }
            out.set(q, Some(axis));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommutationMode {
    /// Fully commuting.
    FC,
    /// Qubit-wise commuting.
    QWC,
}

pub fn commutes_fully(a: &PauliString, b: &PauliString) -> bool {
    a.commutes_with(b)
}

pub fn commutes_qubitwise(a: &PauliString, b: &PauliString) -> bool {
    a.qubitwise_commutes_with(b)
}

/// Linear combination of Pauli strings on a register of `n_qubits` qubits.
#[derive(Clone, Default, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl fmt::Debug for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QubitOperator[{}](", self.n_qubits)?;
        for (i, (p, c)) in self.canonical_terms().into_iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i) {:?}", c.re, c.im, p)?;
        }
        f.write_str(")")
    }
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::term(n_qubits, PauliString::IDENTITY, Complex64::new(1.0, 0.0))
    }

    pub fn term(n_qubits: usize, pauli: PauliString, coeff: Complex64) -> Self {
        let mut op = Self::zero(n_qubits.max(pauli.min_register()));
        op.add_term(pauli, coeff);
        op
    }

    pub fn from_terms<I: IntoIterator<Item = (PauliString, Complex64)>>(n_qubits: usize, terms: I) -> Self {
        let mut op = Self::zero(n_qubits);
        for (p, c) in terms {
            op.add_term(p, c);
        }
        op
    }

    pub(crate) fn from_accumulator(n_qubits: usize, acc: StableHashMap<PauliString, Complex64>) -> Self {
        let mut op = Self { n_qubits, terms: acc.into_iter().collect() };
        op.simplify();
        op
    }

    /// Register width. Always at least one past the highest qubit used.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn with_n_qubits(mut self, n_qubits: usize) -> Self {
        self.n_qubits = self.n_qubits.max(n_qubits);
        self
    }

    pub fn add_term(&mut self, pauli: PauliString, coeff: Complex64) {
        self.n_qubits = self.n_qubits.max(pauli.min_register());
        *self.terms.entry(pauli).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, pauli: &PauliString) -> Complex64 {
        self.terms.get(pauli).copied().unwrap_or_default()
    }

    /// Terms in lexicographic string order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    /// Terms sorted by descending |coefficient|, ties broken lexicographically.
    pub fn canonical_terms(&self) -> Vec<(PauliString, Complex64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(p, c)| (*p, *c)).collect();
        sort_canonical(&mut v);
        v
    }

    /// Drops terms below [`SIMPLIFY_THRESHOLD`].
    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() >= SIMPLIFY_THRESHOLD);
    }

    pub fn simplified(mut self) -> Self {
        self.simplify();
        self
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(p, c)| (*p, c * factor)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(p, c)| (*p, c.conj())).collect(),
        }
    }

    /// Pauli strings are Hermitian, so the operator is Hermitian iff every
    /// coefficient is real.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn identity_coefficient(&self) -> Complex64 {
        self.coefficient(&PauliString::IDENTITY)
    }

    /// Copy without the identity term.
    pub fn without_identity(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&PauliString::IDENTITY);
        out
    }

    /// Product with phase tracking; result simplified.
    pub fn multiply(&self, other: &QubitOperator) -> QubitOperator {
        let mut acc: StableHashMap<PauliString, Complex64> = StableHashMap::default();
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                let (phase, p) = pa.mul_with_phase(pb);
                *acc.entry(p).or_default() += ca * cb * i_pow(phase);
            }
        }
        QubitOperator::from_accumulator(self.n_qubits.max(other.n_qubits), acc)
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &QubitOperator) -> QubitOperator {
        (self.multiply(other) - other.multiply(self)).simplified()
    }

    /// Largest coefficient magnitude of `self − other`.
    pub fn max_difference(&self, other: &QubitOperator) -> f64 {
        let diff = self.clone() - other.clone();
        diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in &self.terms {
            for col in 0..dim {
                let (phase, row) = p.apply_to_basis(col as u128);
                m[(row as usize, col)] += c * phase;
            }
        }
        m
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .canonical_terms()
            .into_iter()
            .map(|(p, c)| serde_json::json!({"re": c.re, "im": c.im, "pauli": p.to_string()}))
            .collect();
        serde_json::json!({"n_qubits": self.n_qubits, "terms": terms})
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, PauliError> {
        #[derive(Deserialize)]
        struct Term {
            re: f64,
            im: f64,
            pauli: String,
        }
        #[derive(Deserialize)]
        struct Doc {
            n_qubits: usize,
            terms: Vec<Term>,
        }
        let doc: Doc = serde_json::from_value(value.clone()).map_err(|e| PauliError::Json(e.to_string()))?;
        let mut op = QubitOperator::zero(doc.n_qubits);
        for t in doc.terms {
            op.add_term(t.pauli.parse()?, Complex64::new(t.re, t.im));
        }
        Ok(op)
    }
}

pub(crate) fn sort_canonical(v: &mut [(PauliString, Complex64)]) {
    v.sort_by(|(pa, ca), (pb, cb)| {
        cb.norm().partial_cmp(&ca.norm()).unwrap_or(Ordering::Equal).then_with(|| pa.cmp(pb))
    });
}

impl Add for QubitOperator {
    type Output = QubitOperator;
    fn add(mut self, rhs: QubitOperator) -> QubitOperator {
        self += rhs;
        self
    }
}

impl AddAssign for QubitOperator {
    fn add_assign(&mut self, rhs: QubitOperator) {
        self.n_qubits = self.n_qubits.max(rhs.n_qubits);
        for (p, c) in rhs.terms {
            *self.terms.entry(p).or_default() += c;
        }
    }
}

impl Sub for QubitOperator {
    type Output = QubitOperator;
    fn sub(self, rhs: QubitOperator) -> QubitOperator {
        self + (-rhs)
    }
}

impl Neg for QubitOperator {
    type Output = QubitOperator;
    fn neg(self) -> QubitOperator {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: &QubitOperator) -> QubitOperator {
        self.multiply(rhs)
    }
}

/// Free-function form of [`QubitOperator::multiply`].
pub fn multiply(a: &QubitOperator, b: &QubitOperator) -> QubitOperator {
    a.multiply(b)
}

/// A measurement group: mutually commuting terms in insertion order.
pub type Group = Vec<(PauliString, Complex64)>;

/// Greedy sorted-insertion grouping.
///
/// Non-identity terms are visited by descending |coefficient| (ties in
/// lexicographic string order) and appended to the first group whose members
/// all commute with them under `mode`; otherwise a new group is opened.
pub fn sorted_insertion(op: &QubitOperator, mode: CommutationMode) -> Vec<Group> {
    let mut terms = op.without_identity().canonical_terms();
    terms.retain(|(_, c)| c.norm() >= SIMPLIFY_THRESHOLD);
    let mut groups: Vec<Group> = Vec::new();
    match mode {
        CommutationMode::QWC => {
            // pairwise QWC members share one measurement basis; compare with it
            let mut bases: Vec<PauliString> = Vec::new();
            for (p, c) in terms {
                let slot = bases.iter().position(|b| b.qubitwise_commutes_with(&p));
                match slot {
                    Some(g) => {
                        let b = bases[g];
                        bases[g] = PauliString::from_masks(b.x | p.x, b.z | p.z);
                        groups[g].push((p, c));
                    }
                    None => {
                        bases.push(p);
                        groups.push(vec![(p, c)]);
                    }
                }
            }
        }
        CommutationMode::FC => {
            let mut members: Vec<Vec<(u128, u128)>> = Vec::new();
            for (p, c) in terms {
                let slot = members.iter().position(|m| {
                    m.iter().all(|&(x, z)| ((p.x & z) ^ (p.z & x)).count_ones() % 2 == 0)
                });
                match slot {
                    Some(g) => {
                        members[g].push((p.x, p.z));
                        groups[g].push((p, c));
                    }
                    None => {
                        members.push(vec![(p.x, p.z)]);
                        groups.push(vec![(p, c)]);
                    }
                }
            }
        }
    }
    groups
}
