//! Excitation generators, ansatz pools and compilation to CNOT plus
//! single-qubit rotations.
//!
//! Rotations follow `R_P(φ) = exp(−iφ/2 P)`. A parameterized angle is
//! `scale · θ`, so a term `c·P` of a generator compiles to `Rz(c·θ)` inside a
//! basis change and CNOT ladder.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde_json::json;
use thiserror::Error;

use crate::encoding::{jw_ladder, EncodingError, LadderFactor, LadderTerm, OrbitalPartition, Spin};
use crate::pauli::{Axis, QubitOperator};

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("cannot parse excitation `{0}`")]
    Grammar(String),
    #[error("excitation {spec} violates the occupation restriction at {factor}")]
    Occupation { spec: String, factor: String },
    #[error("excitation {0} is not a valid excitation: {1}")]
    Invalid(String, String),
    #[error("generator is not Hermitian")]
    NotHermitian,
    #[error("unsupported excitation for the optimized backend: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("malformed circuit JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinOrbital {
    pub orbital: usize,
    pub spin: Spin,
}

impl SpinOrbital {
    pub fn new(orbital: usize, spin: Spin) -> Self {
        Self { orbital, spin }
    }
}

impl fmt::Display for SpinOrbital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.orbital, self.spin)
    }
}

impl FromStr for SpinOrbital {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || CircuitError::Grammar(s.to_string());
        let (num, spin) = s.split_at(s.len().checked_sub(1).ok_or_else(err)?);
        let spin = match spin {
            "u" => Spin::Up,
            "d" => Spin::Down,
            _ => return Err(err()),
        };
        let orbital = num.parse().map_err(|_| err())?;
        Ok(Self { orbital, spin })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExcitationKind {
    Single,
    Double,
    PairedDouble,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Excitation {
    Single { from: SpinOrbital, to: SpinOrbital },
    Double { from: [SpinOrbital; 2], to: [SpinOrbital; 2] },
    /// Moves an electron pair between spatial orbitals.
    Paired { from: usize, to: usize },
}

/// An excitation plus the name of the parameter it carries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExcitationSpec {
    pub excitation: Excitation,
    pub param: String,
}

impl ExcitationSpec {
    /// Spec whose parameter is named after the excitation itself.
    pub fn new(excitation: Excitation) -> Self {
        let param = excitation.to_string();
        Self { excitation, param }
    }

    pub fn paired(from: usize, to: usize) -> Self {
        Self::new(Excitation::Paired { from, to })
    }

    pub fn single(from: SpinOrbital, to: SpinOrbital) -> Self {
        Self::new(Excitation::Single { from, to })
    }

    pub fn double(from: [SpinOrbital; 2], to: [SpinOrbital; 2]) -> Self {
        Self::new(Excitation::Double { from, to })
    }

    pub fn with_param(mut self, name: impl Into<String>) -> Self {
        self.param = name.into();
        self
    }

    pub fn kind(&self) -> ExcitationKind {
        match self.excitation {
            Excitation::Single { .. } => ExcitationKind::Single,
            Excitation::Double { .. } => ExcitationKind::Double,
            Excitation::Paired { .. } => ExcitationKind::PairedDouble,
        }
    }

    /// Orbitals the excitation touches.
    pub fn orbitals(&self) -> Vec<usize> {
        let mut v = match &self.excitation {
            Excitation::Single { from, to } => vec![from.orbital, to.orbital],
            Excitation::Double { from, to } => from.iter().chain(to).map(|s| s.orbital).collect(),
            Excitation::Paired { from, to } => vec![*from, *to],
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    /// A single, or a double that is not a pair moving as a whole.
    pub fn is_unpaired(&self) -> bool {
        match &self.excitation {
            Excitation::Single { .. } => true,
            Excitation::Paired { .. } => false,
            Excitation::Double { from, to } => {
                let pair = |s: &[SpinOrbital; 2]| s[0].orbital == s[1].orbital;
                !(pair(from) && pair(to))
            }
        }
    }

    /// `T` as ladder operators: target creations then source annihilations.
    pub fn ladder(&self) -> LadderTerm {
        let factors = match &self.excitation {
            Excitation::Single { from, to } => {
                vec![LadderFactor::create(to.orbital, to.spin), LadderFactor::annihilate(from.orbital, from.spin)]
            }
            Excitation::Double { from, to } => vec![
                LadderFactor::create(to[0].orbital, to[0].spin),
                LadderFactor::create(to[1].orbital, to[1].spin),
                LadderFactor::annihilate(from[0].orbital, from[0].spin),
                LadderFactor::annihilate(from[1].orbital, from[1].spin),
            ],
            Excitation::Paired { from, to } => vec![
                LadderFactor::create(*to, Spin::Up),
                LadderFactor::create(*to, Spin::Down),
                LadderFactor::annihilate(*from, Spin::Down),
                LadderFactor::annihilate(*from, Spin::Up),
            ],
        };
        LadderTerm::new(factors, 1.0)
    }
}

impl fmt::Display for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Excitation::Single { from, to } => write!(f, "{from}->{to}"),
            Excitation::Double { from, to } => write!(f, "{},{}->{},{}", from[0], from[1], to[0], to[1]),
            Excitation::Paired { from, to } => write!(f, "p:{from}->{to}"),
        }
    }
}

impl fmt::Display for ExcitationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.excitation)
    }
}

impl FromStr for ExcitationSpec {
    type Err = CircuitError;

    /// Grammar: `"0u->2u"`, `"0d,2u->4d,4u"` or `"p:0->3"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let err = || CircuitError::Grammar(s.to_string());
        let (lhs, rhs) = text.split_once("->").ok_or_else(err)?;
        if let Some(src) = lhs.strip_prefix("p:") {
            let from = src.trim().parse().map_err(|_| err())?;
            let to = rhs.trim().parse().map_err(|_| err())?;
            return Ok(Self::paired(from, to));
        }
        let parse_side = |side: &str| -> Result<Vec<SpinOrbital>, CircuitError> {
            side.split(',').map(|t| t.parse().map_err(|_| err())).collect()
        };
        let from = parse_side(lhs)?;
        let to = parse_side(rhs)?;
        match (from.as_slice(), to.as_slice()) {
            ([a], [b]) => Ok(Self::single(*a, *b)),
            ([a, b], [c, d]) => Ok(Self::double([*a, *b], [*c, *d])),
            _ => Err(err()),
        }
    }
}

/// Checks the excitation against the occupation restrictions of `partition`.
pub fn validate(spec: &ExcitationSpec, partition: &OrbitalPartition) -> Result<(), CircuitError> {
    let name = spec.to_string();
    for o in spec.orbitals() {
        if o >= partition.n_orb() {
            return Err(CircuitError::Encoding(EncodingError::OrbitalOutOfRange(o)));
        }
    }
    let occupation = |factor: String| CircuitError::Occupation { spec: name.clone(), factor };
    match &spec.excitation {
        Excitation::Single { from, to } => {
            if from.spin != to.spin || from == to {
                return Err(CircuitError::Invalid(name, "single must conserve spin and move".into()));
            }
            for so in [from, to] {
                if partition.is_bosonic(so.orbital) {
                    return Err(occupation(so.to_string()));
                }
            }
        }
        Excitation::Paired { from, to } => {
            if from == to {
                return Err(CircuitError::Invalid(name, "pair must move".into()));
            }
        }
        Excitation::Double { from, to } => {
            if from[0] == from[1] || to[0] == to[1] {
                return Err(CircuitError::Invalid(name, "repeated spin-orbital".into()));
            }
            let spin_sum = |v: &[SpinOrbital; 2]| v.iter().map(|s| s.spin.offset()).sum::<usize>();
            if spin_sum(from) != spin_sum(to) {
                return Err(CircuitError::Invalid(name, "spin not conserved".into()));
            }
            let mut a = *from;
            let mut b = *to;
            a.sort();
            b.sort();
            if a == b {
                return Err(CircuitError::Invalid(name, "sources equal targets".into()));
            }
            for &o in partition.bosonic() {
                let created: Vec<&SpinOrbital> = to.iter().filter(|s| s.orbital == o).collect();
                let removed: Vec<&SpinOrbital> = from.iter().filter(|s| s.orbital == o).collect();
                let ok = match (created.len(), removed.len()) {
                    (0, 0) | (2, 0) | (0, 2) => true,
                    (1, 1) => created[0].spin == removed[0].spin,
                    _ => false,
                };
                if !ok {
                    let f = created.first().or(removed.first()).expect("touched orbital");
                    return Err(occupation(f.to_string()));
                }
            }
        }
    }
    Ok(())
}

/// `T` encoded under `partition`.
pub fn excitation_operator(spec: &ExcitationSpec, partition: &OrbitalPartition) -> Result<QubitOperator, CircuitError> {
    validate(spec, partition)?;
    Ok(jw_ladder(&spec.ladder(), partition)?)
}

/// Hermitian generator `G = i(T − T†)`; the excitation unitary is `exp(−iθ/2·G)`.
pub fn generator(spec: &ExcitationSpec, partition: &OrbitalPartition) -> Result<QubitOperator, CircuitError> {
    let t = excitation_operator(spec, partition)?;
    let g = (t.clone() - t.adjoint()).scale(Complex64::new(0.0, 1.0)).simplified();
    if g.is_empty() {
        return Err(CircuitError::Invalid(spec.to_string(), "generator vanishes".into()));
    }
    Ok(g.with_n_qubits(partition.n_qubits()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Const(f64),
    /// `scale · θ[index]`.
    Param { index: usize, scale: f64 },
}

impl Angle {
    pub fn value(&self, theta: &[f64]) -> f64 {
        match *self {
            Angle::Const(a) => a,
            Angle::Param { index, scale } => scale * theta[index],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    Rx(usize, Angle),
    Ry(usize, Angle),
    Rz(usize, Angle),
    Cnot { control: usize, target: usize },
    Cz { control: usize, target: usize },
    CRy { control: usize, target: usize, angle: Angle },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(t) | Gate::H(t) | Gate::Rx(t, _) | Gate::Ry(t, _) | Gate::Rz(t, _) => vec![t],
            Gate::Cnot { control, target } | Gate::Cz { control, target } | Gate::CRy { control, target, .. } => {
                vec![control, target]
            }
        }
    }

    pub fn angle(&self) -> Option<&Angle> {
        match self {
            Gate::Rx(_, a) | Gate::Ry(_, a) | Gate::Rz(_, a) | Gate::CRy { angle: a, .. } => Some(a),
            _ => None,
        }
    }

    pub fn is_parameterized(&self) -> bool {
        matches!(self.angle(), Some(Angle::Param { .. }))
    }

    fn with_angle(&self, angle: Angle) -> Gate {
        match *self {
            Gate::Rx(t, _) => Gate::Rx(t, angle),
            Gate::Ry(t, _) => Gate::Ry(t, angle),
            Gate::Rz(t, _) => Gate::Rz(t, angle),
            Gate::CRy { control, target, .. } => Gate::CRy { control, target, angle },
            ref g => g.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct GateCounts {
    pub cnot: usize,
    pub single_qubit: usize,
    pub parameterized: usize,
    pub depth: usize,
}

/// Ordered gate list over named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterizedCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    params: Vec<String>,
}

impl ParameterizedCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), params: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name)
    }

    /// Index of `name`, declaring it if new.
    pub fn declare(&mut self, name: &str) -> usize {
        match self.param_index(name) {
            Some(i) => i,
            None => {
                self.params.push(name.to_string());
                self.params.len() - 1
            }
        }
    }

    pub fn push(&mut self, gate: Gate) {
        debug_assert!(gate.qubits().iter().all(|&q| q < self.n_qubits), "gate {gate:?} outside register");
        self.gates.push(gate);
    }

    /// Appends `other`, merging parameters by name.
    pub fn append(&mut self, other: &ParameterizedCircuit) {
        assert_eq!(self.n_qubits, other.n_qubits, "register mismatch");
        let map: Vec<usize> = other.params.iter().map(|p| self.declare(p)).collect();
        for g in &other.gates {
            let g = match g.angle() {
                Some(Angle::Param { index, scale }) => g.with_angle(Angle::Param { index: map[*index], scale: *scale }),
                _ => g.clone(),
            };
            self.gates.push(g);
        }
    }

    pub fn counts(&self) -> GateCounts {
        let mut layer = vec![0usize; self.n_qubits];
        let mut c = GateCounts::default();
        for g in &self.gates {
            let qs = g.qubits();
            if qs.len() == 2 {
                c.cnot += usize::from(matches!(g, Gate::Cnot { .. }));
            } else {
                c.single_qubit += 1;
            }
            c.parameterized += usize::from(g.is_parameterized());
            let d = qs.iter().map(|&q| layer[q]).max().unwrap_or(0) + 1;
            for q in qs {
                layer[q] = d;
            }
        }
        c.depth = layer.into_iter().max().unwrap_or(0);
        c
    }

    pub fn to_json(&self) -> serde_json::Value {
        let angle_fields = |a: &Angle, obj: &mut serde_json::Map<String, serde_json::Value>| match *a {
            Angle::Const(v) => {
                obj.insert("angle".into(), json!(v));
            }
            Angle::Param { index, scale } => {
                obj.insert("param".into(), json!(self.params[index]));
                obj.insert("scale".into(), json!(scale));
            }
        };
        let gates: Vec<serde_json::Value> = self
            .gates
            .iter()
            .map(|g| {
                let mut obj = serde_json::Map::new();
                let (name, qs) = match g {
                    Gate::X(t) => ("X", (None, *t)),
                    Gate::H(t) => ("H", (None, *t)),
                    Gate::Rx(t, _) => ("RX", (None, *t)),
                    Gate::Ry(t, _) => ("RY", (None, *t)),
                    Gate::Rz(t, _) => ("RZ", (None, *t)),
                    Gate::Cnot { control, target } => ("CNOT", (Some(*control), *target)),
                    Gate::Cz { control, target } => ("CZ", (Some(*control), *target)),
                    Gate::CRy { control, target, .. } => ("CRY", (Some(*control), *target)),
                };
                obj.insert("g".into(), json!(name));
                if let Some(c) = qs.0 {
                    obj.insert("c".into(), json!(c));
                }
                obj.insert("t".into(), json!(qs.1));
                if let Some(a) = g.angle() {
                    angle_fields(a, &mut obj);
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        json!({"n_qubits": self.n_qubits, "params": self.params, "gates": gates})
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, CircuitError> {
        let bad = |m: &str| CircuitError::Json(m.to_string());
        let n = value["n_qubits"].as_u64().ok_or_else(|| bad("n_qubits"))? as usize;
        let mut c = ParameterizedCircuit::new(n);
        if let Some(ps) = value["params"].as_array() {
            for p in ps {
                c.declare(p.as_str().ok_or_else(|| bad("params"))?);
            }
        }
        for g in value["gates"].as_array().ok_or_else(|| bad("gates"))? {
            let t = g["t"].as_u64().ok_or_else(|| bad("t"))? as usize;
            let ctrl = g["c"].as_u64().map(|v| v as usize);
            let angle = if let Some(p) = g["param"].as_str() {
                Some(Angle::Param { index: c.declare(p), scale: g["scale"].as_f64().unwrap_or(1.0) })
            } else {
                g["angle"].as_f64().map(Angle::Const)
            };
            let need_angle = || angle.ok_or_else(|| bad("angle"));
            let need_ctrl = || ctrl.ok_or_else(|| bad("c"));
            let gate = match g["g"].as_str().ok_or_else(|| bad("g"))? {
                "X" => Gate::X(t),
                "H" => Gate::H(t),
                "RX" => Gate::Rx(t, need_angle()?),
                "RY" => Gate::Ry(t, need_angle()?),
                "RZ" => Gate::Rz(t, need_angle()?),
                "CNOT" => Gate::Cnot { control: need_ctrl()?, target: t },
                "CZ" => Gate::Cz { control: need_ctrl()?, target: t },
                "CRY" => Gate::CRy { control: need_ctrl()?, target: t, angle: need_angle()? },
                other => return Err(bad(other)),
            };
            if gate.qubits().iter().any(|&q| q >= n) {
                return Err(bad("qubit outside register"));
            }
            c.gates.push(gate);
        }
        Ok(c)
    }
}

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// Product of `exp(−i(θ/2)·c·P)` over the generator's terms in canonical order.
pub fn compile_direct(gen: &QubitOperator, param: &str) -> Result<ParameterizedCircuit, CircuitError> {
    if !gen.is_hermitian(1e-12) {
        return Err(CircuitError::NotHermitian);
    }
    let mut circ = ParameterizedCircuit::new(gen.n_qubits());
    let index = circ.declare(param);
    for (p, c) in gen.canonical_terms() {
        if p.is_identity() {
            continue;
        }
        let active: Vec<(usize, Axis)> = p.iter().collect();
        let mut basis = Vec::new();
        let mut unbasis = Vec::new();
        for &(q, a) in &active {
            match a {
                Axis::X => {
                    basis.push(Gate::H(q));
                    unbasis.push(Gate::H(q));
                }
                Axis::Y => {
                    basis.push(Gate::Rx(q, Angle::Const(HALF_PI)));
                    unbasis.push(Gate::Rx(q, Angle::Const(-HALF_PI)));
                }
                Axis::Z => {}
            }
        }
        let ladder: Vec<Gate> =
            active.windows(2).map(|w| Gate::Cnot { control: w[0].0, target: w[1].0 }).collect();
        let last = active.last().expect("non-identity").0;
        circ.gates.extend(basis);
        circ.gates.extend(ladder.iter().cloned());
        circ.push(Gate::Rz(last, Angle::Param { index, scale: c.re }));
        circ.gates.extend(ladder.into_iter().rev());
        circ.gates.extend(unbasis);
    }
    Ok(circ)
}

/// Qubits the excitation's ladder operators act on (sorted).
fn factor_qubits(spec: &ExcitationSpec, partition: &OrbitalPartition) -> Result<Vec<usize>, CircuitError> {
    let mut qs = Vec::new();
    for f in spec.ladder().factors {
        let q = if partition.is_bosonic(f.orbital) {
            partition.boson_qubit(f.orbital)?
        } else {
            match f.mode {
                crate::encoding::Mode::Fermion(s) => partition.spin_orbital_qubit(f.orbital, s)?,
                crate::encoding::Mode::Boson => partition.boson_qubit(f.orbital)?,
            }
        };
        qs.push(q);
    }
    qs.sort_unstable();
    qs.dedup();
    Ok(qs)
}

/// Staircase compilation: `T` maps one active pattern `s` to `t` up to a sign
/// and a parity string, so `exp(−iθ/2·G)` is a Givens rotation on `{s, t}`.
/// Flip qubits are folded onto a pivot with CNOTs, the parity string is
/// accumulated onto the pivot, and the rotation becomes a uniformly controlled
/// `Ry` written as `Rx(π/2)`, a Gray-code `Rz` multiplexor and `Rx(−π/2)`.
pub fn compile_optimized(spec: &ExcitationSpec, partition: &OrbitalPartition) -> Result<ParameterizedCircuit, CircuitError> {
    let t_op = excitation_operator(spec, partition)?;
    let unsupported = || CircuitError::Unsupported(spec.to_string());
    let active = factor_qubits(spec, partition)?;
    let mut flips = None;
    let mut support = 0u128;
    for (p, _) in t_op.iter() {
        support |= p.support();
        match flips {
            None => flips = Some(p.x_mask()),
            Some(m) if m != p.x_mask() => return Err(unsupported()),
            _ => {}
        }
    }
    let flips = flips.ok_or_else(unsupported)?;
    let active_mask: u128 = active.iter().map(|&q| 1u128 << q).sum();
    if flips == 0 || flips & !active_mask != 0 {
        return Err(unsupported());
    }
    let parity: Vec<usize> = (0..128).filter(|&q| (support & !active_mask) >> q & 1 == 1).collect();

    // the single source pattern and its sign
    let mut found = None;
    for pattern in 0..1u32 << active.len() {
        let state: u128 = active.iter().enumerate().filter(|(i, _)| pattern >> i & 1 == 1).map(|(_, &q)| 1u128 << q).sum();
        let mut amp = BTreeMap::new();
        for (p, c) in t_op.iter() {
            let (phase, out) = p.apply_to_basis(state);
            *amp.entry(out).or_insert(Complex64::new(0.0, 0.0)) += c * phase;
        }
        amp.retain(|_, a| a.norm() > 1e-9);
        match amp.len() {
            0 => {}
            1 => {
                let (&t, &c) = amp.iter().next().expect("one entry");
                if found.is_some() || (c.norm() - 1.0).abs() > 1e-9 || c.im.abs() > 1e-9 {
                    return Err(unsupported());
                }
                found = Some((state, t, c.re.signum()));
            }
            _ => return Err(unsupported()),
        }
    }
    let (s, t, sign) = found.ok_or_else(unsupported)?;
    debug_assert_eq!(s ^ t, flips);

    let mut circ = ParameterizedCircuit::new(partition.n_qubits());
    let index = circ.declare(&spec.param);
    let pivot = 127 - flips.leading_zeros() as usize;
    let bit = |x: u128, q: usize| (x >> q & 1) as u32;
    let others: Vec<usize> = (0..pivot).filter(|&q| flips >> q & 1 == 1).collect();
    let mut controls: Vec<(usize, u32)> = others.iter().map(|&f| (f, bit(s, f) ^ bit(s, pivot))).collect();
    controls.extend(active.iter().filter(|&&q| flips >> q & 1 == 0).map(|&q| (q, bit(s, q))));
    controls.sort_unstable();

    let mut pre: Vec<Gate> = others.iter().map(|&f| Gate::Cnot { control: pivot, target: f }).collect();
    pre.extend(parity.windows(2).map(|w| Gate::Cnot { control: w[0], target: w[1] }));
    if let Some(&last) = parity.last() {
        pre.push(Gate::Cnot { control: last, target: pivot });
    }

    let m = controls.len();
    let direction = if bit(s, pivot) == 0 { sign } else { -sign };
    let weight = direction / (1u64 << m) as f64;
    let pattern: u32 = controls.iter().enumerate().map(|(i, &(_, v))| v << i).sum();
    circ.gates.extend(pre.iter().cloned());
    circ.push(Gate::Rx(pivot, Angle::Const(HALF_PI)));
    for k in 0..1u32 << m {
        let gray = k ^ (k >> 1);
        let scale = if (pattern & gray).count_ones().is_multiple_of(2) { weight } else { -weight };
        circ.push(Gate::Rz(pivot, Angle::Param { index, scale }));
        if m > 0 {
            let changed = if k + 1 == 1 << m { m - 1 } else { (k + 1).trailing_zeros() as usize };
            circ.push(Gate::Cnot { control: controls[changed].0, target: pivot });
        }
    }
    circ.push(Gate::Rx(pivot, Angle::Const(-HALF_PI)));
    circ.gates.extend(pre.into_iter().rev());
    Ok(circ)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Direct,
    Optimized,
}

impl FromStr for Backend {
    type Err = CircuitError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Backend::Direct),
            "optimized" => Ok(Backend::Optimized),
            _ => Err(CircuitError::Grammar(s.to_string())),
        }
    }
}

pub fn compile(spec: &ExcitationSpec, partition: &OrbitalPartition, backend: Backend) -> Result<ParameterizedCircuit, CircuitError> {
    match backend {
        Backend::Direct => {
            let mut c = compile_direct(&generator(spec, partition)?, &spec.param)?;
            c.n_qubits = partition.n_qubits();
            Ok(c)
        }
        Backend::Optimized => compile_optimized(spec, partition),
    }
}

/// Concatenation of the compiled excitations in order.
pub fn trotter_ucc(specs: &[ExcitationSpec], partition: &OrbitalPartition, backend: Backend) -> Result<ParameterizedCircuit, CircuitError> {
    let mut circ = ParameterizedCircuit::new(partition.n_qubits());
    for spec in specs {
        circ.append(&compile(spec, partition, backend)?);
    }
    Ok(circ)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolKind {
    UpCCGSD,
    UpCCD,
    Spa,
    CorrelatorsSimple,
    CorrelatorsUpCCD,
}

impl FromStr for PoolKind {
    type Err = CircuitError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "upccgsd" => Ok(PoolKind::UpCCGSD),
            "upccd" => Ok(PoolKind::UpCCD),
            "spa" => Ok(PoolKind::Spa),
            "correlators-simple" => Ok(PoolKind::CorrelatorsSimple),
            "correlators-upccd" => Ok(PoolKind::CorrelatorsUpCCD),
            _ => Err(CircuitError::Grammar(s.to_string())),
        }
    }
}

/// Ansatz pools.
///
/// * UpCCGSD: for every orbital pair `p < q`, the paired double `p → q`, then
///   the up and down singles when both orbitals are fermionic.
/// * UpCCD: the paired doubles only.
/// * SPA: within each pair subset, a chain `s0 → s1 → s2 …`. Each subset must
///   start with the occupied orbital of its pair and subsets must be disjoint.
/// * correlators-simple: starting at the fermionic orbital closest to `B[0]`,
///   a chain through `B` in layout order.
/// * correlators-upccd: every paired double from a fermionic to a bosonic orbital.
pub fn enumerate_pool(
    kind: PoolKind,
    partition: &OrbitalPartition,
    n_elec: usize,
    pairs: Option<&[Vec<usize>]>,
) -> Result<Vec<ExcitationSpec>, CircuitError> {
    let n = partition.n_orb();
    let mut out = Vec::new();
    match kind {
        PoolKind::UpCCGSD | PoolKind::UpCCD => {
            for p in 0..n {
                for q in p + 1..n {
                    out.push(ExcitationSpec::paired(p, q));
                    if kind == PoolKind::UpCCGSD && partition.is_fermionic(p) && partition.is_fermionic(q) {
                        for s in Spin::BOTH {
                            out.push(ExcitationSpec::single(SpinOrbital::new(p, s), SpinOrbital::new(q, s)));
                        }
                    }
                }
            }
        }
        PoolKind::Spa => {
            let pairs = pairs.ok_or_else(|| CircuitError::Invalid("SPA".into(), "needs a pair assignment".into()))?;
            let occupied = n_elec / 2;
            let mut seen = vec![false; n];
            for subset in pairs {
                for &o in subset {
                    if o >= n || seen[o] {
                        return Err(CircuitError::Invalid("SPA".into(), format!("orbital {o} repeated or out of range")));
                    }
                    seen[o] = true;
                }
                let occ: Vec<&usize> = subset.iter().filter(|&&o| o < occupied).collect();
                if occ.len() != 1 || subset[0] >= occupied {
                    return Err(CircuitError::Invalid("SPA".into(), format!("subset {subset:?} must start at its one occupied orbital")));
                }
                for w in subset.windows(2) {
                    out.push(ExcitationSpec::paired(w[0], w[1]));
                }
            }
            if let Some(o) = (0..occupied).find(|&o| !seen[o]) {
                return Err(CircuitError::Invalid("SPA".into(), format!("occupied orbital {o} not assigned")));
            }
        }
        PoolKind::CorrelatorsSimple => {
            let b = partition.bosonic();
            if let (Some(&b0), false) = (b.first(), partition.fermionic().is_empty()) {
                let start = *partition
                    .fermionic()
                    .iter()
                    .min_by_key(|&&f| (f.abs_diff(b0), f))
                    .expect("nonempty F");
                let mut prev = start;
                for &next in b {
                    out.push(ExcitationSpec::paired(prev, next));
                    prev = next;
                }
            }
        }
        PoolKind::CorrelatorsUpCCD => {
            for &f in partition.fermionic() {
                for &b in partition.bosonic() {
                    out.push(ExcitationSpec::paired(f, b));
                }
            }
        }
    }
    for spec in &out {
        validate(spec, partition)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> crate::pauli::PauliString {
        s.parse().unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn grammar_round_trip() {
        for s in ["0d,2u->4d,4u", "p:0->3", "0u->2u"] {
            let spec: ExcitationSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(spec.param, s);
        }
        assert_eq!("p:0->3".parse::<ExcitationSpec>().unwrap().kind(), ExcitationKind::PairedDouble);
        for bad in ["0u->", "0x->1u", "p:a->1", "0u,1d->2u", "", "->"] {
            assert!(bad.parse::<ExcitationSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn hcb_paired_generator() {
        let p = OrbitalPartition::all_bosonic(2);
        let g = generator(&ExcitationSpec::paired(0, 1), &p).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.coefficient(&ps("X0 Y1")), c(0.5));
        assert_eq!(g.coefficient(&ps("Y0 X1")), c(-0.5));
    }

    #[test]
    fn jw_single_generator() {
        let p = OrbitalPartition::all_fermionic(2);
        let spec = ExcitationSpec::single(SpinOrbital::new(0, Spin::Up), SpinOrbital::new(1, Spin::Up));
        let g = generator(&spec, &p).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.coefficient(&ps("Y0 Z1 X2")), c(-0.5));
        assert_eq!(g.coefficient(&ps("X0 Z1 Y2")), c(0.5));
    }

    #[test]
    fn occupation_violations() {
        let p = OrbitalPartition::from_bosonic(3, &[2]).unwrap();
        let single: ExcitationSpec = "0u->2u".parse().unwrap();
        assert!(matches!(generator(&single, &p), Err(CircuitError::Occupation { .. })));
        let broken: ExcitationSpec = "0u,1u->2u,1u".parse().unwrap();
        assert!(generator(&broken, &p).is_err());
        let transfer: ExcitationSpec = "0d,1u->2d,2u".parse().unwrap();
        assert!(generator(&transfer, &p).is_ok());
    }

    #[test]
    fn direct_textbook_gadgets() {
        let zz = QubitOperator::term(2, ps("Z0 Z1"), c(1.0));
        let circ = compile_direct(&zz, "a").unwrap();
        assert_eq!(
            circ.gates(),
            &[
                Gate::Cnot { control: 0, target: 1 },
                Gate::Rz(1, Angle::Param { index: 0, scale: 1.0 }),
                Gate::Cnot { control: 0, target: 1 }
            ]
        );
        let x = QubitOperator::term(1, ps("X0"), c(1.0));
        let circ = compile_direct(&x, "a").unwrap();
        assert_eq!(circ.gates(), &[Gate::H(0), Gate::Rz(0, Angle::Param { index: 0, scale: 1.0 }), Gate::H(0)]);
        let bad = QubitOperator::term(1, ps("X0"), Complex64::new(0.0, 1.0));
        assert_eq!(compile_direct(&bad, "a"), Err(CircuitError::NotHermitian));
    }

    #[test]
    fn hcb_paired_optimized_shape() {
        let p = OrbitalPartition::all_bosonic(4);
        let circ = compile_optimized(&ExcitationSpec::paired(0, 3), &p).unwrap();
        let counts = circ.counts();
        assert_eq!(counts.cnot, 4);
        assert_eq!(counts.parameterized, 2);
        let rx = circ.gates().iter().filter(|g| matches!(g, Gate::Rx(..))).count();
        assert_eq!(rx, 2);
        let touched: std::collections::BTreeSet<usize> = circ.gates().iter().flat_map(|g| g.qubits()).collect();
        assert_eq!(touched.len(), 2);
    }

    #[test]
    fn semi_paired_counts() {
        let spec: ExcitationSpec = "0d,2u->4d,4u".parse().unwrap();
        let jw = OrbitalPartition::all_fermionic(5);
        let hy = OrbitalPartition::from_bosonic(5, &[1, 3, 4]).unwrap();
        let direct = |p| compile(&spec, p, Backend::Direct).unwrap().counts().cnot;
        let opt = |p| compile(&spec, p, Backend::Optimized).unwrap().counts().cnot;
        assert_eq!((direct(&jw), direct(&hy)), (80, 16));
        assert_eq!((opt(&jw), opt(&hy)), (18, 8));
    }

    #[test]
    fn pool_enumeration() {
        let p2 = OrbitalPartition::all_fermionic(2);
        assert_eq!(enumerate_pool(PoolKind::UpCCD, &p2, 2, None).unwrap().len(), 1);
        let gsd = enumerate_pool(PoolKind::UpCCGSD, &p2, 2, None).unwrap();
        assert_eq!(gsd.iter().map(|s| s.to_string()).collect::<Vec<_>>(), ["p:0->1", "0u->1u", "0d->1d"]);
        let p = OrbitalPartition::from_bosonic(3, &[1, 2]).unwrap();
        let simple = enumerate_pool(PoolKind::CorrelatorsSimple, &p, 2, None).unwrap();
        assert_eq!(simple.iter().map(|s| s.to_string()).collect::<Vec<_>>(), ["p:0->1", "p:1->2"]);
        let upccd = enumerate_pool(PoolKind::CorrelatorsUpCCD, &p, 2, None).unwrap();
        assert_eq!(upccd.len(), 2);
        let spa = enumerate_pool(PoolKind::Spa, &OrbitalPartition::all_bosonic(4), 4, Some(&[vec![0, 2], vec![1, 3]])).unwrap();
        assert_eq!(spa.iter().map(|s| s.to_string()).collect::<Vec<_>>(), ["p:0->2", "p:1->3"]);
        assert!(enumerate_pool(PoolKind::Spa, &OrbitalPartition::all_bosonic(4), 4, Some(&[vec![0, 2], vec![2, 3]])).is_err());
        assert!(enumerate_pool(PoolKind::Spa, &OrbitalPartition::all_bosonic(4), 4, Some(&[vec![0, 1, 2, 3]])).is_err());
        assert!(enumerate_pool(PoolKind::Spa, &OrbitalPartition::all_bosonic(4), 4, None).is_err());
    }

    #[test]
    fn circuit_json_round_trip() {
        let p = OrbitalPartition::from_bosonic(3, &[2]).unwrap();
        let circ = compile_optimized(&"0d,1u->2d,2u".parse().unwrap(), &p).unwrap();
        let back = ParameterizedCircuit::from_json(&circ.to_json()).unwrap();
        assert_eq!(back, circ);
        assert_eq!(circ.to_json()["gates"][0]["g"], "CNOT");
    }

    #[test]
    fn trotter_parameters() {
        let p = OrbitalPartition::all_fermionic(2);
        assert!(trotter_ucc(&[], &p, Backend::Direct).unwrap().gates().is_empty());
        let pool = enumerate_pool(PoolKind::UpCCGSD, &p, 2, None).unwrap();
        let circ = trotter_ucc(&pool, &p, Backend::Optimized).unwrap();
        assert_eq!(circ.params().len(), pool.len());
    }
}
