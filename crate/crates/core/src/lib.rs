//! Hybrid fermionic / hard-core-boson qubit encodings for molecular Hamiltonians.
//!
//! Orbitals are split into a fermionic set `F`, encoded with Jordan-Wigner on
//! two qubits per orbital, and a bosonic set `B`, where each orbital holds
//! either zero or two electrons and needs a single qubit. The crate builds the
//! resulting Hamiltonians, compiles excitation circuits, groups Pauli terms for
//! measurement and verifies everything by exact diagonalization.
//!
//! Basis convention throughout: little endian (qubit 0 is the least
//! significant bit) and `|1⟩` means occupied.

pub mod circuits;
pub mod cli;
pub mod encoding;
pub mod integrals;
pub mod pauli;
pub mod sim;
pub mod vqe;

pub use circuits::{ExcitationSpec, ParameterizedCircuit};
pub use encoding::OrbitalPartition;
pub use integrals::IntegralSet;
pub use pauli::{PauliString, QubitOperator};
pub use sim::{SectorBasis, StateVector};
