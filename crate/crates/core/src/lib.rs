//! Parameterized quantum circuit metrics, metric-driven ansatz search and VQE
//! on an exact statevector simulator.
//!
//! Modules:
//! - [`sim`]: states, gates, circuits, fidelity, Pauli expectations
//! - [`hamiltonian`]: Pauli sums, energies, exact ground energies
//! - [`concentration`]: clipped-gradient variance statistics and sample sizes
//! - [`metrics`]: expressibility, trainability, entanglement, complexity
//! - [`search`]: decision-space circuit construction and the search loop
//! - [`vqe`]: finite-difference VQE and geometry sweeps
//! - [`bench`]: the fixed benchmark circuit library

// `!(a < b)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod concentration;
pub mod hamiltonian;
pub mod metrics;
pub mod rng;
pub mod search;
pub mod sim;
pub mod vqe;

pub use rng::SeedSplitter;
pub use sim::{Circuit, GateKind, GateSpec, PauliString, StateVector};
