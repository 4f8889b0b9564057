//! Exact statevector simulation.
//!
//! Amplitude index bit `q` is qubit `q` (qubit 0 least significant). Rotations
//! follow `RX/RY/RZ(θ) = exp(−iθσ/2)`; controlled gates take the control first.
//! The excitation gates rotate by the full angle `θ` in their two-dimensional
//! subspace.

mod circuit;
mod gate;
mod pauli;
mod state;

pub use circuit::{apply_circuit, Circuit, Complexity};
pub use gate::{GateKind, GateSpec};
pub use pauli::{pauli_expectation, PauliString};
pub use state::{StateVector, NORM_TOLERANCE};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("parameter vector has length {found}, circuit needs {expected}")]
    ParamLength { expected: usize, found: usize },
    #[error("unknown gate kind `{0}`")]
    UnknownGate(String),
    #[error("{kind} takes a different number of qubits/params (got {qubits} qubits, {params} params)")]
    BadArity {
        kind: GateKind,
        qubits: usize,
        params: usize,
    },
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("qubit {0} listed twice in one gate")]
    RepeatedQubit(usize),
    #[error("parameter slot {slot} out of range ({n_params} slots)")]
    ParamOutOfRange { slot: usize, n_params: usize },
    #[error("unsupported qubit count {0}")]
    BadQubitCount(usize),
    #[error("invalid bitstring `{0}`")]
    InvalidBitstring(String),
    #[error("invalid Pauli string `{0}`")]
    BadPauli(String),
    #[error("amplitude vector length {0} is not a power of two ≥ 2")]
    BadLength(usize),
    #[error("state not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("circuit JSON: {0}")]
    Json(String),
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64, SimError> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Haar-random state from a seed.
pub fn haar_random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StateVector::haar_random(n, &mut rng)
}
