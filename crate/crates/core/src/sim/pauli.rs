use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SimError, StateVector};

/// Tensor product of single-qubit Paulis. Character `i` acts on qubit `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString {
    ops: String,
    x_mask: usize,
    z_mask: usize,
    n_y: u32,
}

impl PauliString {
    pub fn new(ops: &str) -> Result<Self, SimError> {
        let n = ops.chars().count();
        if n == 0 || n > StateVector::MAX_QUBITS {
            return Err(SimError::BadPauli(ops.to_string()));
        }
        let mut x_mask = 0usize;
        let mut z_mask = 0usize;
        let mut n_y = 0u32;
        for (q, ch) in ops.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => x_mask |= 1 << q,
                'Y' => {
                    x_mask |= 1 << q;
                    z_mask |= 1 << q;
                    n_y += 1;
                }
                'Z' => z_mask |= 1 << q,
                _ => return Err(SimError::BadPauli(ops.to_string())),
            }
        }
        Ok(Self {
            ops: ops.to_string(),
            x_mask,
            z_mask,
            n_y,
        })
    }

    /// All-identity string on `n` qubits.
    pub fn identity(n: usize) -> Self {
        Self::new(&"I".repeat(n)).expect("identity is valid")
    }

    /// Single `op` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, op: char) -> Result<Self, SimError> {
        let s: String = (0..n).map(|q| if q == qubit { op } else { 'I' }).collect();
        Self::new(&s)
    }

    pub fn n_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn as_str(&self) -> &str {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Phase in `P|j⟩ = phase(j)·|j ⊕ x⟩`.
    fn phase(&self, j: usize) -> Complex64 {
        let sign = if (j & self.z_mask).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        // Y = iXZ, so the i^{n_Y} factor multiplies the X·Z product.
        let iy = match self.n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        iy * sign
    }

    /// Column `j` of the matrix: the row index and value of its single nonzero entry.
    pub fn column(&self, j: usize) -> (usize, Complex64) {
        (j ^ self.x_mask, self.phase(j))
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64, SimError> {
        if state.n_qubits() != self.n_qubits() {
            return Err(SimError::DimensionMismatch {
                expected: self.n_qubits(),
                found: state.n_qubits(),
            });
        }
        let amps = state.amplitudes();
        if self.x_mask == 0 {
            let z = self.z_mask;
            return Ok(amps
                .iter()
                .enumerate()
                .map(|(j, a)| {
                    if (j & z).count_ones().is_multiple_of(2) {
                        a.norm_sqr()
                    } else {
                        -a.norm_sqr()
                    }
                })
                .sum());
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, a) in amps.iter().enumerate() {
            let (i, ph) = self.column(j);
            acc += amps[i].conj() * ph * a;
        }
        Ok(acc.re)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ops)
    }
}

impl FromStr for PauliString {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl TryFrom<String> for PauliString {
    type Error = SimError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Self::new(&s)
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> Self {
        p.ops
    }
}

/// `⟨ψ|P|ψ⟩` for a single Pauli string.
pub fn pauli_expectation(state: &StateVector, term: &PauliString) -> Result<f64, SimError> {
    term.expectation(state)
}
