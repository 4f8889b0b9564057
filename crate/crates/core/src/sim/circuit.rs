use serde::{Deserialize, Serialize};

use super::{GateKind, GateSpec, SimError, StateVector};

/// Ordered gate list over `n` qubits with `n_params` shared-or-distinct parameter slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Circuit {
    pub n: usize,
    pub n_params: usize,
    pub gates: Vec<GateSpec>,
}

/// `(|θ|, G, D)` of a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complexity {
    pub n_params: usize,
    pub gates: usize,
    pub depth: usize,
}

impl Circuit {
    /// Empty circuit.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            n_params: 0,
            gates: Vec::new(),
        }
    }

    /// Builds a circuit and validates every gate.
    pub fn from_gates(n: usize, n_params: usize, gates: Vec<GateSpec>) -> Result<Self, SimError> {
        let c = Self { n, n_params, gates };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n == 0 || self.n > StateVector::MAX_QUBITS {
            return Err(SimError::BadQubitCount(self.n));
        }
        for g in &self.gates {
            g.validate(self.n, self.n_params)?;
        }
        Ok(())
    }

    /// Appends a gate whose parameters each take a fresh slot.
    pub fn push_fresh(&mut self, kind: GateKind, qubits: &[usize]) -> &mut Self {
        let params: Vec<usize> = (0..kind.n_params()).map(|k| self.n_params + k).collect();
        self.n_params += kind.n_params();
        self.gates.push(GateSpec::new(kind, qubits.to_vec(), params));
        self
    }

    /// Appends a gate with explicit slots, growing `n_params` if needed.
    pub fn push(&mut self, kind: GateKind, qubits: &[usize], params: &[usize]) -> &mut Self {
        if let Some(&m) = params.iter().max() {
            self.n_params = self.n_params.max(m + 1);
        }
        self.gates.push(GateSpec::new(kind, qubits.to_vec(), params.to_vec()));
        self
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// ASAP layering depth: each gate sits one layer above the latest gate on any of its qubits.
    pub fn depth(&self) -> usize {
        let mut layer = vec![0usize; self.n];
        let mut depth = 0;
        for g in &self.gates {
            let l = 1 + g.qubits.iter().map(|&q| layer[q]).max().unwrap_or(0);
            for &q in &g.qubits {
                layer[q] = l;
            }
            depth = depth.max(l);
        }
        depth
    }

    pub fn complexity(&self) -> Complexity {
        Complexity {
            n_params: self.n_params,
            gates: self.gate_count(),
            depth: self.depth(),
        }
    }

    /// Applies the circuit to `input`, returning the output state.
    pub fn apply(&self, theta: &[f64], input: &StateVector) -> Result<StateVector, SimError> {
        if input.n_qubits() != self.n {
            return Err(SimError::DimensionMismatch {
                expected: self.n,
                found: input.n_qubits(),
            });
        }
        if theta.len() != self.n_params {
            return Err(SimError::ParamLength {
                expected: self.n_params,
                found: theta.len(),
            });
        }
        self.validate()?;
        let mut out = input.clone();
        let mut angles = [0.0f64; 2];
        for g in &self.gates {
            for (a, &p) in angles.iter_mut().zip(&g.params) {
                *a = theta[p];
            }
            g.apply(&mut out, &angles[..g.params.len()]);
        }
        Ok(out)
    }

    /// Applies `U(θ)†`: gates reversed, angles negated (`R(θ, φ)` inverts as `R(−θ, φ)`).
    pub fn apply_inverse(&self, theta: &[f64], input: &StateVector) -> Result<StateVector, SimError> {
        if input.n_qubits() != self.n {
            return Err(SimError::DimensionMismatch {
                expected: self.n,
                found: input.n_qubits(),
            });
        }
        if theta.len() != self.n_params {
            return Err(SimError::ParamLength {
                expected: self.n_params,
                found: theta.len(),
            });
        }
        self.validate()?;
        let mut out = input.clone();
        for g in self.gates.iter().rev() {
            let angles: Vec<f64> = match g.kind {
                GateKind::R => vec![-theta[g.params[0]], theta[g.params[1]]],
                _ => g.params.iter().map(|&p| -theta[p]).collect(),
            };
            g.apply(&mut out, &angles);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, SimError> {
        let c: Circuit = serde_json::from_str(s).map_err(|e| SimError::Json(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}

/// Applies `circuit` with parameters `theta` to `input`.
pub fn apply_circuit(circuit: &Circuit, theta: &[f64], input: &StateVector) -> Result<StateVector, SimError> {
    circuit.apply(theta, input)
}
