use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MetricConfig, MetricError, STREAM_TRAIN};
use crate::concentration::{clip, GradientSample, VarianceEstimate};
use crate::hamiltonian::PauliSum;
use crate::rng::SeedSplitter;
use crate::sim::{Circuit, GateKind};

/// Per-gate error probabilities for the circuit-level error heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    /// Two-qubit units charged for one `SingleExc`.
    #[serde(default = "default_single_exc_units")]
    pub single_exc_units: usize,
    /// Two-qubit units charged for one `DoubleExc`.
    #[serde(default = "default_double_exc_units")]
    pub double_exc_units: usize,
}

fn default_single_exc_units() -> usize {
    2
}

fn default_double_exc_units() -> usize {
    13
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            p1: 1e-3,
            p2: 1e-2,
            single_exc_units: default_single_exc_units(),
            double_exc_units: default_double_exc_units(),
        }
    }
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64) -> Self {
        Self {
            p1,
            p2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(MetricError::Config(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// `(N1, N2)`: one-qubit gates and two-qubit units.
    pub fn gate_counts(&self, circuit: &Circuit) -> (usize, usize) {
        let mut n1 = 0;
        let mut n2 = 0;
        for g in &circuit.gates {
            match g.kind {
                GateKind::H | GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::R => n1 += 1,
                GateKind::CX | GateKind::CZ | GateKind::CRX | GateKind::CRZ => n2 += 1,
                GateKind::SingleExc => n2 += self.single_exc_units,
                GateKind::DoubleExc => n2 += self.double_exc_units,
            }
        }
        (n1, n2)
    }

    /// `1 − (1−p1)^{N1} (1−p2)^{N2}`.
    pub fn error_probability(&self, n1: usize, n2: usize) -> f64 {
        1.0 - (1.0 - self.p1).powi(n1 as i32) * (1.0 - self.p2).powi(n2 as i32)
    }
}

/// Heuristic probability that at least one gate of `circuit` fails.
pub fn circuit_error_probability(circuit: &Circuit, noise: &NoiseModel) -> f64 {
    let (n1, n2) = noise.gate_counts(circuit);
    noise.error_probability(n1, n2)
}

/// Gradient-variance statistics of one circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainabilityResult {
    /// `mean s² / Pr_err`, or the raw mean when no noise model is used.
    pub train_normalized: f64,
    pub mean_variance: f64,
    pub error_probability: Option<f64>,
    /// Per slot, averaged over initial states.
    pub per_param_variance: Vec<f64>,
    /// One entry per (initial state, slot), state-major.
    pub estimates: Vec<VarianceEstimate>,
}

/// Default observable: `Z` on the last qubit.
pub fn default_observable(n: usize) -> PauliSum {
    PauliSum::new(vec![(
        1.0,
        crate::sim::PauliString::single(n, n - 1, 'Z').expect("valid"),
    )])
    .expect("non-empty")
}

/// Sampled variance of the clipped partial derivatives `∂C/∂θ_i`,
/// `C(θ) = ⟨ψ(θ)|O|ψ(θ)⟩`, averaged over slots and initial states.
///
/// Each sample draws a fresh `θ` from the parameter domain; the derivative is a
/// central difference with step `fd_step` applied to the whole slot.
pub fn trainability(
    circuit: &Circuit,
    observable: &PauliSum,
    cfg: &MetricConfig,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<TrainabilityResult, MetricError> {
    cfg.validate_for(circuit.n)?;
    if observable.n_qubits() != circuit.n {
        return Err(MetricError::Config(format!(
            "observable acts on {} qubits, circuit on {}",
            observable.n_qubits(),
            circuit.n
        )));
    }
    if circuit.n_params == 0 {
        return Err(MetricError::NoParameters);
    }
    let error_probability = match noise {
        Some(nm) => {
            nm.validate()?;
            let p = circuit_error_probability(circuit, nm);
            if p <= 0.0 {
                return Err(MetricError::ZeroErrorProbability);
            }
            Some(p)
        }
        None => None,
    };
    let m = cfg.m_gradient_samples;
    let (lo, hi) = cfg.clip_bounds;
    let (dlo, dhi) = cfg.param_domain;
    let h = cfg.fd_step;
    let splitter = SeedSplitter::new(seed).child(STREAM_TRAIN, 0);
    let p = circuit.n_params;
    let mut estimates = Vec::with_capacity(cfg.initial_states.len() * p);
    let mut per_param = vec![0.0; p];
    for (s, init) in cfg.initial_states.iter().enumerate() {
        let psi0 = init.state(circuit.n)?;
        let state_split = splitter.child(s as u64, 0);
        for (i, acc) in per_param.iter_mut().enumerate() {
            let grads: Vec<f64> = (0..m)
                .into_par_iter()
                .map(|k| {
                    let mut rng = state_split.rng(i as u64, k as u64);
                    let mut theta: Vec<f64> = (0..p).map(|_| rng.random_range(dlo..dhi)).collect();
                    let t0 = theta[i];
                    theta[i] = t0 + h;
                    let plus = observable.energy(&circuit.apply(&theta, &psi0)?)?;
                    theta[i] = t0 - h;
                    let minus = observable.energy(&circuit.apply(&theta, &psi0)?)?;
                    Ok((plus - minus) / (2.0 * h))
                })
                .collect::<Result<_, MetricError>>()?;
            let clipped = clip(&grads, lo, hi)?;
            let sample = GradientSample::new(clipped, lo, hi)?;
            let est = VarianceEstimate::from_sample(&sample, cfg.delta)?;
            *acc += est.s2;
            estimates.push(est);
        }
    }
    let n_states = cfg.initial_states.len() as f64;
    per_param.iter_mut().for_each(|v| *v /= n_states);
    let mean_variance = per_param.iter().sum::<f64>() / p as f64;
    let train_normalized = match error_probability {
        Some(pe) => mean_variance / pe,
        None => mean_variance,
    };
    Ok(TrainabilityResult {
        train_normalized,
        mean_variance,
        error_probability,
        per_param_variance: per_param,
        estimates,
    })
}

/// `max((τ − T)/τ, 0)`.
pub fn train_loss(train_normalized: f64, tau_bp: f64) -> f64 {
    ((tau_bp - train_normalized) / tau_bp).clamp(0.0, 1.0)
}
