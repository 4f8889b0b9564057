//! Variational energy minimization over a fixed ansatz.
//!
//! The optimizer is plain gradient descent on central finite differences. It
//! stops when the gradient norm drops below the tolerance or after
//! `max_iter` steps.

use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::{exact_ground_energy, load_pauli_sum, HamiltonianError, PauliSum};
use crate::rng::SeedSplitter;
use crate::sim::{Circuit, GateKind, GateSpec, SimError, StateVector};

#[derive(Debug, Error)]
pub enum VqeError {
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("non-finite energy {energy} at iteration {iter}")]
    NonFinite { iter: usize, energy: f64 },
    #[error("ansatz acts on {ansatz} qubits but the Hamiltonian on {hamiltonian}")]
    QubitMismatch { ansatz: usize, hamiltonian: usize },
    #[error("Hamiltonians in a sweep act on different qubit counts ({0} vs {1})")]
    MixedQubitCounts(usize, usize),
    #[error("spin-orbital count must be even, got {0}")]
    OddOrbitalCount(usize),
    #[error("invalid optimizer setting: {0}")]
    Config(String),
}

/// Starting parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitParams {
    #[default]
    Zeros,
    /// Uniform on `[0, 2π)`.
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    pub max_iter: usize,
    pub fd_step: f64,
    pub learning_rate: f64,
    /// Stop once the gradient norm is below this.
    pub tolerance: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            fd_step: 1e-6,
            learning_rate: 0.2,
            tolerance: 1e-7,
        }
    }
}

impl OptimizerSettings {
    fn validate(&self) -> Result<(), VqeError> {
        if !(self.fd_step > 0.0 && self.learning_rate > 0.0 && self.tolerance > 0.0) {
            return Err(VqeError::Config(
                "fd_step, learning_rate and tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub hamiltonian: PathBuf,
    pub ansatz: Circuit,
    /// Reference occupation; character `i` is qubit `i`.
    pub reference: String,
    #[serde(default)]
    pub init: InitParams,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeIteration {
    pub iter: usize,
    pub energy: f64,
    pub theta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeTrace {
    pub iterations: Vec<VqeIteration>,
    pub final_energy: f64,
    pub final_theta: Vec<f64>,
    pub exact_energy: f64,
    pub gap: f64,
    pub converged: bool,
}

impl VqeTrace {
    /// CSV `iteration,energy` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,energy\n");
        for it in &self.iterations {
            s.push_str(&format!("{},{}\n", it.iter, it.energy));
        }
        s
    }
}

/// Basis state for an occupation bitstring.
pub fn prepare_reference(bits: &str) -> Result<StateVector, SimError> {
    StateVector::from_bitstring(bits)
}

/// Spin-conserving excitation templates for `n_spatial` orbitals in blocked
/// ordering (α on qubits `0..n_spatial`, β on `n_spatial..2·n_spatial`).
///
/// Singles pair two orbitals of the same block. Doubles `[i, j, k, l]` exchange
/// the pair `{i, j}` with `{k, l}`, where both pairs carry the same `S_z`; each
/// pair partition appears once, with `i` the smallest index.
pub fn spin_conserving_pool(n_spatial: usize) -> Vec<GateSpec> {
    let n = 2 * n_spatial;
    let spin = |q: usize| usize::from(q >= n_spatial);
    let mut pool = Vec::new();
    for i in 0..n {
        for k in i + 1..n {
            if spin(i) == spin(k) {
                pool.push(GateSpec::new(GateKind::SingleExc, vec![i, k], vec![0]));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in i + 1..n {
                for l in k + 1..n {
                    if k == j || l == j {
                        continue;
                    }
                    if spin(i) + spin(j) == spin(k) + spin(l) {
                        pool.push(GateSpec::new(GateKind::DoubleExc, vec![i, j, k, l], vec![0]));
                    }
                }
            }
        }
    }
    pool
}

/// Same as [`spin_conserving_pool`] but checks that `n` is even.
pub fn spin_conserving_pool_for_qubits(n: usize) -> Result<Vec<GateSpec>, VqeError> {
    if !n.is_multiple_of(2) {
        return Err(VqeError::OddOrbitalCount(n));
    }
    Ok(spin_conserving_pool(n / 2))
}

/// `SingleExc(0,1)`, `SingleExc(2,3)`, `DoubleExc[0,2,1,3]`: the singles and the
/// double that connect the blocked-ordering reference `1010` to the rest of its
/// particle-number sector.
pub fn h2_excitation_ansatz() -> Circuit {
    let mut c = Circuit::new(4);
    c.push_fresh(GateKind::SingleExc, &[0, 1])
        .push_fresh(GateKind::SingleExc, &[2, 3])
        .push_fresh(GateKind::DoubleExc, &[0, 2, 1, 3]);
    c
}

fn initial_theta(n_params: usize, init: InitParams, seed: u64) -> Vec<f64> {
    match init {
        InitParams::Zeros => vec![0.0; n_params],
        InitParams::Uniform => {
            let mut rng = SeedSplitter::new(seed).rng(0, 0);
            (0..n_params)
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect()
        }
    }
}

/// Gradient descent from explicit starting parameters.
pub fn minimize(
    h: &PauliSum,
    ansatz: &Circuit,
    reference: &StateVector,
    theta0: Vec<f64>,
    opt: &OptimizerSettings,
) -> Result<(Vec<VqeIteration>, bool), VqeError> {
    opt.validate()?;
    if ansatz.n != h.n_qubits() {
        return Err(VqeError::QubitMismatch {
            ansatz: ansatz.n,
            hamiltonian: h.n_qubits(),
        });
    }
    let energy = |t: &[f64]| -> Result<f64, VqeError> { Ok(h.energy(&ansatz.apply(t, reference)?)?) };
    let mut theta = theta0;
    let mut iterations = Vec::new();
    let mut converged = false;
    for iter in 0..=opt.max_iter {
        let e = energy(&theta)?;
        if !e.is_finite() {
            return Err(VqeError::NonFinite { iter, energy: e });
        }
        iterations.push(VqeIteration {
            iter,
            energy: e,
            theta: theta.clone(),
        });
        let mut grad = vec![0.0; theta.len()];
        for i in 0..theta.len() {
            let t0 = theta[i];
            theta[i] = t0 + opt.fd_step;
            let ep = energy(&theta)?;
            theta[i] = t0 - opt.fd_step;
            let em = energy(&theta)?;
            theta[i] = t0;
            grad[i] = (ep - em) / (2.0 * opt.fd_step);
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < opt.tolerance {
            converged = true;
            break;
        }
        if iter == opt.max_iter {
            break;
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= opt.learning_rate * g;
        }
    }
    Ok((iterations, converged))
}

/// Runs VQE against an already loaded Hamiltonian.
pub fn run_vqe_with(h: &PauliSum, cfg: &VqeConfig) -> Result<VqeTrace, VqeError> {
    let reference = prepare_reference(&cfg.reference)?;
    if reference.n_qubits() != h.n_qubits() {
        return Err(VqeError::QubitMismatch {
            ansatz: reference.n_qubits(),
            hamiltonian: h.n_qubits(),
        });
    }
    cfg.ansatz.validate()?;
    let theta0 = initial_theta(cfg.ansatz.n_params, cfg.init, cfg.seed);
    let (iterations, converged) = minimize(h, &cfg.ansatz, &reference, theta0, &cfg.optimizer)?;
    let (exact_energy, _) = exact_ground_energy(h)?;
    let last = iterations.last().expect("at least one iterate");
    Ok(VqeTrace {
        final_energy: last.energy,
        final_theta: last.theta.clone(),
        exact_energy,
        gap: last.energy - exact_energy,
        converged,
        iterations,
    })
}

/// Loads `cfg.hamiltonian` and runs VQE.
pub fn run_vqe(cfg: &VqeConfig) -> Result<VqeTrace, VqeError> {
    let h = load_pauli_sum(&cfg.hamiltonian)?;
    run_vqe_with(&h, cfg)
}

/// Runs the same ansatz against several Hamiltonian files in parallel.
pub fn geometry_sweep(cfg: &VqeConfig, paths: &[impl AsRef<Path> + Sync]) -> Result<Vec<VqeTrace>, VqeError> {
    let hs = paths.iter().map(load_pauli_sum).collect::<Result<Vec<_>, _>>()?;
    if let Some(first) = hs.first() {
        if let Some(bad) = hs.iter().find(|h| h.n_qubits() != first.n_qubits()) {
            return Err(VqeError::MixedQubitCounts(first.n_qubits(), bad.n_qubits()));
        }
    }
    hs.par_iter().map(|h| run_vqe_with(h, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn toy_cfg() -> VqeConfig {
        let mut c = Circuit::new(1);
        c.push_fresh(GateKind::RX, &[0]);
        VqeConfig {
            hamiltonian: PathBuf::new(),
            ansatz: c,
            reference: "0".into(),
            init: InitParams::Zeros,
            optimizer: OptimizerSettings {
                tolerance: 1e-8,
                ..OptimizerSettings::default()
            },
            seed: 0,
        }
    }

    #[test]
    fn rx_toy_converges() {
        let h = PauliSum::from_strs(&[(1.0, "Z")]).unwrap();
        let cfg = toy_cfg();
        let (its, conv) = minimize(&h, &cfg.ansatz, &StateVector::zero(1), vec![0.1], &cfg.optimizer).unwrap();
        assert!(conv);
        assert_abs_diff_eq!(its.last().unwrap().energy, -1.0, epsilon = 1e-6);
        for w in its.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-15);
        }
    }

    #[test]
    fn stationary_start_stops_immediately() {
        let h = PauliSum::from_strs(&[(1.0, "Z")]).unwrap();
        let cfg = toy_cfg();
        let trace = run_vqe_with(&h, &cfg).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iterations.len(), 1);
        assert_abs_diff_eq!(trace.final_energy, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn pool_for_two_spatial_orbitals() {
        let pool = spin_conserving_pool(2);
        let singles: Vec<_> = pool
            .iter()
            .filter(|g| g.kind == GateKind::SingleExc)
            .map(|g| g.qubits.clone())
            .collect();
        let doubles: Vec<_> = pool
            .iter()
            .filter(|g| g.kind == GateKind::DoubleExc)
            .map(|g| g.qubits.clone())
            .collect();
        assert_eq!(singles, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(doubles, vec![vec![0, 2, 1, 3], vec![0, 3, 1, 2]]);
        assert!(spin_conserving_pool_for_qubits(5).is_err());
    }

    #[test]
    fn reference_states() {
        assert_eq!(prepare_reference("0000").unwrap(), StateVector::zero(4));
        assert_eq!(prepare_reference("1010").unwrap(), StateVector::basis(4, 0b0101));
        assert!(prepare_reference("10a0").is_err());
    }

    #[test]
    fn qubit_mismatch_is_an_error() {
        let h = PauliSum::from_strs(&[(1.0, "ZZ")]).unwrap();
        assert!(matches!(
            run_vqe_with(&h, &toy_cfg()),
            Err(VqeError::QubitMismatch { .. })
        ));
    }
}
