//! Circuit metrics and their losses.
//!
//! - expressibility: KL divergence between the binned pairwise-fidelity
//!   distribution of a circuit and the Haar reference, with optional
//!   truncation of the last bin
//! - trainability: variance of clipped finite-difference gradients, divided
//!   by a heuristic circuit error probability
//! - entanglement: mean Meyer–Wallach measure
//! - complexity: `|θ| + D + G` relative to caps

mod complexity;
mod entanglement;
mod expressibility;
mod trainability;

pub use complexity::{cmplx_loss, Caps};
pub use entanglement::{ent_loss, entanglement, meyer_wallach};
pub use expressibility::{
    bin_index, default_expr_max, expr_loss, expressibility, haar_bin_mass, haar_expressibility, kl_divergence,
    truncated_edges, ExpressibilityResult, FidelityHistogram,
};
pub use trainability::{
    circuit_error_probability, default_observable, train_loss, trainability, NoiseModel, TrainabilityResult,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concentration::ConcentrationError;
use crate::hamiltonian::PauliSum;
use crate::rng::SeedSplitter;
use crate::sim::{Circuit, Complexity, SimError, StateVector};

pub(crate) const STREAM_EXPR: u64 = 1;
pub(crate) const STREAM_TRAIN: u64 = 2;
pub(crate) const STREAM_ENT: u64 = 3;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("invalid metric configuration: {0}")]
    Config(String),
    #[error("trainability needs at least one parameter")]
    NoParameters,
    #[error("circuit error probability is zero; cannot normalize trainability")]
    ZeroErrorProbability,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Concentration(#[from] ConcentrationError),
}

/// Reference state fed to a circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum InitialState {
    /// `|0…0⟩`
    Zero,
    /// `|+…+⟩`
    Plus,
    /// Computational basis state; character `i` is qubit `i`.
    Bits(String),
}

impl InitialState {
    pub fn state(&self, n: usize) -> Result<StateVector, SimError> {
        match self {
            InitialState::Zero => Ok(StateVector::zero(n)),
            InitialState::Plus => Ok(StateVector::plus(n)),
            InitialState::Bits(b) => {
                let s = StateVector::from_bitstring(b)?;
                if s.n_qubits() != n {
                    return Err(SimError::DimensionMismatch {
                        expected: n,
                        found: s.n_qubits(),
                    });
                }
                Ok(s)
            }
        }
    }
}

impl FromStr for InitialState {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(InitialState::Zero),
            "plus" => Ok(InitialState::Plus),
            b if !b.is_empty() && b.chars().all(|c| c == '0' || c == '1') => Ok(InitialState::Bits(b.to_string())),
            _ => Err(SimError::InvalidBitstring(s.to_string())),
        }
    }
}

impl TryFrom<String> for InitialState {
    type Error = SimError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<InitialState> for String {
    fn from(s: InitialState) -> Self {
        s.to_string()
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Zero => f.write_str("zero"),
            InitialState::Plus => f.write_str("plus"),
            InitialState::Bits(b) => f.write_str(b),
        }
    }
}

/// Sample sizes, thresholds and estimator settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    /// Parameter pairs for expressibility; parameter draws for entanglement.
    pub n_fidelity_pairs: usize,
    pub n_bins: usize,
    pub eps_truncation: f64,
    pub tau_expr: f64,
    /// `None` uses [`default_expr_max`] for the active binning.
    pub expr_max: Option<f64>,
    pub tau_bp: f64,
    pub tau_ent: f64,
    pub m_gradient_samples: usize,
    pub clip_bounds: (f64, f64),
    /// Failure probability attached to each variance estimate.
    pub delta: f64,
    pub fd_step: f64,
    pub param_domain: (f64, f64),
    pub initial_states: Vec<InitialState>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            n_fidelity_pairs: 5_000,
            n_bins: 75,
            eps_truncation: 0.0,
            tau_expr: 0.005,
            expr_max: None,
            tau_bp: 8.0,
            tau_ent: 0.85,
            m_gradient_samples: 11_806,
            clip_bounds: (-1.0, 1.0),
            delta: 0.05,
            fd_step: 1e-7,
            param_domain: (0.0, std::f64::consts::TAU),
            initial_states: vec![InitialState::Zero],
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        let bad = |m: String| Err(MetricError::Config(m));
        if self.n_fidelity_pairs == 0 {
            return bad("n_fidelity_pairs must be positive".into());
        }
        if self.n_bins < 2 {
            return bad(format!("n_bins = {} < 2", self.n_bins));
        }
        if !(0.0..1.0).contains(&self.eps_truncation) {
            return bad(format!("eps_truncation = {} outside [0, 1)", self.eps_truncation));
        }
        if !(self.tau_expr > 0.0) {
            return bad("tau_expr must be positive".into());
        }
        if let Some(em) = self.expr_max {
            if !(em > self.tau_expr) {
                return bad(format!("expr_max = {em} must exceed tau_expr"));
            }
        }
        if !(self.tau_bp > 0.0) {
            return bad("tau_bp must be positive".into());
        }
        if !(self.tau_ent >= 0.0) {
            return bad("tau_ent must be non-negative".into());
        }
        if self.m_gradient_samples < 3 {
            return bad("m_gradient_samples must be at least 3".into());
        }
        if !(self.clip_bounds.0 < self.clip_bounds.1) {
            return bad("clip bounds need L < U".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)".into());
        }
        if !(self.fd_step > 0.0) {
            return bad("fd_step must be positive".into());
        }
        if !(self.param_domain.0 < self.param_domain.1) {
            return bad("param_domain needs lo < hi".into());
        }
        if self.initial_states.is_empty() {
            return bad("at least one initial state is required".into());
        }
        Ok(())
    }

    pub(crate) fn validate_for(&self, n: usize) -> Result<(), MetricError> {
        self.validate()?;
        for s in &self.initial_states {
            s.state(n)?;
        }
        Ok(())
    }

    /// Normalization point of the expressibility loss for `n` qubits.
    pub fn resolved_expr_max(&self, n: usize) -> Result<f64, MetricError> {
        match self.expr_max {
            Some(v) => Ok(v),
            None => {
                let dim = 1usize << n;
                default_expr_max(&truncated_edges(self.n_bins, dim, self.eps_truncation)?, dim)
            }
        }
    }
}

/// A metric that can be used as a search objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricKind {
    Expr,
    Train,
    Ent,
}

impl FromStr for MetricKind {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "expr" | "expressibility" => Ok(MetricKind::Expr),
            "train" | "trainability" => Ok(MetricKind::Train),
            "ent" | "entanglement" => Ok(MetricKind::Ent),
            _ => Err(MetricError::Config(format!("unknown metric `{s}`"))),
        }
    }
}

/// Losses in `[0, 1]`; `None` for metrics that were not evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Losses {
    pub expr: Option<f64>,
    pub train: Option<f64>,
    pub ent: Option<f64>,
    pub cmplx: Option<f64>,
}

impl Losses {
    pub fn get(&self, kind: MetricKind) -> Option<f64> {
        match kind {
            MetricKind::Expr => self.expr,
            MetricKind::Train => self.train,
            MetricKind::Ent => self.ent,
        }
    }
}

/// Metric values, losses and complexity of one circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub expr: Option<f64>,
    pub ent: Option<f64>,
    pub train_normalized: Option<f64>,
    pub train_mean_variance: Option<f64>,
    pub error_probability: Option<f64>,
    pub per_param_variance: Vec<f64>,
    pub losses: Losses,
    pub complexity: Complexity,
    pub seed: u64,
}

/// Everything [`evaluate`] needs besides the circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRequest<'a> {
    pub metrics: &'a [MetricKind],
    pub cfg: &'a MetricConfig,
    pub noise: Option<&'a NoiseModel>,
    pub observable: Option<&'a PauliSum>,
    pub caps: Option<&'a Caps>,
}

/// Output of [`evaluate`]: the report plus the expressibility histograms, if computed.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub report: MetricReport,
    pub histograms: Vec<FidelityHistogram>,
}

/// Computes the requested metrics and their losses. Each metric draws from its
/// own stream of `seed`.
pub fn evaluate(circuit: &Circuit, req: &EvalRequest<'_>, seed: u64) -> Result<Evaluation, MetricError> {
    let cfg = req.cfg;
    cfg.validate_for(circuit.n)?;
    let split = SeedSplitter::new(seed);
    let mut report = MetricReport {
        expr: None,
        ent: None,
        train_normalized: None,
        train_mean_variance: None,
        error_probability: None,
        per_param_variance: Vec::new(),
        losses: Losses::default(),
        complexity: circuit.complexity(),
        seed,
    };
    let mut histograms = Vec::new();
    if req.metrics.contains(&MetricKind::Expr) {
        let r = expressibility(circuit, cfg, split.derive(STREAM_EXPR, 0))?;
        let em = cfg.resolved_expr_max(circuit.n)?;
        report.losses.expr = Some(expr_loss(r.expr, cfg.tau_expr, em));
        report.expr = Some(r.expr);
        histograms = r.histograms;
    }
    if req.metrics.contains(&MetricKind::Train) {
        let default_obs;
        let obs = match req.observable {
            Some(o) => o,
            None => {
                default_obs = default_observable(circuit.n);
                &default_obs
            }
        };
        let r = trainability(circuit, obs, cfg, req.noise, split.derive(STREAM_TRAIN, 0))?;
        report.losses.train = Some(train_loss(r.train_normalized, cfg.tau_bp));
        report.train_normalized = Some(r.train_normalized);
        report.train_mean_variance = Some(r.mean_variance);
        report.error_probability = r.error_probability;
        report.per_param_variance = r.per_param_variance;
    }
    if req.metrics.contains(&MetricKind::Ent) {
        let e = entanglement(circuit, cfg, split.derive(STREAM_ENT, 0))?;
        report.losses.ent = Some(ent_loss(e, cfg.tau_ent));
        report.ent = Some(e);
    }
    if let Some(caps) = req.caps {
        report.losses.cmplx = Some(cmplx_loss(circuit, caps));
    }
    Ok(Evaluation { report, histograms })
}
