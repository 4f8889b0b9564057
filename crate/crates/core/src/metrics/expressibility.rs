use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MetricConfig, MetricError, STREAM_EXPR};
use crate::rng::SeedSplitter;
use crate::sim::{fidelity, Circuit, StateVector};

/// Binned pairwise-fidelity distribution next to its Haar reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityHistogram {
    pub edges: Vec<f64>,
    pub pqc_mass: Vec<f64>,
    pub haar_mass: Vec<f64>,
}

impl FidelityHistogram {
    /// Bins `fidelities` against the Haar reference for dimension `dim`.
    pub fn from_fidelities(fidelities: &[f64], edges: Vec<f64>, dim: usize) -> Result<Self, MetricError> {
        let haar_mass = haar_bin_mass(&edges, dim)?;
        let b = edges.len() - 1;
        let mut counts = vec![0usize; b];
        for &f in fidelities {
            counts[bin_index(&edges, f)] += 1;
        }
        let total = fidelities.len().max(1) as f64;
        let pqc_mass = counts.iter().map(|&c| c as f64 / total).collect();
        Ok(Self {
            edges,
            pqc_mass,
            haar_mass,
        })
    }

    /// `Σ p ln(p/q)` with empty bins contributing zero.
    pub fn kl(&self) -> f64 {
        kl_divergence(&self.pqc_mass, &self.haar_mass)
    }

    /// CSV rows `bin_lo,bin_hi,pqc_mass,haar_mass` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_lo,bin_hi,pqc_mass,haar_mass\n");
        for i in 0..self.pqc_mass.len() {
            s.push_str(&format!(
                "{},{},{},{}\n",
                self.edges[i],
                self.edges[i + 1],
                self.pqc_mass[i],
                self.haar_mass[i]
            ));
        }
        s
    }
}

/// Index of the bin containing `f`; the last bin is closed on the right.
pub fn bin_index(edges: &[f64], f: f64) -> usize {
    let b = edges.len() - 1;
    edges[1..b].partition_point(|&e| e <= f)
}

/// `Σ p ln(p/q)` over bins with `p > 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * (pi / qi).ln())
        .sum::<f64>()
        .max(0.0)
}

/// Haar mass of each bin: `[a, b] ↦ (1−a)^{N−1} − (1−b)^{N−1}`.
pub fn haar_bin_mass(edges: &[f64], dim: usize) -> Result<Vec<f64>, MetricError> {
    if dim < 2 {
        return Err(MetricError::Config(format!("Hilbert dimension {dim} < 2")));
    }
    if edges.len() < 2
        || edges[0] != 0.0
        || *edges.last().expect("non-empty") != 1.0
        || edges.windows(2).any(|w| !(w[0] < w[1]))
    {
        return Err(MetricError::Config("bin edges must ascend strictly from 0 to 1".into()));
    }
    let k = (dim - 1) as f64;
    // (1−x)^{N−1} via exp/ln1p keeps precision for tiny x at large N
    let tail = |x: f64| if x >= 1.0 { 0.0 } else { (k * (-x).ln_1p()).exp() };
    Ok(edges.windows(2).map(|w| tail(w[0]) - tail(w[1])).collect())
}

/// `B` bins whose last one carries at least `eps` Haar mass.
///
/// The first `B − 1` bins split `[0, b]` uniformly with
/// `b = min((B−1)/B, 1 − eps^{1/(N−1)})`; the last bin is `[b, 1]`.
pub fn truncated_edges(bins: usize, dim: usize, eps: f64) -> Result<Vec<f64>, MetricError> {
    if bins < 2 {
        return Err(MetricError::Config(format!("need at least 2 bins, got {bins}")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(MetricError::Config(format!("eps {eps} outside [0, 1)")));
    }
    if dim < 2 {
        return Err(MetricError::Config(format!("Hilbert dimension {dim} < 2")));
    }
    let uniform = (bins - 1) as f64 / bins as f64;
    let b = if eps > 0.0 {
        uniform.min(1.0 - eps.powf(1.0 / (dim - 1) as f64))
    } else {
        uniform
    };
    let mut edges: Vec<f64> = (0..bins).map(|i| b * i as f64 / (bins - 1) as f64).collect();
    edges.push(1.0);
    Ok(edges)
}

/// KL of a histogram concentrated in the final bin: the largest value any binned ensemble can reach.
pub fn default_expr_max(edges: &[f64], dim: usize) -> Result<f64, MetricError> {
    let haar = haar_bin_mass(edges, dim)?;
    Ok(-haar[haar.len() - 1].ln())
}

/// Expressibility estimate and the histogram for each initial state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpressibilityResult {
    pub expr: f64,
    pub per_state: Vec<f64>,
    pub histograms: Vec<FidelityHistogram>,
}

/// Mean over initial states of `KL(P_PQC(F) ‖ P_Haar(F))`, with
/// `n_fidelity_pairs` independent parameter pairs per state.
pub fn expressibility(circuit: &Circuit, cfg: &MetricConfig, seed: u64) -> Result<ExpressibilityResult, MetricError> {
    cfg.validate_for(circuit.n)?;
    let dim = 1usize << circuit.n;
    let edges = truncated_edges(cfg.n_bins, dim, cfg.eps_truncation)?;
    let splitter = SeedSplitter::new(seed).child(STREAM_EXPR, 0);
    let (lo, hi) = cfg.param_domain;
    let mut per_state = Vec::new();
    let mut histograms = Vec::new();
    for (s, init) in cfg.initial_states.iter().enumerate() {
        let psi0 = init.state(circuit.n)?;
        let fids: Vec<f64> = (0..cfg.n_fidelity_pairs)
            .into_par_iter()
            .map(|k| {
                let mut rng = splitter.rng(s as u64, k as u64);
                let a: Vec<f64> = (0..circuit.n_params).map(|_| rng.random_range(lo..hi)).collect();
                let b: Vec<f64> = (0..circuit.n_params).map(|_| rng.random_range(lo..hi)).collect();
                let sa = circuit.apply(&a, &psi0)?;
                let sb = circuit.apply(&b, &psi0)?;
                Ok(fidelity(&sa, &sb)?)
            })
            .collect::<Result<_, MetricError>>()?;
        let h = FidelityHistogram::from_fidelities(&fids, edges.clone(), dim)?;
        per_state.push(h.kl());
        histograms.push(h);
    }
    let expr = per_state.iter().sum::<f64>() / per_state.len() as f64;
    Ok(ExpressibilityResult {
        expr,
        per_state,
        histograms,
    })
}

/// Expressibility of pairs of Haar-random states, the sampling-noise floor of the estimator.
pub fn haar_expressibility(n: usize, cfg: &MetricConfig, seed: u64) -> Result<f64, MetricError> {
    let dim = 1usize << n;
    let edges = truncated_edges(cfg.n_bins, dim, cfg.eps_truncation)?;
    let splitter = SeedSplitter::new(seed).child(STREAM_EXPR, 1);
    let fids: Vec<f64> = (0..cfg.n_fidelity_pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = splitter.rng(0, k as u64);
            let a = StateVector::haar_random(n, &mut rng);
            let b = StateVector::haar_random(n, &mut rng);
            fidelity(&a, &b).expect("same size")
        })
        .collect();
    Ok(FidelityHistogram::from_fidelities(&fids, edges, dim)?.kl())
}

/// `clamp(ln(expr/τ)/ln(Expr_max/τ), 0, 1)`; `expr = 0` maps to 0.
pub fn expr_loss(expr: f64, tau: f64, expr_max: f64) -> f64 {
    if expr <= 0.0 {
        return 0.0;
    }
    ((expr / tau).ln() / (expr_max / tau).ln()).clamp(0.0, 1.0)
}
