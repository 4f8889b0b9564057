use rand::Rng;
use rayon::prelude::*;

use super::{MetricConfig, MetricError, STREAM_ENT};
use crate::rng::SeedSplitter;
use crate::sim::{Circuit, StateVector};

/// Meyer–Wallach `Q = (2/n) Σ_j (1 − Tr ρ_j²)`.
pub fn meyer_wallach(state: &StateVector) -> f64 {
    let n = state.n_qubits();
    let mut acc = 0.0;
    for q in 0..n {
        let (p0, p1, off) = state.single_qubit_rdm(q);
        let purity = p0 * p0 + p1 * p1 + 2.0 * off.norm_sqr();
        acc += 1.0 - purity;
    }
    (2.0 * acc / n as f64).max(0.0)
}

/// Mean Meyer–Wallach value over sampled parameters and initial states.
pub fn entanglement(circuit: &Circuit, cfg: &MetricConfig, seed: u64) -> Result<f64, MetricError> {
    cfg.validate_for(circuit.n)?;
    let splitter = SeedSplitter::new(seed).child(STREAM_ENT, 0);
    let (lo, hi) = cfg.param_domain;
    let mut total = 0.0;
    for (s, init) in cfg.initial_states.iter().enumerate() {
        let psi0 = init.state(circuit.n)?;
        let qs: Vec<f64> = (0..cfg.n_fidelity_pairs)
            .into_par_iter()
            .map(|k| {
                let mut rng = splitter.rng(s as u64, k as u64);
                let theta: Vec<f64> = (0..circuit.n_params).map(|_| rng.random_range(lo..hi)).collect();
                Ok(meyer_wallach(&circuit.apply(&theta, &psi0)?))
            })
            .collect::<Result<_, MetricError>>()?;
        total += qs.iter().sum::<f64>() / qs.len() as f64;
    }
    Ok(total / cfg.initial_states.len() as f64)
}

/// `max((τ − Ent)/τ, 0)`; a zero threshold is always met.
pub fn ent_loss(ent: f64, tau_ent: f64) -> f64 {
    if tau_ent <= 0.0 {
        return 0.0;
    }
    ((tau_ent - ent) / tau_ent).clamp(0.0, 1.0)
}
