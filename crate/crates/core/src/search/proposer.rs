use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::space::{Decision, DecisionSpace, Decisions};

/// A finished trial as seen by a proposer: its choices and the value to minimize.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub decisions: Decisions,
    pub value: f64,
}

/// Suggests the next decision sequence given past observations.
pub trait Proposer: Send {
    fn propose(&mut self, history: &[Observation], space: &dyn DecisionSpace, rng: &mut ChaCha8Rng) -> Decisions;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposerKind {
    Random,
    #[default]
    Tpe,
}

impl ProposerKind {
    pub fn build(self, tpe: TpeSettings) -> Box<dyn Proposer> {
        match self {
            ProposerKind::Random => Box::new(RandomProposer),
            ProposerKind::Tpe => Box::new(TpeProposer::new(tpe)),
        }
    }
}

/// Uniform choice at every step.
#[derive(Clone, Copy, Debug, Default)]
pub struct RandomProposer;

impl Proposer for RandomProposer {
    fn propose(&mut self, _history: &[Observation], space: &dyn DecisionSpace, rng: &mut ChaCha8Rng) -> Decisions {
        space.sample(&mut |_, card| rng.random_range(0..card))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TpeSettings {
    /// Observations before the density model is used.
    pub n_startup: usize,
    /// Candidates drawn from the good-trial density per choice.
    pub n_candidates: usize,
    /// Fraction of observations treated as good, before the cap.
    pub gamma: f64,
    pub gamma_cap: usize,
    /// Total pseudo-count spread uniformly over the options.
    pub prior_weight: f64,
}

impl Default for TpeSettings {
    fn default() -> Self {
        Self {
            n_startup: 10,
            n_candidates: 24,
            gamma: 0.1,
            gamma_cap: 25,
            prior_weight: 1.0,
        }
    }
}

/// Tree-structured Parzen estimator over independent categorical choices.
///
/// Observations are split into the best `min(⌈γ·n⌉, cap)` and the rest. For each
/// choice the proposer forms smoothed frequency estimates `l(x)` over good
/// trials and `g(x)` over bad trials that reached this choice, draws
/// candidates from `l` and keeps the one maximizing `l(x)/g(x)`.
#[derive(Clone, Debug)]
pub struct TpeProposer {
    pub settings: TpeSettings,
}

impl TpeProposer {
    pub fn new(settings: TpeSettings) -> Self {
        Self { settings }
    }
}

#[derive(Default)]
struct Counts {
    good: HashMap<usize, f64>,
    good_total: f64,
    bad: HashMap<usize, f64>,
    bad_total: f64,
}

impl Proposer for TpeProposer {
    fn propose(&mut self, history: &[Observation], space: &dyn DecisionSpace, rng: &mut ChaCha8Rng) -> Decisions {
        let s = self.settings;
        if history.len() < s.n_startup {
            return space.sample(&mut |_, card| rng.random_range(0..card));
        }
        let mut order: Vec<usize> = (0..history.len()).collect();
        order.sort_by(|&a, &b| history[a].value.total_cmp(&history[b].value).then(a.cmp(&b)));
        let n_good = ((s.gamma * history.len() as f64).ceil() as usize)
            .min(s.gamma_cap)
            .max(1);
        let mut counts: HashMap<&str, Counts> = HashMap::new();
        for (rank, &idx) in order.iter().enumerate() {
            let good = rank < n_good;
            for Decision { name, value, .. } in &history[idx].decisions {
                let c = counts.entry(name.as_str()).or_default();
                if good {
                    *c.good.entry(*value).or_default() += 1.0;
                    c.good_total += 1.0;
                } else {
                    *c.bad.entry(*value).or_default() += 1.0;
                    c.bad_total += 1.0;
                }
            }
        }
        let empty = Counts::default();
        space.sample(&mut |name, card| {
            let c = counts.get(name).unwrap_or(&empty);
            let prior = s.prior_weight / card as f64;
            let l = |x: usize| (c.good.get(&x).copied().unwrap_or(0.0) + prior) / (c.good_total + s.prior_weight);
            let g = |x: usize| (c.bad.get(&x).copied().unwrap_or(0.0) + prior) / (c.bad_total + s.prior_weight);
            let mut best = 0usize;
            let mut best_score = f64::NEG_INFINITY;
            for _ in 0..s.n_candidates {
                // draw from l by inversion
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut x = card - 1;
                for k in 0..card {
                    acc += l(k);
                    if u < acc {
                        x = k;
                        break;
                    }
                }
                let score = l(x).ln() - g(x).ln();
                if score > best_score {
                    best_score = score;
                    best = x;
                }
            }
            best
        })
    }
}
