//! Metric-driven circuit search.
//!
//! A proposer picks a decision sequence, the sequence is replayed into a
//! circuit under the caps, valid circuits are scored with the hierarchical
//! cost, and the loop repeats for `n_trials`. Sequences proposed more than
//! `duplicate_prune_limit` times are recorded but not evaluated again.

mod proposer;
mod space;

pub use proposer::{Observation, Proposer, ProposerKind, RandomProposer, TpeProposer, TpeSettings};
pub use space::{
    decision_key, enumerate_decisions, is_connected, BuildOutcome, CircuitSpace, Decision, DecisionSpace, Decisions,
    InvalidReason, KindPlacements,
};

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::PauliSum;
use crate::metrics::{evaluate, Caps, EvalRequest, MetricConfig, MetricError, MetricKind, MetricReport, NoiseModel};
use crate::rng::SeedSplitter;
use crate::sim::{Circuit, GateKind};

const STREAM_PROPOSE: u64 = 10;
const STREAM_METRIC: u64 = 11;
const STREAM_TEST: u64 = 12;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("malformed decision sequence: {0}")]
    MalformedDecisions(String),
    #[error("report lacks the {0:?} loss needed for the cost")]
    MissingLoss(&'static str),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("no feasible circuit in {} trials", history.len())]
    NoFeasibleCircuit { history: Vec<TrialRecord> },
}

fn default_prune_limit() -> usize {
    10
}

fn default_batch() -> usize {
    1
}

fn default_true() -> bool {
    true
}

/// Search space, budget, objectives and metric settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub gate_pool: Vec<GateKind>,
    /// Allowed two-qubit pairs (either orientation); `None` means all-to-all.
    #[serde(default)]
    pub topology: Option<Vec<(usize, usize)>>,
    pub caps: Caps,
    #[serde(default)]
    pub theta_min: usize,
    pub n_trials: usize,
    pub objectives: Vec<MetricKind>,
    #[serde(default)]
    pub metric: MetricConfig,
    #[serde(default)]
    pub noise: NoiseModel,
    /// Trainability observable; `None` means `Z` on the last qubit.
    #[serde(default)]
    pub observable: Option<PauliSum>,
    #[serde(default = "default_prune_limit")]
    pub duplicate_prune_limit: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub proposer: ProposerKind,
    #[serde(default)]
    pub tpe: TpeSettings,
    /// Proposals evaluated concurrently; each batch is proposed from the history
    /// available before the batch starts.
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    /// Restrict excitation gates to spin-conserving placements (blocked ordering).
    #[serde(default = "default_true")]
    pub spin_conserving_excitations: bool,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::Config(m));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.gate_pool.is_empty() {
            return bad("gate_pool is empty".into());
        }
        if self.caps.theta_max == 0 || self.caps.g_max == 0 || self.caps.d_max == 0 {
            return bad("caps must be positive".into());
        }
        if self.theta_min > self.caps.theta_max {
            return bad("theta_min exceeds theta_max".into());
        }
        if self.objectives.is_empty() {
            return bad("at least one objective is required".into());
        }
        if self.n_trials == 0 || self.batch_size == 0 {
            return bad("n_trials and batch_size must be positive".into());
        }
        if let Some(t) = &self.topology {
            if let Some(&(a, b)) = t.iter().find(|&&(a, b)| a >= self.n || b >= self.n || a == b) {
                return bad(format!("topology pair ({a}, {b}) is invalid for {} qubits", self.n));
            }
        }
        if let Some(o) = &self.observable {
            if o.n_qubits() != self.n {
                return bad("observable qubit count differs from n".into());
            }
        }
        self.metric.validate()?;
        if self.objectives.contains(&MetricKind::Train) {
            self.noise.validate()?;
        }
        Ok(())
    }

    /// Cost assigned to invalid trials when feeding the proposer: one above the
    /// largest reachable cost.
    pub fn invalid_cost(&self) -> f64 {
        self.objectives.len() as f64 + 2.0
    }
}

/// Sum of the chosen losses plus one while any is positive, else the complexity loss.
pub fn hierarchical_cost(report: &MetricReport, objectives: &[MetricKind]) -> Result<f64, SearchError> {
    let mut s = 0.0;
    for &k in objectives {
        s += report.losses.get(k).ok_or(SearchError::MissingLoss(match k {
            MetricKind::Expr => "expr",
            MetricKind::Train => "train",
            MetricKind::Ent => "ent",
        }))?;
    }
    if s > 0.0 {
        let c = s + 1.0;
        // keep the branches apart when s is below the rounding step at 1.0
        Ok(if c > 1.0 {
            c
        } else {
            f64::from_bits(1.0f64.to_bits() + 1)
        })
    } else {
        report.losses.cmplx.ok_or(SearchError::MissingLoss("cmplx"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrialStatus {
    Valid,
    Invalid { reason: InvalidReason },
    Pruned,
}

/// One iteration of the search loop. `cost` is present iff the trial was
/// valid and evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub decisions: Decisions,
    #[serde(flatten)]
    pub status: TrialStatus,
    pub circuit: Option<Circuit>,
    pub report: Option<MetricReport>,
    pub cost: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: TrialRecord,
    /// Best circuit re-evaluated on an independent seed.
    pub test_report: MetricReport,
    pub history: Vec<TrialRecord>,
}

/// Replays `decisions` under the caps of `cfg`.
pub fn build_circuit(decisions: &[Decision], cfg: &SearchConfig) -> Result<BuildOutcome, SearchError> {
    CircuitSpace::from_config(cfg)?.build(decisions, cfg.theta_min)
}

/// Runs the search with the proposer selected in `cfg`.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let mut p = cfg.proposer.build(cfg.tpe);
    run_search_with(cfg, p.as_mut())
}

/// Runs the search with an explicit proposer.
pub fn run_search_with(cfg: &SearchConfig, proposer: &mut dyn Proposer) -> Result<SearchOutcome, SearchError> {
    cfg.validate()?;
    let space = CircuitSpace::from_config(cfg)?;
    let splitter = SeedSplitter::new(cfg.seed);
    let req = EvalRequest {
        metrics: &cfg.objectives,
        cfg: &cfg.metric,
        noise: Some(&cfg.noise),
        observable: cfg.observable.as_ref(),
        caps: Some(&cfg.caps),
    };
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut history: Vec<TrialRecord> = Vec::with_capacity(cfg.n_trials);
    let mut observations: Vec<Observation> = Vec::new();

    let mut t = 0;
    while t < cfg.n_trials {
        let batch = cfg.batch_size.min(cfg.n_trials - t);
        let mut pending = Vec::with_capacity(batch);
        for j in 0..batch {
            let index = t + j;
            let start = Instant::now();
            let mut rng = splitter.rng(STREAM_PROPOSE, index as u64);
            let decisions = proposer.propose(&observations, &space, &mut rng);
            let count = seen.entry(decision_key(&decisions)).or_insert(0);
            *count += 1;
            let pruned = *count > cfg.duplicate_prune_limit;
            let outcome = if pruned {
                None
            } else {
                Some(space.build(&decisions, cfg.theta_min)?)
            };
            pending.push((index, decisions, outcome, start));
        }
        let records: Vec<TrialRecord> = pending
            .into_par_iter()
            .map(|(index, decisions, outcome, start)| {
                let (status, circuit, report, cost) = match outcome {
                    None => (TrialStatus::Pruned, None, None, None),
                    Some(BuildOutcome::Invalid { reason, .. }) => (TrialStatus::Invalid { reason }, None, None, None),
                    Some(BuildOutcome::Valid(c)) => {
                        let seed = splitter.derive(STREAM_METRIC, index as u64);
                        let ev = evaluate(&c, &req, seed)?;
                        let cost = hierarchical_cost(&ev.report, &cfg.objectives)?;
                        (TrialStatus::Valid, Some(c), Some(ev.report), Some(cost))
                    }
                };
                Ok(TrialRecord {
                    index,
                    decisions,
                    status,
                    circuit,
                    report,
                    cost,
                    wall_time_s: start.elapsed().as_secs_f64(),
                })
            })
            .collect::<Result<_, SearchError>>()?;
        for r in records {
            match (&r.status, r.cost) {
                (TrialStatus::Valid, Some(c)) => observations.push(Observation {
                    decisions: r.decisions.clone(),
                    value: c,
                }),
                (TrialStatus::Invalid { .. }, _) => observations.push(Observation {
                    decisions: r.decisions.clone(),
                    value: cfg.invalid_cost(),
                }),
                _ => {}
            }
            history.push(r);
        }
        t += batch;
    }

    let best = history
        .iter()
        .filter_map(|r| r.cost.map(|c| (c, r)))
        .fold(None::<(f64, &TrialRecord)>, |acc, (c, r)| match acc {
            Some((bc, _)) if bc <= c => acc,
            _ => Some((c, r)),
        })
        .map(|(_, r)| r.clone());
    let Some(best) = best else {
        return Err(SearchError::NoFeasibleCircuit { history });
    };
    let circuit = best.circuit.as_ref().expect("valid trial has a circuit");
    let test_report = evaluate(circuit, &req, splitter.derive(STREAM_TEST, 0))?.report;
    Ok(SearchOutcome {
        best,
        test_report,
        history,
    })
}

/// Running minimum of the cost over the history (`None` until the first valid trial).
pub fn running_best(history: &[TrialRecord]) -> Vec<Option<f64>> {
    let mut best: Option<f64> = None;
    history
        .iter()
        .map(|r| {
            if let Some(c) = r.cost {
                best = Some(best.map_or(c, |b: f64| b.min(c)));
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Losses;
    use crate::sim::Complexity;

    fn report(expr: Option<f64>, train: Option<f64>, cmplx: f64) -> MetricReport {
        MetricReport {
            expr: None,
            ent: None,
            train_normalized: None,
            train_mean_variance: None,
            error_probability: None,
            per_param_variance: vec![],
            losses: Losses {
                expr,
                train,
                ent: None,
                cmplx: Some(cmplx),
            },
            complexity: Complexity {
                n_params: 1,
                gates: 1,
                depth: 1,
            },
            seed: 0,
        }
    }

    #[test]
    fn cost_examples() {
        let e = [MetricKind::Expr];
        assert!((hierarchical_cost(&report(Some(0.2), None, 0.3), &e).unwrap() - 1.2).abs() < 1e-15);
        assert_eq!(hierarchical_cost(&report(Some(0.0), None, 0.25), &e).unwrap(), 0.25);
        let both = [MetricKind::Expr, MetricKind::Train];
        assert!((hierarchical_cost(&report(Some(0.1), Some(0.3), 0.5), &both).unwrap() - 1.4).abs() < 1e-15);
        assert!(hierarchical_cost(&report(Some(1e-18), None, 0.5), &e).unwrap() > 1.0);
        assert!(hierarchical_cost(&report(None, None, 0.5), &e).is_err());
    }

    fn tiny_cfg() -> SearchConfig {
        SearchConfig {
            n: 2,
            gate_pool: vec![GateKind::H, GateKind::RX, GateKind::CX],
            topology: None,
            caps: Caps::new(2, 3, 3),
            theta_min: 0,
            n_trials: 30,
            objectives: vec![MetricKind::Expr],
            metric: MetricConfig {
                n_fidelity_pairs: 200,
                ..MetricConfig::default()
            },
            noise: NoiseModel::default(),
            observable: None,
            duplicate_prune_limit: 10,
            seed: 5,
            proposer: ProposerKind::Random,
            tpe: TpeSettings::default(),
            batch_size: 1,
            spin_conserving_excitations: true,
        }
    }

    fn d(name: &str, value: usize, cardinality: usize) -> Decision {
        Decision {
            name: name.into(),
            value,
            cardinality,
        }
    }

    #[test]
    fn build_examples() {
        let cfg = tiny_cfg();
        assert!(matches!(
            build_circuit(&[], &cfg).unwrap(),
            BuildOutcome::Invalid { .. }
        ));
        let cx = vec![d("g0.kind", 2, 4), d("g0.CX.place", 0, 2), d("g1.kind", 3, 4)];
        assert!(matches!(
            build_circuit(&cx, &cfg).unwrap(),
            BuildOutcome::Invalid {
                reason: InvalidReason::TooFewParams { .. },
                ..
            }
        ));
        let ok = vec![
            d("g0.kind", 1, 4),
            d("g0.RX.place", 0, 2),
            d("g0.slot0", 0, 3),
            d("g1.kind", 2, 4),
            d("g1.CX.place", 1, 2),
            d("g2.kind", 1, 4),
            d("g2.RX.place", 1, 2),
            d("g2.slot0", 1, 3),
        ];
        let BuildOutcome::Valid(c) = build_circuit(&ok, &cfg).unwrap() else {
            panic!("expected a valid circuit")
        };
        assert_eq!(c.n_params, 1);
        assert_eq!(c.gates[2].params, vec![0]);
        assert_eq!(c.gates[1].qubits, vec![1, 0]);
        let bad = vec![d("g0.kind", 7, 4)];
        assert!(matches!(
            build_circuit(&bad, &cfg),
            Err(SearchError::MalformedDecisions(_))
        ));
    }

    #[test]
    fn search_is_reproducible() {
        let cfg = tiny_cfg();
        let a = run_search(&cfg).unwrap();
        let b = run_search(&cfg).unwrap();
        let strip = |h: &[TrialRecord]| -> Vec<TrialRecord> {
            h.iter()
                .cloned()
                .map(|mut r| {
                    r.wall_time_s = 0.0;
                    r
                })
                .collect()
        };
        assert_eq!(strip(&a.history), strip(&b.history));
        assert_eq!(a.test_report, b.test_report);
        let rb = running_best(&a.history);
        for w in rb.windows(2) {
            if let (Some(x), Some(y)) = (w[0], w[1]) {
                assert!(y <= x);
            }
        }
    }

    #[test]
    fn batched_search_is_reproducible() {
        let mut cfg = tiny_cfg();
        cfg.batch_size = 4;
        cfg.proposer = ProposerKind::Tpe;
        let a = run_search(&cfg).unwrap();
        let b = run_search(&cfg).unwrap();
        assert_eq!(a.best.index, b.best.index);
        assert_eq!(a.best.cost, b.best.cost);
    }

    #[test]
    fn config_validation() {
        let mut cfg = tiny_cfg();
        cfg.objectives.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = tiny_cfg();
        cfg.topology = Some(vec![(0, 2)]);
        assert!(cfg.validate().is_err());
        let mut cfg = tiny_cfg();
        cfg.caps.g_max = 0;
        assert!(cfg.validate().is_err());
    }
}
