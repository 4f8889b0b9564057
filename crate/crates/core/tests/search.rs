use pqcsearch::metrics::{Caps, MetricConfig, MetricKind};
use pqcsearch::search::{
    run_search, running_best, Decision, DecisionSpace, Decisions, Observation, Proposer, ProposerKind, RandomProposer,
    SearchConfig, TpeProposer, TpeSettings, TrialStatus,
};
use pqcsearch::sim::GateKind;
use pqcsearch::SeedSplitter;

/// `d` independent choices with `k` options each.
struct Planted {
    d: usize,
    k: usize,
}

impl DecisionSpace for Planted {
    fn sample(&self, choose: &mut dyn FnMut(&str, usize) -> usize) -> Decisions {
        (0..self.d)
            .map(|i| {
                let name = format!("x{i}");
                let value = choose(&name, self.k);
                Decision {
                    name,
                    value,
                    cardinality: self.k,
                }
            })
            .collect()
    }
}

/// Hamming distance to a planted target.
fn planted_cost(d: &[Decision], target: &[usize]) -> f64 {
    d.iter().zip(target).filter(|(x, t)| x.value != **t).count() as f64
}

fn best_after(p: &mut dyn Proposer, space: &Planted, target: &[usize], budget: usize, seed: u64) -> f64 {
    let split = SeedSplitter::new(seed);
    let mut hist: Vec<Observation> = Vec::new();
    let mut best = f64::INFINITY;
    for t in 0..budget {
        let d = p.propose(&hist, space, &mut split.rng(0, t as u64));
        let v = planted_cost(&d, target);
        best = best.min(v);
        hist.push(Observation { decisions: d, value: v });
    }
    best
}

#[test]
fn tpe_beats_random_on_planted_problem() {
    let space = Planted { d: 6, k: 4 };
    let budget = 60;
    let (mut tpe_sum, mut rnd_sum, mut wins, mut losses) = (0.0, 0.0, 0, 0);
    for run in 0..50u64 {
        let mut trng = SeedSplitter::new(run).rng(99, 0);
        let target: Vec<usize> = (0..space.d)
            .map(|_| rand::Rng::random_range(&mut trng, 0..space.k))
            .collect();
        let a = best_after(
            &mut TpeProposer::new(TpeSettings::default()),
            &space,
            &target,
            budget,
            run,
        );
        let b = best_after(&mut RandomProposer, &space, &target, budget, run);
        tpe_sum += a;
        rnd_sum += b;
        if a < b {
            wins += 1;
        } else if a > b {
            losses += 1;
        }
    }
    let (tpe, rnd) = (tpe_sum / 50.0, rnd_sum / 50.0);
    println!("mean best: tpe {tpe:.3}, random {rnd:.3}; wins {wins}, losses {losses}");
    assert!(tpe < rnd, "tpe {tpe} random {rnd}");
    assert!(wins > losses, "wins {wins} losses {losses}");
}

#[test]
fn random_proposer_is_uniform() {
    let space = Planted { d: 1, k: 5 };
    let split = SeedSplitter::new(4);
    let mut counts = [0usize; 5];
    let n = 50_000;
    for t in 0..n {
        let d = RandomProposer.propose(&[], &space, &mut split.rng(0, t));
        counts[d[0].value] += 1;
    }
    let e = n as f64 / 5.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    // 4 degrees of freedom, 0.999 quantile 18.47
    assert!(chi2 < 18.47, "{counts:?} chi2 = {chi2}");
}

fn small_cfg(proposer: ProposerKind, seed: u64) -> SearchConfig {
    SearchConfig {
        n: 3,
        gate_pool: vec![GateKind::RY, GateKind::RZ, GateKind::CX],
        topology: Some(vec![(0, 1), (1, 2)]),
        caps: Caps::new(4, 6, 4),
        theta_min: 1,
        n_trials: 40,
        objectives: vec![MetricKind::Expr, MetricKind::Ent],
        metric: MetricConfig {
            n_fidelity_pairs: 300,
            ..MetricConfig::default()
        },
        noise: Default::default(),
        observable: None,
        duplicate_prune_limit: 2,
        seed,
        proposer,
        tpe: TpeSettings::default(),
        batch_size: 4,
        spin_conserving_excitations: true,
    }
}

#[test]
fn search_is_reproducible_and_consistent() {
    for proposer in [ProposerKind::Random, ProposerKind::Tpe] {
        let cfg = small_cfg(proposer, 8);
        let a = run_search(&cfg).unwrap();
        let b = run_search(&cfg).unwrap();
        let strip = |h: &[pqcsearch::search::TrialRecord]| {
            h.iter()
                .map(|r| (r.decisions.clone(), r.status.clone(), r.cost.map(f64::to_bits)))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a.history), strip(&b.history));
        assert_eq!(a.history.len(), cfg.n_trials);
        for r in &a.history {
            match &r.status {
                TrialStatus::Valid => {
                    let c = r.circuit.as_ref().unwrap();
                    assert!(cfg.caps.admits(c));
                    assert!(r.cost.is_some() && r.report.is_some());
                }
                _ => assert!(r.cost.is_none()),
            }
        }
        let rb = running_best(&a.history);
        assert!(rb.windows(2).all(|w| match (w[0], w[1]) {
            (Some(x), Some(y)) => y <= x,
            (Some(_), None) => false,
            _ => true,
        }));
        assert_eq!(rb.last().unwrap().unwrap(), a.best.cost.unwrap());
        // the topology restricts CX to the chain
        for r in &a.history {
            if let Some(c) = &r.circuit {
                for g in c.gates.iter().filter(|g| g.kind == GateKind::CX) {
                    let (x, y) = (g.qubits[0].min(g.qubits[1]), g.qubits[0].max(g.qubits[1]));
                    assert!(y == x + 1, "{:?}", g.qubits);
                }
            }
        }
    }
}

#[test]
fn different_seeds_differ() {
    let a = run_search(&small_cfg(ProposerKind::Random, 1)).unwrap();
    let b = run_search(&small_cfg(ProposerKind::Random, 2)).unwrap();
    let da: Vec<_> = a.history.iter().map(|r| r.decisions.clone()).collect();
    let db: Vec<_> = b.history.iter().map(|r| r.decisions.clone()).collect();
    assert_ne!(da, db);
}
