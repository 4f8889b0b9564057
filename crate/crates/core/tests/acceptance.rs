//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.
//!
//! Run with `cargo test -p pqcsearch --test acceptance -- --nocapture` to see the lines.

use std::collections::HashSet;
use std::path::PathBuf;

use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestRunner};

use pqcsearch::bench::benchmark_circuit;
use pqcsearch::concentration::{coverage_experiment, required_samples, self_bounding_suite};
use pqcsearch::hamiltonian::{exact_ground_energy, load_pauli_sum, PauliSum};
use pqcsearch::metrics::{
    circuit_error_probability, entanglement, evaluate, expressibility, haar_expressibility, meyer_wallach,
    trainability, Caps, EvalRequest, InitialState, Losses, MetricConfig, MetricKind, MetricReport, NoiseModel,
};
use pqcsearch::search::{
    enumerate_decisions, hierarchical_cost, run_search, BuildOutcome, CircuitSpace, ProposerKind, SearchConfig,
    TpeSettings,
};
use pqcsearch::sim::{Circuit, Complexity, GateKind, PauliString, StateVector};
use pqcsearch::vqe::{h2_excitation_ansatz, run_vqe_with, OptimizerSettings, VqeConfig};

type Outcome = Result<(bool, String), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn criterion_1() -> Outcome {
    let m = required_samples(0.05, 0.05, 2.0).map_err(err)?;
    Ok((
        m == 11_806,
        format!("required_samples(0.05, 0.05, 2) = {m} (want 11806)"),
    ))
}

fn criterion_2() -> Outcome {
    let r = self_bounding_suite(10_000, 2024);
    let ok = r.failures == 0 && r.worst_max_delta <= 1.0 + 1e-12 && r.worst_excess <= 1e-12;
    Ok((
        ok,
        format!(
            "{} cases, {} failures, max Delta_k = {:.15}, worst sum Delta_k^2 - aZ = {:.3e}",
            r.cases, r.failures, r.worst_max_delta, r.worst_excess
        ),
    ))
}

fn criterion_3() -> Outcome {
    let r = coverage_experiment(2000, 500, 0.05, 7).map_err(err)?;
    Ok((
        r.rate >= 0.95,
        format!(
            "coverage {:.4} over {} batches (eps = {:.5}, want >= 0.95)",
            r.rate, r.batches, r.epsilon
        ),
    ))
}

fn criterion_4() -> Outcome {
    let c1 = benchmark_circuit(1, 4, 1).map_err(err)?;
    let c6 = benchmark_circuit(6, 4, 1).map_err(err)?;
    let cfg = MetricConfig::default();
    let mut ok = true;
    let mut e1s = Vec::new();
    let mut e6s = Vec::new();
    for seed in 0..5u64 {
        let e1 = expressibility(&c1, &cfg, seed).map_err(err)?.expr;
        let e6 = expressibility(&c6, &cfg, seed).map_err(err)?.expr;
        ok &= (e1 - 0.2736).abs() <= 0.06 && e6 < e1;
        e1s.push(e1);
        e6s.push(e6);
    }
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    Ok((
        ok,
        format!(
            "Expr(c1) = [{}] (0.2736 +- 0.06); Expr(c6) = [{}] < Expr(c1)",
            fmt(&e1s),
            fmt(&e6s)
        ),
    ))
}

fn criterion_5() -> Outcome {
    let e = haar_expressibility(4, &MetricConfig::default(), 11).map_err(err)?;
    Ok((e < 0.01, format!("Haar Expr at n = 4 = {e:.5} (want < 0.01)")))
}

fn criterion_6() -> Outcome {
    let n = 10;
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push_fresh(GateKind::RZ, &[q]);
    }
    let base = MetricConfig {
        initial_states: vec![InitialState::Plus],
        ..MetricConfig::default()
    };
    let e0 = expressibility(&c, &base, 3).map_err(err)?.expr;
    let e5 = expressibility(
        &c,
        &MetricConfig {
            eps_truncation: 0.05,
            ..base.clone()
        },
        3,
    )
    .map_err(err)?
    .expr;
    Ok((
        e5 > e0 + 0.1,
        format!("RZ on |+>^10: Expr(eps=0.05) = {e5:.4}, Expr(eps=0) = {e0:.4} (want gap > 0.1)"),
    ))
}

fn criterion_7() -> Outcome {
    let cfg = MetricConfig::default();
    let c9 = benchmark_circuit(9, 4, 1).map_err(err)?;
    let ent9 = entanglement(&c9, &cfg, 5).map_err(err)?;
    let c1 = benchmark_circuit(1, 4, 1).map_err(err)?;
    let ent1 = entanglement(&c1, &cfg, 5).map_err(err)?;
    let mut bell = Circuit::new(4);
    bell.push(GateKind::H, &[0], &[]).push(GateKind::CX, &[0, 1], &[]);
    let q = meyer_wallach(&bell.apply(&[], &StateVector::zero(4)).map_err(err)?);
    let ok = (ent9 - 1.0).abs() <= 1e-3 && ent1 < 1e-12 && (q - 0.5).abs() <= 1e-10;
    Ok((
        ok,
        format!("Ent(c9) = {ent9:.6}, Ent(single-qubit c1) = {ent1:.1e}, Q(Bell x |00>) = {q:.12}"),
    ))
}

fn criterion_8() -> Outcome {
    let cfg = MetricConfig::default();
    let mut toy = Circuit::new(1);
    toy.push_fresh(GateKind::RX, &[0]);
    let z = PauliSum::new(vec![(1.0, PauliString::new("Z").map_err(err)?)]).map_err(err)?;
    let toy_r = trainability(&toy, &z, &cfg, None, 1).map_err(err)?;
    let mut ok = (toy_r.mean_variance - 0.5).abs() <= 0.05;
    let c1 = benchmark_circuit(1, 4, 1).map_err(err)?;
    let c6 = benchmark_circuit(6, 4, 1).map_err(err)?;
    let obs = pqcsearch::metrics::default_observable(4);
    let noise = NoiseModel::default();
    let mut pairs = Vec::new();
    for seed in 0..3u64 {
        let t1 = trainability(&c1, &obs, &cfg, Some(&noise), seed)
            .map_err(err)?
            .train_normalized;
        let t6 = trainability(&c6, &obs, &cfg, Some(&noise), seed)
            .map_err(err)?
            .train_normalized;
        ok &= t1 > t6;
        pairs.push(format!("{t1:.4}>{t6:.4}"));
    }
    Ok((
        ok,
        format!(
            "toy mean s^2 = {:.4} (0.5 +- 0.05, m = {}); Train(c1) > Train(c6): [{}]",
            toy_r.mean_variance,
            cfg.m_gradient_samples,
            pairs.join(", ")
        ),
    ))
}

fn arb_report() -> impl Strategy<Value = (MetricReport, Vec<MetricKind>)> {
    // exact zeros and subnormal-scale losses sit right at the branch boundary
    let loss = prop_oneof![Just(0.0), 0.0..=1.0f64, 1e-300..1e-12f64];
    let objectives = prop::sample::subsequence(vec![MetricKind::Expr, MetricKind::Train, MetricKind::Ent], 1..=3);
    (loss.clone(), loss.clone(), loss, 0.0..=1.0f64, objectives).prop_map(|(le, lt, ln, lc, objectives)| {
        let report = MetricReport {
            expr: Some(0.1),
            ent: Some(0.5),
            train_normalized: Some(1.0),
            train_mean_variance: Some(0.01),
            error_probability: Some(0.05),
            per_param_variance: vec![],
            losses: Losses {
                expr: Some(le),
                train: Some(lt),
                ent: Some(ln),
                cmplx: Some(lc),
            },
            complexity: Complexity {
                n_params: 1,
                gates: 1,
                depth: 1,
            },
            seed: 0,
        };
        (report, objectives)
    })
}

fn criterion_9() -> Outcome {
    let mut runner = TestRunner::new(PtConfig {
        cases: 20_000,
        failure_persistence: None,
        ..PtConfig::default()
    });
    let res = runner.run(&arb_report(), |(report, objectives)| {
        let cost = hierarchical_cost(&report, &objectives).expect("losses present");
        let violated = objectives.iter().any(|&k| report.losses.get(k).unwrap() > 0.0);
        prop_assert_eq!(cost > 1.0, violated, "cost {} objectives {:?}", cost, objectives);
        Ok(())
    });
    match res {
        Ok(()) => Ok((
            true,
            "cost > 1 <=> some objective loss > 0 over 20000 random reports".into(),
        )),
        Err(e) => Ok((false, format!("counterexample: {e}"))),
    }
}

fn criterion_10() -> Outcome {
    let cfg = SearchConfig {
        n: 2,
        gate_pool: vec![GateKind::H, GateKind::RX, GateKind::CX],
        topology: None,
        caps: Caps::new(2, 3, 3),
        theta_min: 0,
        n_trials: 1,
        objectives: vec![MetricKind::Expr],
        metric: MetricConfig::default(),
        noise: NoiseModel::default(),
        observable: None,
        duplicate_prune_limit: 10,
        seed: 1,
        proposer: ProposerKind::Random,
        tpe: TpeSettings::default(),
        batch_size: 1,
        spin_conserving_excitations: true,
    };
    let space = CircuitSpace::from_config(&cfg).map_err(err)?;
    let all = enumerate_decisions(&space, 1_000_000).ok_or("space too large")?;
    let mut circuits = HashSet::new();
    for d in &all {
        if let BuildOutcome::Valid(c) = space.build(d, cfg.theta_min).map_err(err)? {
            circuits.insert(c);
        }
    }
    // every circuit is scored with one fixed evaluation seed, so the oracle and
    // the re-scored search winner share the same Monte Carlo draw
    const ORACLE_SEED: u64 = 3;
    let req = EvalRequest {
        metrics: &cfg.objectives,
        cfg: &cfg.metric,
        noise: Some(&cfg.noise),
        observable: None,
        caps: Some(&cfg.caps),
    };
    let score = |c: &Circuit| -> Result<f64, String> {
        let r = evaluate(c, &req, ORACLE_SEED).map_err(err)?;
        hierarchical_cost(&r.report, &cfg.objectives).map_err(err)
    };
    let mut oracle_min = f64::INFINITY;
    for c in &circuits {
        oracle_min = oracle_min.min(score(c)?);
    }
    let search_cfg = SearchConfig {
        n_trials: all.len() * 20,
        ..cfg.clone()
    };
    let out = run_search(&search_cfg).map_err(err)?;
    let best = out.best.circuit.as_ref().ok_or("best trial has no circuit")?;
    let rescored = score(best)?;
    let test_cost = hierarchical_cost(&out.test_report, &cfg.objectives).map_err(err)?;
    Ok((
        rescored <= oracle_min + 0.02,
        format!(
            "space {} sequences / {} circuits, budget {}; oracle min {oracle_min:.4}, search winner re-scored {rescored:.4} \
             (in-search {:.4}, held-out {test_cost:.4})",
            all.len(),
            circuits.len(),
            search_cfg.n_trials,
            out.best.cost.unwrap_or(f64::NAN)
        ),
    ))
}

fn criterion_11() -> Outcome {
    let path = data_dir().join("h2_sto3g_0.75.txt");
    let h = load_pauli_sum(&path).map_err(err)?;
    let (e0, _) = exact_ground_energy(&h).map_err(err)?;
    let cfg = VqeConfig {
        hamiltonian: path,
        ansatz: h2_excitation_ansatz(),
        reference: "1010".into(),
        init: Default::default(),
        optimizer: OptimizerSettings::default(),
        seed: 0,
    };
    let t = run_vqe_with(&h, &cfg).map_err(err)?;
    let min_iter = t.iterations.iter().map(|i| i.energy).fold(f64::INFINITY, f64::min);
    let ok = t.gap.abs() <= 1e-3 && t.iterations.iter().all(|i| i.energy >= e0 - 1e-9);
    Ok((
        ok,
        format!(
            "E_final = {:.8}, E0 = {e0:.8}, gap = {:.2e} after {} iterates; min iterate - E0 = {:.2e}",
            t.final_energy,
            t.gap,
            t.iterations.len(),
            min_iter - e0
        ),
    ))
}

fn criterion_12() -> Outcome {
    let noise = NoiseModel::new(0.001, 0.01);
    let direct = noise.error_probability(10, 5);
    // same counts through a circuit: 10 RX and 5 CX
    let mut c = Circuit::new(2);
    for k in 0..10 {
        c.push_fresh(GateKind::RX, &[k % 2]);
    }
    for _ in 0..5 {
        c.push(GateKind::CX, &[0, 1], &[]);
    }
    let via = circuit_error_probability(&c, &noise);
    let ok = (direct - 0.0585).abs() <= 1e-4 && (via - direct).abs() <= 1e-15;
    Ok((
        ok,
        format!("Pr_err(N1=10, N2=5) = {direct:.6} (circuit: {via:.6}, want 0.0585 +- 1e-4)"),
    ))
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Outcome); 12] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
    ];
    let mut failed = Vec::new();
    for (id, f) in criteria {
        let (ok, msg) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        println!("[{}] criterion {id}: {msg}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
