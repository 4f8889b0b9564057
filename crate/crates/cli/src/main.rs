//! `pqcsearch` command-line interface.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on a usage error.

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use pqcsearch::bench::benchmark_circuit;
use pqcsearch::concentration::{coverage_experiment, self_bounding_suite};
use pqcsearch::hamiltonian::{exact_ground_energy, load_pauli_sum, PauliSum};
use pqcsearch::metrics::{evaluate, Caps, EvalRequest, MetricConfig, MetricKind, NoiseModel};
use pqcsearch::search::{run_search, ProposerKind, SearchConfig, SearchError, TrialRecord};
use pqcsearch::sim::Circuit;
use pqcsearch::vqe::{geometry_sweep, run_vqe, VqeConfig, VqeTrace};

use manifest::RunDir;

#[derive(Parser, Debug)]
#[command(
    name = "pqcsearch",
    version,
    about = "Circuit metrics, metric-driven ansatz search and VQE"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate expressibility, trainability and entanglement of a circuit.
    Metrics {
        #[arg(long)]
        circuit: PathBuf,
        /// Metrics run configuration (JSON); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Trainability observable as a Pauli-sum file (default: Z on the last qubit).
        #[arg(long)]
        observable: Option<PathBuf>,
    },
    /// Run a circuit search.
    Search {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_parser = parse_proposer)]
        proposer: Option<ProposerKind>,
    },
    /// Minimize the energy of a Hamiltonian over a fixed ansatz.
    Vqe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run the same ansatz on each of these Hamiltonian files instead.
        #[arg(long, num_args = 1..)]
        sweep: Vec<PathBuf>,
    },
    /// Check the variance concentration bound and the self-bounding conditions empirically.
    VerifyBound {
        #[arg(long, default_value_t = 2000)]
        batches: usize,
        #[arg(long, default_value_t = 500)]
        m: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact ground energy of a Pauli-sum Hamiltonian.
    Oracle {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Emit a benchmark circuit as JSON.
    Bench {
        #[arg(long)]
        id: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_proposer(s: &str) -> Result<ProposerKind, String> {
    match s {
        "random" => Ok(ProposerKind::Random),
        "tpe" => Ok(ProposerKind::Tpe),
        _ => Err(format!("unknown proposer `{s}` (expected random or tpe)")),
    }
}

fn default_metric_kinds() -> Vec<MetricKind> {
    vec![MetricKind::Expr, MetricKind::Train, MetricKind::Ent]
}

/// Configuration of the `metrics` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
struct MetricsRun {
    metrics: Vec<MetricKind>,
    metric: MetricConfig,
    /// Trainability normalization; `null` reports the raw mean variance.
    noise: Option<NoiseModel>,
    /// Caps for the complexity loss; `null` skips it.
    caps: Option<Caps>,
    seed: u64,
}

impl Default for MetricsRun {
    fn default() -> Self {
        Self {
            metrics: default_metric_kinds(),
            metric: MetricConfig::default(),
            noise: Some(NoiseModel::default()),
            caps: None,
            seed: 0,
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Metrics {
            circuit,
            config,
            out,
            seed,
            observable,
        } => cmd_metrics(&circuit, config.as_deref(), &out, seed, observable.as_deref()),
        Command::Search {
            config,
            out,
            seed,
            trials,
            proposer,
        } => cmd_search(&config, &out, seed, trials, proposer),
        Command::Vqe { config, out, sweep } => cmd_vqe(&config, &out, &sweep),
        Command::VerifyBound {
            batches,
            m,
            delta,
            cases,
            seed,
            out,
        } => cmd_verify_bound(batches, m, delta, cases, seed, out.as_deref()),
        Command::Oracle { hamiltonian, json } => cmd_oracle(&hamiltonian, json),
        Command::Bench { id, reps, n, out } => cmd_bench(id, reps, n, out.as_deref()),
    }
}

#[derive(Serialize)]
struct MetricsSnapshot<'a> {
    run: &'a MetricsRun,
    circuit: &'a Circuit,
    observable: Option<&'a PauliSum>,
}

fn cmd_metrics(
    circuit_path: &Path,
    config: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
    observable: Option<&Path>,
) -> Result<()> {
    let text = std::fs::read_to_string(circuit_path).with_context(|| format!("reading {}", circuit_path.display()))?;
    let circuit = Circuit::from_json(&text).with_context(|| format!("parsing {}", circuit_path.display()))?;
    let mut run: MetricsRun = match config {
        Some(p) => read_json(p)?,
        None => MetricsRun::default(),
    };
    if let Some(s) = seed {
        run.seed = s;
    }
    let obs = observable.map(load_pauli_sum).transpose()?;
    let snapshot = MetricsSnapshot {
        run: &run,
        circuit: &circuit,
        observable: obs.as_ref(),
    };
    let mut dir = RunDir::create(out, "metrics", &snapshot, vec![run.seed])?;
    let req = EvalRequest {
        metrics: &run.metrics,
        cfg: &run.metric,
        noise: run.noise.as_ref(),
        observable: obs.as_ref(),
        caps: run.caps.as_ref(),
    };
    let ev = evaluate(&circuit, &req, run.seed)?;
    dir.write_json("report.json", &ev.report)?;
    for (k, h) in ev.histograms.iter().enumerate() {
        let name = if ev.histograms.len() == 1 {
            "histogram.csv".to_string()
        } else {
            format!("histogram_{k}.csv")
        };
        dir.write_text(&name, &h.to_csv())?;
    }
    dir.finish()?;
    println!("{}", serde_json::to_string_pretty(&ev.report)?);
    Ok(())
}

fn write_history(dir: &mut RunDir, history: &[TrialRecord]) -> Result<()> {
    let mut s = String::new();
    for r in history {
        s.push_str(&serde_json::to_string(&serde_json::to_value(r)?)?);
        s.push('\n');
    }
    dir.write_text("history.jsonl", &s)
}

fn cmd_search(
    config: &Path,
    out: &Path,
    seed: Option<u64>,
    trials: Option<usize>,
    proposer: Option<ProposerKind>,
) -> Result<()> {
    let mut cfg: SearchConfig = read_json(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = trials {
        cfg.n_trials = t;
    }
    if let Some(p) = proposer {
        cfg.proposer = p;
    }
    cfg.validate()?;
    let mut dir = RunDir::create(out, "search", &cfg, vec![cfg.seed])?;
    match run_search(&cfg) {
        Ok(outcome) => {
            write_history(&mut dir, &outcome.history)?;
            let circuit = outcome.best.circuit.as_ref().expect("best trial is valid");
            dir.write_text("best_circuit.json", &(circuit.to_json() + "\n"))?;
            dir.write_json("best_report.json", &outcome.best.report)?;
            dir.write_json("test_report.json", &outcome.test_report)?;
            dir.finish()?;
            println!(
                "best trial {} cost {:.6} (|θ|={}, G={}, D={})",
                outcome.best.index,
                outcome.best.cost.expect("valid trial has a cost"),
                circuit.n_params,
                circuit.gate_count(),
                circuit.depth()
            );
            Ok(())
        }
        Err(SearchError::NoFeasibleCircuit { history }) => {
            write_history(&mut dir, &history)?;
            dir.finish()?;
            bail!("no feasible circuit in {} trials", history.len())
        }
        Err(e) => Err(e.into()),
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[derive(Serialize)]
struct VqeSummary<'a> {
    hamiltonian: String,
    final_energy: f64,
    exact_energy: f64,
    gap: f64,
    converged: bool,
    iterations: usize,
    final_theta: &'a [f64],
}

fn summary<'a>(h: &Path, t: &'a VqeTrace) -> VqeSummary<'a> {
    VqeSummary {
        hamiltonian: h.display().to_string(),
        final_energy: t.final_energy,
        exact_energy: t.exact_energy,
        gap: t.gap,
        converged: t.converged,
        iterations: t.iterations.len(),
        final_theta: &t.final_theta,
    }
}

fn cmd_vqe(config: &Path, out: &Path, sweep: &[PathBuf]) -> Result<()> {
    let mut cfg: VqeConfig = read_json(config)?;
    // relative Hamiltonian paths are taken relative to the config file
    let base = config.parent().unwrap_or(Path::new("."));
    cfg.hamiltonian = resolve(base, &cfg.hamiltonian);
    let mut dir = RunDir::create(out, "vqe", &cfg, vec![cfg.seed])?;
    if sweep.is_empty() {
        let trace = run_vqe(&cfg)?;
        dir.write_text("trace.csv", &trace.to_csv())?;
        let s = summary(&cfg.hamiltonian, &trace);
        dir.write_json("summary.json", &s)?;
        dir.finish()?;
        println!("{}", serde_json::to_string_pretty(&s)?);
    } else {
        let traces = geometry_sweep(&cfg, sweep)?;
        let mut rows = Vec::new();
        for (k, (p, t)) in sweep.iter().zip(&traces).enumerate() {
            dir.write_text(&format!("trace_{k}.csv"), &t.to_csv())?;
            rows.push(summary(p, t));
        }
        dir.write_json("sweep.json", &rows)?;
        dir.finish()?;
        println!("{}", serde_json::to_string_pretty(&rows)?);
    }
    Ok(())
}

#[derive(Serialize)]
struct BoundCheck {
    check: String,
    value: f64,
    threshold: String,
    pass: bool,
}

fn cmd_verify_bound(batches: usize, m: usize, delta: f64, cases: usize, seed: u64, out: Option<&Path>) -> Result<()> {
    let cov = coverage_experiment(batches, m, delta, seed)?;
    let sb = self_bounding_suite(cases, seed);
    let checks = vec![
        BoundCheck {
            check: format!("coverage ({batches} batches, m = {m}, eps = {:.5})", cov.epsilon),
            value: cov.rate,
            threshold: format!(">= {}", 1.0 - delta),
            pass: cov.rate >= 1.0 - delta,
        },
        BoundCheck {
            check: "mean s^2 (true 1/3)".into(),
            value: cov.mean_s2,
            threshold: "within 1% of 1/3".into(),
            pass: (cov.mean_s2 - 1.0 / 3.0).abs() <= 0.01 / 3.0,
        },
        BoundCheck {
            check: format!("self-bounding: max Delta_k ({cases} cases)"),
            value: sb.worst_max_delta,
            threshold: "<= 1 + 1e-12".into(),
            pass: sb.worst_max_delta <= 1.0 + 1e-12,
        },
        BoundCheck {
            check: format!("self-bounding: sum Delta_k^2 - a Z ({cases} cases)"),
            value: sb.worst_excess,
            threshold: "<= 1e-12".into(),
            pass: sb.failures == 0,
        },
    ];
    println!("{:<58} {:>14} {:>20}  result", "check", "value", "threshold");
    for c in &checks {
        println!(
            "{:<58} {:>14.6e} {:>20}  {}",
            c.check,
            c.value,
            c.threshold,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    if let Some(dir_path) = out {
        #[derive(Serialize)]
        struct Cfg {
            batches: usize,
            m: usize,
            delta: f64,
            cases: usize,
            seed: u64,
        }
        let mut dir = RunDir::create(
            dir_path,
            "verify-bound",
            &Cfg {
                batches,
                m,
                delta,
                cases,
                seed,
            },
            vec![seed],
        )?;
        dir.write_json("checks.json", &checks)?;
        dir.finish()?;
    }
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        bail!("verification failed")
    }
}

fn cmd_oracle(path: &Path, json: bool) -> Result<()> {
    let h = load_pauli_sum(path)?;
    let (e0, _) = exact_ground_energy(&h)?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "hamiltonian": path.display().to_string(),
                "n_qubits": h.n_qubits(),
                "n_terms": h.terms().len(),
                "ground_energy": e0,
            }))?
        );
    } else {
        println!("qubits: {}", h.n_qubits());
        println!("terms: {}", h.terms().len());
        println!("ground_energy: {e0:.12}");
    }
    Ok(())
}

fn cmd_bench(id: usize, reps: usize, n: usize, out: Option<&Path>) -> Result<()> {
    let c = benchmark_circuit(id, n, reps)?;
    let json = c.to_json() + "\n";
    match out {
        Some(p) => {
            std::fs::write(p, &json).with_context(|| format!("writing {}", p.display()))?;
            println!(
                "circuit {id} (n = {n}, reps = {reps}): |θ| = {}, G = {}, D = {}",
                c.n_params,
                c.gate_count(),
                c.depth()
            );
        }
        None => print!("{json}"),
    }
    Ok(())
}
