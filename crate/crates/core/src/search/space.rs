use serde::{Deserialize, Serialize};

use super::{SearchConfig, SearchError};
use crate::sim::{Circuit, GateKind, GateSpec};
use crate::vqe::spin_conserving_pool;

/// One categorical choice: parameter name, chosen index and number of options.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decision {
    pub name: String,
    pub value: usize,
    pub cardinality: usize,
}

/// Ordered choices made while sampling one candidate.
pub type Decisions = Vec<Decision>;

/// Stable key identifying a decision sequence.
pub fn decision_key(d: &[Decision]) -> String {
    let mut s = String::new();
    for x in d {
        s.push_str(&x.name);
        s.push('=');
        s.push_str(&x.value.to_string());
        s.push(';');
    }
    s
}

/// A conditional categorical space sampled choice by choice.
///
/// `sample` calls `choose(name, cardinality)` for each choice in order; the
/// names and number of later choices may depend on earlier values.
pub trait DecisionSpace {
    fn sample(&self, choose: &mut dyn FnMut(&str, usize) -> usize) -> Decisions;
}

/// Placement options for one gate kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindPlacements {
    pub kind: GateKind,
    pub placements: Vec<Vec<usize>>,
}

/// Circuit construction space: up to `G_max` positions, each choosing a gate
/// kind or STOP, a placement, and one slot choice per angle.
///
/// Slot choice `c` in `0..=θ_max`: `c = 0` or `c` larger than the current slot
/// count opens a new slot; otherwise the gate reuses slot `c − 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpace {
    pub n: usize,
    pub kinds: Vec<KindPlacements>,
    pub theta_max: usize,
    pub g_max: usize,
    pub d_max: usize,
}

/// Reason a decision sequence does not yield a usable circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvalidReason {
    Disconnected,
    TooFewParams { found: usize, required: usize },
}

/// Result of replaying a decision sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildOutcome {
    Valid(Circuit),
    Invalid { circuit: Circuit, reason: InvalidReason },
}

impl CircuitSpace {
    pub fn from_config(cfg: &SearchConfig) -> Result<Self, SearchError> {
        let n = cfg.n;
        let mut kinds = Vec::new();
        for &kind in &cfg.gate_pool {
            let placements: Vec<Vec<usize>> = match kind.arity() {
                1 => (0..n).map(|q| vec![q]).collect(),
                2 if kind == GateKind::SingleExc => excitation_placements(cfg, kind)?,
                2 => {
                    let mut v = Vec::new();
                    for a in 0..n {
                        for b in 0..n {
                            if a != b && allowed_pair(cfg, a, b) {
                                v.push(vec![a, b]);
                            }
                        }
                    }
                    v
                }
                _ => excitation_placements(cfg, kind)?,
            };
            if placements.is_empty() {
                return Err(SearchError::Config(format!("gate {kind} has no legal placement")));
            }
            kinds.push(KindPlacements { kind, placements });
        }
        Ok(Self {
            n,
            kinds,
            theta_max: cfg.caps.theta_max,
            g_max: cfg.caps.g_max,
            d_max: cfg.caps.d_max,
        })
    }

    fn stop_index(&self) -> usize {
        self.kinds.len()
    }

    /// Replays `decisions`, stopping at STOP, at the end of the sequence, or as
    /// soon as a gate would break a cap.
    pub fn build(&self, decisions: &[Decision], theta_min: usize) -> Result<BuildOutcome, SearchError> {
        let mut it = decisions.iter();
        let mut circuit = Circuit::new(self.n);
        let mut layer = vec![0usize; self.n];
        for p in 0..self.g_max {
            let Some(d) = it.next() else { break };
            expect(d, &format!("g{p}.kind"), self.kinds.len() + 1)?;
            if d.value == self.stop_index() {
                break;
            }
            let kp = &self.kinds[d.value];
            let d = it.next().ok_or_else(|| malformed("sequence ends before placement"))?;
            expect(d, &format!("g{p}.{}.place", kp.kind), kp.placements.len())?;
            let qubits = &kp.placements[d.value];
            let mut params = Vec::with_capacity(kp.kind.n_params());
            let mut n_params = circuit.n_params;
            for j in 0..kp.kind.n_params() {
                let d = it.next().ok_or_else(|| malformed("sequence ends before slot choice"))?;
                expect(d, &format!("g{p}.slot{j}"), self.theta_max + 1)?;
                let c = d.value;
                if c == 0 || c > n_params {
                    params.push(n_params);
                    n_params += 1;
                } else {
                    params.push(c - 1);
                }
            }
            let depth = 1 + qubits.iter().map(|&q| layer[q]).max().unwrap_or(0);
            if n_params > self.theta_max || depth > self.d_max {
                break;
            }
            for &q in qubits {
                layer[q] = depth;
            }
            circuit.n_params = n_params;
            circuit.gates.push(GateSpec::new(kp.kind, qubits.clone(), params));
        }
        if it.next().is_some() {
            return Err(malformed("choices left over after construction stopped"));
        }
        let required = theta_min.max(1);
        Ok(if !is_connected(&circuit, self.n) {
            BuildOutcome::Invalid {
                circuit,
                reason: InvalidReason::Disconnected,
            }
        } else if circuit.n_params < required {
            BuildOutcome::Invalid {
                reason: InvalidReason::TooFewParams {
                    found: circuit.n_params,
                    required,
                },
                circuit,
            }
        } else {
            BuildOutcome::Valid(circuit)
        })
    }
}

impl DecisionSpace for CircuitSpace {
    fn sample(&self, choose: &mut dyn FnMut(&str, usize) -> usize) -> Decisions {
        let mut out = Vec::new();
        let mut record = |out: &mut Decisions, name: String, card: usize| {
            let v = choose(&name, card);
            debug_assert!(v < card);
            out.push(Decision {
                name,
                value: v,
                cardinality: card,
            });
            v
        };
        let mut n_params = 0usize;
        let mut layer = vec![0usize; self.n];
        for p in 0..self.g_max {
            let k = record(&mut out, format!("g{p}.kind"), self.kinds.len() + 1);
            if k == self.stop_index() {
                break;
            }
            let kp = &self.kinds[k];
            let place = record(&mut out, format!("g{p}.{}.place", kp.kind), kp.placements.len());
            let mut np = n_params;
            for j in 0..kp.kind.n_params() {
                let c = record(&mut out, format!("g{p}.slot{j}"), self.theta_max + 1);
                if c == 0 || c > np {
                    np += 1;
                }
            }
            let qubits = &kp.placements[place];
            let depth = 1 + qubits.iter().map(|&q| layer[q]).max().unwrap_or(0);
            if np > self.theta_max || depth > self.d_max {
                break;
            }
            for &q in qubits {
                layer[q] = depth;
            }
            n_params = np;
        }
        out
    }
}

fn malformed(msg: &str) -> SearchError {
    SearchError::MalformedDecisions(msg.to_string())
}

fn expect(d: &Decision, name: &str, card: usize) -> Result<(), SearchError> {
    if d.name != name || d.cardinality != card || d.value >= card {
        return Err(SearchError::MalformedDecisions(format!(
            "expected `{name}` with {card} options, found `{}` = {} of {}",
            d.name, d.value, d.cardinality
        )));
    }
    Ok(())
}

fn allowed_pair(cfg: &SearchConfig, a: usize, b: usize) -> bool {
    match &cfg.topology {
        None => true,
        Some(t) => t.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)),
    }
}

fn excitation_placements(cfg: &SearchConfig, kind: GateKind) -> Result<Vec<Vec<usize>>, SearchError> {
    let n = cfg.n;
    if cfg.spin_conserving_excitations {
        if !n.is_multiple_of(2) {
            return Err(SearchError::Config(format!(
                "spin-conserving excitations need an even qubit count, got {n}"
            )));
        }
        return Ok(spin_conserving_pool(n / 2)
            .into_iter()
            .filter(|g| g.kind == kind)
            .map(|g| g.qubits)
            .collect());
    }
    let arity = kind.arity();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(arity);
    fn rec(n: usize, arity: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == arity {
            out.push(cur.clone());
            return;
        }
        for q in 0..n {
            if !cur.contains(&q) {
                cur.push(q);
                rec(n, arity, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, arity, &mut cur, &mut out);
    Ok(out)
}

/// Whether the multi-qubit gates of `circuit` link all `n` qubits into one component.
pub fn is_connected(circuit: &Circuit, n: usize) -> bool {
    if n <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for g in &circuit.gates {
        if g.qubits.len() < 2 {
            continue;
        }
        let a = find(&mut parent, g.qubits[0]);
        for &q in &g.qubits[1..] {
            if q >= n {
                return false;
            }
            let b = find(&mut parent, q);
            parent[b] = a;
        }
    }
    let root = find(&mut parent, 0);
    (1..n).all(|q| find(&mut parent, q) == root)
}

/// Every decision sequence of a space in depth-first order, or `None` if there
/// are more than `limit`.
pub fn enumerate_decisions(space: &dyn DecisionSpace, limit: usize) -> Option<Vec<Decisions>> {
    let mut out: Vec<Decisions> = Vec::new();
    // values forced on the next replay; choices beyond the prefix take 0
    let mut prefix: Vec<usize> = Vec::new();
    loop {
        let mut pos = 0;
        let seq = space.sample(&mut |_, _| {
            let v = prefix.get(pos).copied().unwrap_or(0);
            pos += 1;
            v
        });
        if out.len() == limit {
            return None;
        }
        // advance the odometer: bump the deepest choice that has room
        let mut next = None;
        for (i, d) in seq.iter().enumerate().rev() {
            if d.value + 1 < d.cardinality {
                next = Some(i);
                break;
            }
        }
        out.push(seq);
        let last = out.last().expect("just pushed");
        match next {
            None => return Some(out),
            Some(i) => {
                prefix = last[..i].iter().map(|d| d.value).collect();
                prefix.push(last[i].value + 1);
            }
        }
    }
}
