//! Fixed benchmark circuits 1–19 (Sim, Johri & Aspuru-Guzik, 2019).
//!
//! Each circuit is one block; `reps` repeats the block with fresh parameters.
//! The layouts are defined for any `n ≥ 2`; at `n = 4` they reproduce the
//! reference `(|θ|, G, D)` counts in [`REFERENCE_COUNTS_N4`].

use thiserror::Error;

use crate::sim::{Circuit, GateKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("unknown benchmark circuit id {0} (expected 1–19)")]
    UnknownId(usize),
    #[error("benchmark circuits need at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("repetition count must be at least 1")]
    ZeroReps,
}

/// All implemented ids.
pub const IDS: std::ops::RangeInclusive<usize> = 1..=19;

/// `(id, |θ|, G, D)` for one block at `n = 4`.
pub const REFERENCE_COUNTS_N4: [(usize, usize, usize, usize); 19] = [
    (1, 8, 8, 2),
    (2, 8, 11, 5),
    (3, 11, 11, 5),
    (4, 11, 11, 5),
    (5, 28, 28, 15),
    (6, 28, 28, 15),
    (7, 19, 19, 6),
    (8, 19, 19, 6),
    (9, 4, 11, 5),
    (10, 8, 12, 6),
    (11, 12, 15, 6),
    (12, 12, 15, 6),
    (13, 16, 16, 9),
    (14, 16, 16, 9),
    (15, 8, 16, 9),
    (16, 11, 11, 4),
    (17, 11, 11, 4),
    (18, 12, 12, 6),
    (19, 12, 12, 6),
];

/// Benchmark circuit `id` on `n` qubits with `reps` blocks.
pub fn benchmark_circuit(id: usize, n: usize, reps: usize) -> Result<Circuit, BenchError> {
    if !IDS.contains(&id) {
        return Err(BenchError::UnknownId(id));
    }
    if n < 2 {
        return Err(BenchError::TooFewQubits(n));
    }
    if reps == 0 {
        return Err(BenchError::ZeroReps);
    }
    let mut c = Circuit::new(n);
    for _ in 0..reps {
        block(&mut c, id, n);
    }
    Ok(c)
}

fn layer(c: &mut Circuit, kind: GateKind, qubits: impl IntoIterator<Item = usize>) {
    for q in qubits {
        c.push_fresh(kind, &[q]);
    }
}

fn pairs(c: &mut Circuit, kind: GateKind, pairs: &[(usize, usize)]) {
    for &(a, b) in pairs {
        c.push_fresh(kind, &[a, b]);
    }
}

/// `(q → q−1)` for `q = n−1 … 1`.
fn descending_chain(n: usize) -> Vec<(usize, usize)> {
    (1..n).rev().map(|q| (q, q - 1)).collect()
}

/// `(n−1 → 0)`, then `(q → q+1)` for `q = n−2 … 0`.
fn ring_up(n: usize) -> Vec<(usize, usize)> {
    let mut v = vec![(n - 1, 0)];
    v.extend((0..n - 1).rev().map(|q| (q, q + 1)));
    v
}

/// `(n−1 → n−2)`, then `(q → q−1 mod n)` for `q = 0 … n−2`.
fn ring_down(n: usize) -> Vec<(usize, usize)> {
    let mut v = vec![(n - 1, n - 2)];
    v.extend((0..n - 1).map(|q| (q, (q + n - 1) % n)));
    v
}

/// `(2k+1 → 2k)`.
fn even_bonds(n: usize) -> Vec<(usize, usize)> {
    (0..n / 2).map(|k| (2 * k + 1, 2 * k)).collect()
}

/// `(2k+2 → 2k+1)`.
fn odd_bonds(n: usize) -> Vec<(usize, usize)> {
    (0..(n - 1) / 2).map(|k| (2 * k + 2, 2 * k + 1)).collect()
}

fn block(c: &mut Circuit, id: usize, n: usize) {
    use GateKind::*;
    let all = 0..n;
    match id {
        1 => {
            layer(c, RX, all.clone());
            layer(c, RZ, all);
        }
        2..=4 => {
            layer(c, RX, all.clone());
            layer(c, RZ, all);
            let k = [CX, CRZ, CRX][id - 2];
            pairs(c, k, &descending_chain(n));
        }
        5 | 6 => {
            let k = if id == 5 { CRZ } else { CRX };
            layer(c, RX, all.clone());
            layer(c, RZ, all.clone());
            for ctrl in (0..n).rev() {
                for t in (0..n).rev().filter(|&t| t != ctrl) {
                    c.push_fresh(k, &[ctrl, t]);
                }
            }
            layer(c, RX, all.clone());
            layer(c, RZ, all);
        }
        7 | 8 => {
            let k = if id == 7 { CRZ } else { CRX };
            layer(c, RX, all.clone());
            layer(c, RZ, all.clone());
            pairs(c, k, &even_bonds(n));
            layer(c, RX, all.clone());
            layer(c, RZ, all);
            pairs(c, k, &odd_bonds(n));
        }
        9 => {
            layer(c, H, all.clone());
            pairs(c, CZ, &descending_chain(n));
            layer(c, RX, all);
        }
        10 => {
            layer(c, RY, all.clone());
            let mut ring = descending_chain(n);
            if n > 2 {
                ring.push((n - 1, 0));
            }
            pairs(c, CZ, &ring);
            layer(c, RY, all);
        }
        11 | 12 => {
            let k = if id == 11 { CX } else { CZ };
            layer(c, RY, all.clone());
            layer(c, RZ, all);
            pairs(c, k, &even_bonds(n));
            layer(c, RY, 1..n - 1);
            layer(c, RZ, 1..n - 1);
            pairs(c, k, &odd_bonds(n));
        }
        13..=15 => {
            let k = [CRZ, CRX, CX][id - 13];
            layer(c, RY, all.clone());
            pairs(c, k, &ring_up(n));
            layer(c, RY, all);
            pairs(c, k, &ring_down(n));
        }
        16 | 17 => {
            let k = if id == 16 { CRZ } else { CRX };
            layer(c, RX, all.clone());
            layer(c, RZ, all);
            pairs(c, k, &even_bonds(n));
            pairs(c, k, &odd_bonds(n));
        }
        18 | 19 => {
            let k = if id == 18 { CRZ } else { CRX };
            layer(c, RX, all.clone());
            layer(c, RZ, all);
            pairs(c, k, &ring_up(n));
        }
        _ => unreachable!("id checked by caller"),
    }
}
