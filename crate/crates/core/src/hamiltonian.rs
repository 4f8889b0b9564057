//! Pauli-sum observables, energies and exact ground energies.
//!
//! File format: one term per line, `coefficient paulistring`, with `#`
//! starting a comment. Character `i` of the Pauli string acts on qubit `i`.
//! Repeated strings are merged in order of first appearance.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{PauliString, SimError, StateVector};

/// Largest qubit count handled by the dense eigensolver.
pub const DENSE_MAX_QUBITS: usize = 10;
/// Largest qubit count accepted by [`exact_ground_energy`].
pub const EXACT_MAX_QUBITS: usize = 14;

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: Pauli string has {found} qubits, expected {expected}")]
    InconsistentLength { line: usize, expected: usize, found: usize },
    #[error("Hamiltonian has no terms")]
    Empty,
    #[error("{0} qubits exceeds the exact diagonalization limit of {EXACT_MAX_QUBITS}")]
    TooLarge(usize),
    #[error("terms act on different qubit counts ({0} vs {1})")]
    MixedLengths(usize, usize),
    #[error("non-finite coefficient {0}")]
    NonFinite(f64),
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// `Σ_j c_j P_j` with all strings on the same number of qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    /// Builds a sum, merging repeated strings.
    pub fn new(terms: Vec<(f64, PauliString)>) -> Result<Self, HamiltonianError> {
        let first = terms.first().ok_or(HamiltonianError::Empty)?;
        let n = first.1.n_qubits();
        let mut order: Vec<(f64, PauliString)> = Vec::with_capacity(terms.len());
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        for (c, p) in terms {
            if !c.is_finite() {
                return Err(HamiltonianError::NonFinite(c));
            }
            if p.n_qubits() != n {
                return Err(HamiltonianError::MixedLengths(n, p.n_qubits()));
            }
            match index.get(&p) {
                Some(&k) => order[k].0 += c,
                None => {
                    index.insert(p.clone(), order.len());
                    order.push((c, p));
                }
            }
        }
        Ok(Self { terms: order })
    }

    pub fn from_strs(terms: &[(f64, &str)]) -> Result<Self, HamiltonianError> {
        let t = terms
            .iter()
            .map(|&(c, s)| Ok((c, PauliString::new(s)?)))
            .collect::<Result<Vec<_>, SimError>>()?;
        Self::new(t)
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn n_qubits(&self) -> usize {
        self.terms[0].1.n_qubits()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(c, p)| (alpha * c, p.clone())).collect(),
        }
    }

    /// `self + other`, merging repeated strings.
    pub fn plus(&self, other: &PauliSum) -> Result<Self, HamiltonianError> {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        Self::new(t)
    }

    /// `Σ_q (I − Z_q)/2`, the total occupation of a Jordan–Wigner register.
    pub fn number_operator(n: usize) -> Self {
        let mut terms = vec![(n as f64 / 2.0, PauliString::identity(n))];
        for q in 0..n {
            terms.push((-0.5, PauliString::single(n, q, 'Z').expect("valid")));
        }
        Self::new(terms).expect("non-empty")
    }

    /// `Z^{⊗n}`, whose expectation is `p_even − p_odd` of the measured bit parity.
    pub fn parity(n: usize) -> Self {
        Self::new(vec![(1.0, PauliString::new(&"Z".repeat(n)).expect("valid"))]).expect("non-empty")
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn energy(&self, state: &StateVector) -> Result<f64, SimError> {
        let mut e = 0.0;
        for (c, p) in &self.terms {
            e += c * p.expectation(state)?;
        }
        Ok(e)
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits();
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (c, p) in &self.terms {
            for j in 0..dim {
                let (i, ph) = p.column(j);
                m[(i, j)] += ph * *c;
            }
        }
        m
    }

    /// `H v` without forming the matrix.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for (c, p) in &self.terms {
            for (j, a) in v.iter().enumerate() {
                let (i, ph) = p.column(j);
                out[i] += ph * a * *c;
            }
        }
    }

    /// Parses the text format. Line numbers in errors are 1-based.
    pub fn parse(text: &str) -> Result<Self, HamiltonianError> {
        let mut terms = Vec::new();
        let mut n: Option<usize> = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let coef_s = parts.next().unwrap_or("");
            let pauli_s = parts.next().ok_or_else(|| HamiltonianError::Parse {
                line: line_no,
                msg: "expected `coefficient paulistring`".into(),
            })?;
            if parts.next().is_some() {
                return Err(HamiltonianError::Parse {
                    line: line_no,
                    msg: "trailing tokens".into(),
                });
            }
            let coef: f64 = coef_s
                .replace('\u{2212}', "-")
                .parse()
                .map_err(|_| HamiltonianError::Parse {
                    line: line_no,
                    msg: format!("bad coefficient `{coef_s}`"),
                })?;
            if !coef.is_finite() {
                return Err(HamiltonianError::Parse {
                    line: line_no,
                    msg: format!("non-finite coefficient `{coef_s}`"),
                });
            }
            let p = PauliString::new(pauli_s).map_err(|_| HamiltonianError::Parse {
                line: line_no,
                msg: format!("bad Pauli string `{pauli_s}`"),
            })?;
            match n {
                None => n = Some(p.n_qubits()),
                Some(m) if m != p.n_qubits() => {
                    return Err(HamiltonianError::InconsistentLength {
                        line: line_no,
                        expected: m,
                        found: p.n_qubits(),
                    })
                }
                _ => {}
            }
            terms.push((coef, p));
        }
        Self::new(terms)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, p) in &self.terms {
            writeln!(f, "{c:.15} {p}")?;
        }
        Ok(())
    }
}

/// `Σ c_j ⟨P_j⟩`.
pub fn energy(state: &StateVector, h: &PauliSum) -> Result<f64, SimError> {
    h.energy(state)
}

/// Reads a Pauli-sum file.
pub fn load_pauli_sum(path: impl AsRef<Path>) -> Result<PauliSum, HamiltonianError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| HamiltonianError::Io {
        path: path.display().to_string(),
        source,
    })?;
    PauliSum::parse(&text)
}

/// Smallest eigenvalue of `h` and a normalized eigenvector.
///
/// Dense Hermitian diagonalization up to [`DENSE_MAX_QUBITS`], Lanczos with full
/// reorthogonalization above that.
pub fn exact_ground_energy(h: &PauliSum) -> Result<(f64, StateVector), HamiltonianError> {
    let n = h.n_qubits();
    if n > EXACT_MAX_QUBITS {
        return Err(HamiltonianError::TooLarge(n));
    }
    if n <= DENSE_MAX_QUBITS {
        dense_ground(h)
    } else {
        lanczos_ground(h)
    }
}

fn dense_ground(h: &PauliSum) -> Result<(f64, StateVector), HamiltonianError> {
    let eig = SymmetricEigen::new(h.to_dense());
    let (k, &e0) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(HamiltonianError::NoConvergence)?;
    let v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
    Ok((e0, normalized(v)?))
}

fn normalized(mut v: Vec<Complex64>) -> Result<StateVector, HamiltonianError> {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    Ok(StateVector::from_amplitudes(v)?)
}

fn lanczos_ground(h: &PauliSum) -> Result<(f64, StateVector), HamiltonianError> {
    let dim = 1usize << h.n_qubits();
    let max_iter = dim.min(400);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut q: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    normalize_in_place(&mut q);
    let mut basis: Vec<Vec<Complex64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut prev = f64::INFINITY;
    loop {
        let k = basis.len() - 1;
        h.apply(&basis[k], &mut w);
        let a: f64 = dot(&basis[k], &w).re;
        alpha.push(a);
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let bnorm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let (e0, y) = tridiag_ground(&alpha, &beta);
        let residual = bnorm * y[y.len() - 1].abs();
        let done = residual < 1e-10
            || bnorm < 1e-12
            || basis.len() >= max_iter
            || ((e0 - prev).abs() < 1e-14 && basis.len() > 20);
        prev = e0;
        if done {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            for (coef, b) in y.iter().zip(&basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += bi * *coef;
                }
            }
            return Ok((e0, normalized(v)?));
        }
        beta.push(bnorm);
        let next: Vec<Complex64> = w.iter().map(|x| x / bnorm).collect();
        basis.push(next);
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize_in_place(v: &mut [Complex64]) {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
}

fn tridiag_ground(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, &e0) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let y: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
    (e0, y.iter().copied().collect())
}
