//! Finite-sample statistics for clipped gradient samples.
//!
//! For `m` independent samples in `[L, U]` with range `R = U − L`, the sample
//! standard deviation concentrates around its mean with half-width
//! `sqrt(2R² ln(2/δ)/(m−1))` at confidence `1 − δ`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SeedSplitter;

/// Default clipping interval.
pub const DEFAULT_BOUNDS: (f64, f64) = (-1.0, 1.0);
/// Slack on almost-sure inequalities.
pub const SELF_BOUND_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConcentrationError {
    #[error("clip bounds require L < U (got L = {0}, U = {1})")]
    BadBounds(f64, f64),
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfBounds { value: f64, lo: f64, hi: f64 },
    #[error("{name} = {value} outside its domain")]
    Domain { name: &'static str, value: f64 },
}

/// Bounded sample `X_1 … X_m ∈ [L, U]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientSample {
    values: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl GradientSample {
    pub fn new(values: Vec<f64>, lo: f64, hi: f64) -> Result<Self, ConcentrationError> {
        if !(lo < hi) {
            return Err(ConcentrationError::BadBounds(lo, hi));
        }
        if values.len() < 3 {
            return Err(ConcentrationError::TooFewSamples(values.len()));
        }
        if let Some(&v) = values.iter().find(|&&v| !(lo..=hi).contains(&v)) {
            return Err(ConcentrationError::OutOfBounds { value: v, lo, hi });
        }
        Ok(Self { values, lo, hi })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn range(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }
}

/// Sample variance with its normalized statistic and confidence half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub s2: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub z: f64,
}

impl VarianceEstimate {
    pub fn from_sample(x: &GradientSample, delta: f64) -> Result<Self, ConcentrationError> {
        let s2 = sample_variance(x.values())?;
        let r = x.range();
        Ok(Self {
            s2,
            epsilon: concentration_epsilon(x.m(), delta, r)?,
            delta,
            z: x.m() as f64 / (r * r) * s2,
        })
    }
}

/// Element-wise `min(U, max(L, x))`.
pub fn clip(values: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>, ConcentrationError> {
    if !(lo < hi) {
        return Err(ConcentrationError::BadBounds(lo, hi));
    }
    Ok(values.iter().map(|&v| v.clamp(lo, hi)).collect())
}

/// Unbiased sample variance `(1/(m−1)) Σ (X_i − X̄)²`, two-pass.
pub fn sample_variance(x: &[f64]) -> Result<f64, ConcentrationError> {
    let m = x.len();
    if m < 3 {
        return Err(ConcentrationError::TooFewSamples(m));
    }
    let mean = x.iter().sum::<f64>() / m as f64;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(ss / (m - 1) as f64)
}

fn check_delta(delta: f64) -> Result<(), ConcentrationError> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(ConcentrationError::Domain {
            name: "delta",
            value: delta,
        })
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<(), ConcentrationError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConcentrationError::Domain { name, value: v })
    }
}

/// Smallest `m ≥ 3` with `sqrt(2R² ln(2/δ)/(m−1)) ≤ ε`.
pub fn required_samples(epsilon: f64, delta: f64, range: f64) -> Result<usize, ConcentrationError> {
    check_positive("epsilon", epsilon)?;
    check_positive("R", range)?;
    check_delta(delta)?;
    let x = 2.0 * range * range * (2.0 / delta).ln() / (epsilon * epsilon);
    // guard against x landing a hair above an integer through rounding
    let mut k = x.ceil();
    if k - 1.0 >= x * (1.0 - 1e-15) && k - 1.0 > 0.0 {
        k -= 1.0;
    }
    let m = k as usize + 1;
    Ok(m.max(3))
}

/// `sqrt(2R² ln(2/δ)/(m−1))`.
pub fn concentration_epsilon(m: usize, delta: f64, range: f64) -> Result<f64, ConcentrationError> {
    if m < 3 {
        return Err(ConcentrationError::TooFewSamples(m));
    }
    check_delta(delta)?;
    check_positive("R", range)?;
    Ok((2.0 * range * range * (2.0 / delta).ln() / (m - 1) as f64).sqrt())
}

/// Result of [`self_bounding_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfBoundingResult {
    pub max_delta: f64,
    pub sum_sq_delta: f64,
    pub z: f64,
    pub ok: bool,
}

/// Evaluates `Δ_k = (X_k − X̄_(k))²/R²` (leave-one-out mean) and checks
/// `max Δ_k ≤ 1` and `Σ Δ_k² ≤ (m/(m−1)) Z` with `Z = (m/R²) s²`.
pub fn self_bounding_check(x: &GradientSample) -> SelfBoundingResult {
    let m = x.m();
    let mf = m as f64;
    let r2 = x.range() * x.range();
    let sum: f64 = x.values().iter().sum();
    let mut max_delta = 0.0f64;
    let mut sum_sq = 0.0;
    for &v in x.values() {
        let loo = (sum - v) / (mf - 1.0);
        let d = (v - loo) * (v - loo) / r2;
        max_delta = max_delta.max(d);
        sum_sq += d * d;
    }
    let s2 = sample_variance(x.values()).expect("m ≥ 3 by construction");
    let z = mf / r2 * s2;
    let ok = max_delta <= 1.0 + SELF_BOUND_TOL && sum_sq <= mf / (mf - 1.0) * z + SELF_BOUND_TOL;
    SelfBoundingResult {
        max_delta,
        sum_sq_delta: sum_sq,
        z,
        ok,
    }
}

/// Outcome of [`coverage_experiment`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub batches: usize,
    pub m: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub covered: usize,
    pub rate: f64,
    /// Mean of `s²` over all batches (true value 1/3).
    pub mean_s2: f64,
}

/// Draws `batches` samples of `m` i.i.d. uniform values on `[−1, 1]` and counts
/// how often `|√s² − √(1/3)|` lies within the half-width for `R = 2`.
pub fn coverage_experiment(
    batches: usize,
    m: usize,
    delta: f64,
    seed: u64,
) -> Result<CoverageReport, ConcentrationError> {
    let epsilon = concentration_epsilon(m, delta, 2.0)?;
    let split = SeedSplitter::new(seed);
    let s2s: Vec<f64> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = split.rng(0, b as u64);
            let x: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect();
            sample_variance(&x)
        })
        .collect::<Result<_, _>>()?;
    let truth = (1.0f64 / 3.0).sqrt();
    let covered = s2s.iter().filter(|s2| (s2.sqrt() - truth).abs() <= epsilon).count();
    Ok(CoverageReport {
        batches,
        m,
        delta,
        epsilon,
        covered,
        rate: covered as f64 / batches.max(1) as f64,
        mean_s2: s2s.iter().sum::<f64>() / batches.max(1) as f64,
    })
}

/// Outcome of [`self_bounding_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfBoundingSuiteReport {
    pub cases: usize,
    pub failures: usize,
    pub worst_max_delta: f64,
    /// Largest `Σ Δ_k² − (m/(m−1)) Z` seen.
    pub worst_excess: f64,
}

/// Runs [`self_bounding_check`] on `cases` random samples in `[−1, 1]` with
/// `m ∈ [3, 100]`, mixing uniform draws with boundary-heavy patterns.
pub fn self_bounding_suite(cases: usize, seed: u64) -> SelfBoundingSuiteReport {
    let split = SeedSplitter::new(seed);
    let results: Vec<(SelfBoundingResult, f64)> = (0..cases)
        .into_par_iter()
        .map(|c| {
            let mut rng = split.rng(1, c as u64);
            let m = rng.random_range(3..=100usize);
            let values: Vec<f64> = match c % 5 {
                0 | 1 => (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect(),
                // random signs on the boundary
                2 => (0..m).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect(),
                // one value at U, the rest at L
                3 => (0..m).map(|k| if k == 0 { 1.0 } else { -1.0 }).collect(),
                // mostly boundary with a few interior points
                _ => (0..m)
                    .map(|_| match rng.random_range(0..4u8) {
                        0 => rng.random_range(-1.0..=1.0),
                        1 => -1.0,
                        _ => 1.0,
                    })
                    .collect(),
            };
            let r = self_bounding_check(&GradientSample::new(values, -1.0, 1.0).expect("valid sample"));
            let mf = m as f64;
            (r, r.sum_sq_delta - mf / (mf - 1.0) * r.z)
        })
        .collect();
    let mut rep = SelfBoundingSuiteReport {
        cases,
        failures: 0,
        worst_max_delta: 0.0,
        worst_excess: f64::NEG_INFINITY,
    };
    for (r, excess) in &results {
        if !r.ok {
            rep.failures += 1;
        }
        rep.worst_max_delta = rep.worst_max_delta.max(r.max_delta);
        rep.worst_excess = rep.worst_excess.max(*excess);
    }
    rep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarianceBranch {
    /// `√E + √s ≤ 1`, so `|s² − E[s²]| ≤ |√s² − √E[s²]| ≤ ε`.
    VarianceBounded,
    /// `√E + √s > 1`, so `E[s²] > ((1−ε)/2)²` and the variance is not vanishing.
    NoBarrenPlateau,
}

/// Chooses the branch for an observed `s2` and its expectation.
pub fn variance_branch(s2: f64, expected_s2: f64, epsilon: f64) -> Result<VarianceBranch, ConcentrationError> {
    for (name, v) in [("s2", s2), ("expected_s2", expected_s2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(ConcentrationError::Domain { name, value: v });
        }
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(ConcentrationError::Domain {
            name: "epsilon",
            value: epsilon,
        });
    }
    Ok(if expected_s2.sqrt() + s2.sqrt() <= 1.0 {
        VarianceBranch::VarianceBounded
    } else {
        VarianceBranch::NoBarrenPlateau
    })
}
