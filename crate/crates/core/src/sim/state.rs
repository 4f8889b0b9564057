use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::SimError;

/// Tolerance on `Σ|a|² = 1` accepted when building a state from raw amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Dense pure state over `n` qubits.
///
/// Amplitudes are stored in natural binary order with qubit 0 as the least
/// significant bit: amplitude `k` belongs to the basis state whose qubit `q`
/// is `(k >> q) & 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Largest register this simulator accepts.
    pub const MAX_QUBITS: usize = 26;

    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    /// Computational basis state with index `index` (qubit 0 = bit 0).
    pub fn basis(n: usize, index: usize) -> Self {
        assert!((1..=Self::MAX_QUBITS).contains(&n), "qubit count {n} out of range");
        let dim = 1usize << n;
        assert!(index < dim, "basis index {index} out of range for {n} qubits");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Self {
        assert!((1..=Self::MAX_QUBITS).contains(&n), "qubit count {n} out of range");
        let dim = 1usize << n;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { n, amps: vec![a; dim] }
    }

    /// Basis state from a bitstring where character `i` is the value of qubit `i`.
    pub fn from_bitstring(bits: &str) -> Result<Self, SimError> {
        let n = bits.chars().count();
        if n == 0 || n > Self::MAX_QUBITS {
            return Err(SimError::InvalidBitstring(bits.to_string()));
        }
        let mut index = 0usize;
        for (q, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => index |= 1 << q,
                _ => return Err(SimError::InvalidBitstring(bits.to_string())),
            }
        }
        Ok(Self::basis(n, index))
    }

    /// Wraps raw amplitudes. The length must be a power of two and the vector normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::BadLength(len));
        }
        let n = len.trailing_zeros() as usize;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(Self { n, amps })
    }

    /// Haar-distributed pure state: a vector of i.i.d. standard complex Gaussians, normalized.
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!((1..=Self::MAX_QUBITS).contains(&n), "qubit count {n} out of range");
        let dim = 1usize << n;
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Self { n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, SimError> {
        if self.n != other.n {
            return Err(SimError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Largest `|a_k − b_k|` after removing the relative global phase.
    pub fn max_distance_up_to_phase(&self, other: &StateVector) -> Result<f64, SimError> {
        let ov = self.inner(other)?;
        let phase = if ov.norm() > 1e-15 {
            ov / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    /// Reduced density matrix of one qubit as `(ρ00, ρ11, ρ01)`.
    pub fn single_qubit_rdm(&self, qubit: usize) -> (f64, f64, Complex64) {
        let mask = 1usize << qubit;
        let mut p0 = 0.0;
        let mut p1 = 0.0;
        let mut off = Complex64::new(0.0, 0.0);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a = self.amps[i];
                let b = self.amps[i | mask];
                p0 += a.norm_sqr();
                p1 += b.norm_sqr();
                off += a * b.conj();
            }
        }
        (p0, p1, off)
    }
}
