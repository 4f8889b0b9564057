use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SimError, StateVector};

/// Gate kinds available to circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    H,
    RX,
    RY,
    RZ,
    CX,
    CZ,
    CRX,
    CRZ,
    /// Native two-angle rotation `exp(−i(θ/2)(cos φ X + sin φ Y))`, params `[θ, φ]`.
    R,
    /// Givens rotation on the `|01⟩`, `|10⟩` subspace of its two targets.
    SingleExc,
    /// Givens rotation on the `|0011⟩`, `|1100⟩` subspace of its four targets.
    DoubleExc,
}

impl GateKind {
    pub const ALL: [GateKind; 11] = [
        GateKind::H,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::CX,
        GateKind::CZ,
        GateKind::CRX,
        GateKind::CRZ,
        GateKind::R,
        GateKind::SingleExc,
        GateKind::DoubleExc,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::R => 1,
            GateKind::CX | GateKind::CZ | GateKind::CRX | GateKind::CRZ | GateKind::SingleExc => 2,
            GateKind::DoubleExc => 4,
        }
    }

    pub fn n_params(self) -> usize {
        match self {
            GateKind::H | GateKind::CX | GateKind::CZ => 0,
            GateKind::R => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::CRX => "CRX",
            GateKind::CRZ => "CRZ",
            GateKind::R => "R",
            GateKind::SingleExc => "SingleExc",
            GateKind::DoubleExc => "DoubleExc",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SimError::UnknownGate(s.to_string()))
    }
}

/// One gate application: kind, target qubits and parameter slots.
///
/// For controlled gates the first qubit is the control.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateSpec {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub params: Vec<usize>,
}

impl GateSpec {
    pub fn new(kind: GateKind, qubits: Vec<usize>, params: Vec<usize>) -> Self {
        Self { kind, qubits, params }
    }

    /// Checks arity, parameter count and qubit range.
    pub fn validate(&self, n: usize, n_params: usize) -> Result<(), SimError> {
        if self.qubits.len() != self.kind.arity() || self.params.len() != self.kind.n_params() {
            return Err(SimError::BadArity {
                kind: self.kind,
                qubits: self.qubits.len(),
                params: self.params.len(),
            });
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= n {
                return Err(SimError::QubitOutOfRange { qubit: q, n });
            }
            if self.qubits[..i].contains(&q) {
                return Err(SimError::RepeatedQubit(q));
            }
        }
        if let Some(&p) = self.params.iter().find(|&&p| p >= n_params) {
            return Err(SimError::ParamOutOfRange { slot: p, n_params });
        }
        Ok(())
    }

    /// Applies the gate in place with the resolved angles.
    pub(crate) fn apply(&self, state: &mut StateVector, angles: &[f64]) {
        let q = &self.qubits;
        let amps = state.amplitudes_mut();
        match self.kind {
            GateKind::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let m = [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]];
                apply_1q(amps, q[0], &m);
            }
            GateKind::RX => apply_1q(amps, q[0], &rx(angles[0])),
            GateKind::RY => apply_1q(amps, q[0], &ry(angles[0])),
            GateKind::RZ => apply_diag_1q(amps, q[0], angles[0]),
            GateKind::R => apply_1q(amps, q[0], &r_gate(angles[0], angles[1])),
            GateKind::CX => {
                let m = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
                apply_controlled(amps, q[0], q[1], &m);
            }
            GateKind::CZ => {
                let mask = (1usize << q[0]) | (1usize << q[1]);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            GateKind::CRX => apply_controlled(amps, q[0], q[1], &rx(angles[0])),
            GateKind::CRZ => {
                let (s, co) = (angles[0] / 2.0).sin_cos();
                let m = [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]];
                apply_controlled(amps, q[0], q[1], &m);
            }
            GateKind::SingleExc => {
                // |q0=1,q1=0⟩ → cos θ |10⟩ − sin θ |01⟩
                let (s, co) = angles[0].sin_cos();
                let bi = 1usize << q[0];
                let bk = 1usize << q[1];
                for i in 0..amps.len() {
                    if i & bi != 0 && i & bk == 0 {
                        let j = (i ^ bi) | bk;
                        let a10 = amps[i];
                        let a01 = amps[j];
                        amps[i] = a10 * co + a01 * s;
                        amps[j] = a01 * co - a10 * s;
                    }
                }
            }
            GateKind::DoubleExc => {
                // |1100⟩ (q0,q1 set) → cos θ |1100⟩ + sin θ |0011⟩
                let (s, co) = angles[0].sin_cos();
                let hi = (1usize << q[0]) | (1usize << q[1]);
                let lo = (1usize << q[2]) | (1usize << q[3]);
                let all = hi | lo;
                for i in 0..amps.len() {
                    if i & all == hi {
                        let j = (i & !all) | lo;
                        let a = amps[i];
                        let b = amps[j];
                        amps[i] = a * co - b * s;
                        amps[j] = a * s + b * co;
                    }
                }
            }
        }
    }
}

#[inline]
fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

type Mat2 = [[Complex64; 2]; 2];

fn rx(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

fn ry(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

fn r_gate(theta: f64, phi: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    let e_minus = Complex64::from_polar(1.0, -phi);
    let e_plus = Complex64::from_polar(1.0, phi);
    let mi = c(0.0, -s);
    [[c(co, 0.0), mi * e_minus], [mi * e_plus, c(co, 0.0)]]
}

fn apply_1q(amps: &mut [Complex64], q: usize, m: &Mat2) {
    let bit = 1usize << q;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let a0 = amps[i];
            let a1 = amps[i | bit];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn apply_diag_1q(amps: &mut [Complex64], q: usize, theta: f64) {
    let bit = 1usize << q;
    let p0 = Complex64::from_polar(1.0, -theta / 2.0);
    let p1 = Complex64::from_polar(1.0, theta / 2.0);
    for (i, a) in amps.iter_mut().enumerate() {
        *a *= if i & bit == 0 { p0 } else { p1 };
    }
}

fn apply_controlled(amps: &mut [Complex64], control: usize, target: usize, m: &Mat2) {
    let cb = 1usize << control;
    let tb = 1usize << target;
    for i in 0..amps.len() {
        if i & cb != 0 && i & tb == 0 {
            let a0 = amps[i];
            let a1 = amps[i | tb];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | tb] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}
