use serde::{Deserialize, Serialize};

use crate::sim::Circuit;

/// Upper limits on `|θ|`, `G` and `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub theta_max: usize,
    pub g_max: usize,
    pub d_max: usize,
}

impl Caps {
    pub fn new(theta_max: usize, g_max: usize, d_max: usize) -> Self {
        Self {
            theta_max,
            g_max,
            d_max,
        }
    }

    pub fn admits(&self, circuit: &Circuit) -> bool {
        let c = circuit.complexity();
        c.n_params <= self.theta_max && c.gates <= self.g_max && c.depth <= self.d_max
    }
}

/// `(|θ| + D + G) / (|θ|_max + D_max + G_max)`.
pub fn cmplx_loss(circuit: &Circuit, caps: &Caps) -> f64 {
    let c = circuit.complexity();
    (c.n_params + c.depth + c.gates) as f64 / (caps.theta_max + caps.d_max + caps.g_max) as f64
}
