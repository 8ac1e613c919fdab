use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Bounded random-walk queue: one arrival with probability `p` per slot,
/// one service unit per slot, buffer of `capacity` service units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteQueueParams {
    p: f64,
    capacity: usize,
}

impl DiscreteQueueParams {
    pub fn new(p: f64, capacity: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!(
                "arrival probability must lie in [0, 1], got {p}"
            )));
        }
        if capacity < 1 {
            return Err(invalid("buffer capacity must be at least 1"));
        }
        Ok(Self { p, capacity })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Buffer capacity `L`; queue lengths run over `0..=L`.
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn states(&self) -> usize {
        self.capacity + 1
    }

    /// `q = p/(1-p)`, undefined at `p = 1`.
    pub fn q(&self) -> Option<f64> {
        (self.p < 1.0).then(|| self.p / (1.0 - self.p))
    }

    pub fn is_critical(&self) -> bool {
        self.p == 0.5
    }

    /// `|2p - 1|`
    pub fn detuning(&self) -> f64 {
        (2.0 * self.p - 1.0).abs()
    }

    /// Crossover window `N0 = [(2p-1)^2 + (pi/L)^2]^-1` between the growing
    /// and saturated fluctuation regimes.
    pub fn crossover_window(&self) -> f64 {
        let d = 2.0 * self.p - 1.0;
        let k = std::f64::consts::PI / self.capacity as f64;
        1.0 / (d * d + k * k)
    }
}
