use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Distribution of interarrival times or packet sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dist {
    Exponential { mean: f64 },
    Deterministic { value: f64 },
    Uniform { low: f64, high: f64 },
}

impl Dist {
    pub fn validate(&self, what: &str) -> Result<()> {
        let ok = match *self {
            Dist::Exponential { mean } => mean > 0.0 && mean.is_finite(),
            Dist::Deterministic { value } => value >= 0.0 && value.is_finite(),
            Dist::Uniform { low, high } => low >= 0.0 && high >= low && high.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("invalid {what} distribution {self:?}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Dist::Exponential { mean } => mean,
            Dist::Deterministic { value } => value,
            Dist::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Dist::Exponential { mean } => mean * mean,
            Dist::Deterministic { .. } => 0.0,
            Dist::Uniform { low, high } => (high - low).powi(2) / 12.0,
        }
    }

    pub fn max(&self) -> f64 {
        match *self {
            Dist::Exponential { .. } => f64::INFINITY,
            Dist::Deterministic { value } => value,
            Dist::Uniform { high, .. } => high,
        }
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Dist::Exponential { mean } => mean * Exp::new(1.0).expect("unit rate").sample(rng),
            Dist::Deterministic { value } => value,
            Dist::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
        }
    }
}

/// Renewal arrivals of random-size packets into a buffer of size 1 drained
/// at rate `r_out`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficModel {
    pub interarrival: Dist,
    pub packet_size: Dist,
    pub r_out: f64,
}

/// Largest mean packet size, relative to the buffer, accepted by validation.
pub const MAX_MEAN_PACKET: f64 = 0.05;

impl TrafficModel {
    /// Poisson arrivals at `rate` of packets of fixed `size`.
    pub fn poisson(rate: f64, size: f64, r_out: f64) -> Result<Self> {
        let m = Self {
            interarrival: Dist::Exponential { mean: 1.0 / rate },
            packet_size: Dist::Deterministic { value: size },
            r_out,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.interarrival.validate("interarrival")?;
        self.packet_size.validate("packet size")?;
        if !(self.interarrival.mean() > 0.0) {
            return Err(invalid("mean interarrival time must be positive"));
        }
        if !(self.r_out > 0.0) {
            return Err(invalid(format!(
                "output rate must be positive, got {}",
                self.r_out
            )));
        }
        if self.packet_size.mean() > MAX_MEAN_PACKET {
            return Err(invalid(format!(
                "mean packet size {} exceeds {MAX_MEAN_PACKET} of the buffer",
                self.packet_size.mean()
            )));
        }
        if self.packet_size.max() > 1.0 {
            return Err(invalid("packets larger than the buffer"));
        }
        Ok(())
    }

    pub fn arrival_rate(&self) -> f64 {
        1.0 / self.interarrival.mean()
    }

    /// Time to empty a full buffer, `1/r_out`.
    pub fn eta0(&self) -> f64 {
        1.0 / self.r_out
    }

    /// Offered load `r_in/r_out` with `r_in` the mean input rate.
    pub fn load(&self) -> f64 {
        self.arrival_rate() * self.packet_size.mean() / self.r_out
    }

    /// `|r_in η₀ - 1|`; small values mean the buffer sits near criticality.
    pub fn detuning(&self) -> f64 {
        (self.load() - 1.0).abs()
    }

    /// Drift and diffusion of the free level from renewal theory:
    /// `a = λ E[s] - r_out`, `σ² = λ (Var s + E[s]² c²)` with `c²` the squared
    /// coefficient of variation of the interarrival time.
    pub fn drift_diffusion(&self) -> (f64, f64) {
        let lambda = self.arrival_rate();
        let ms = self.packet_size.mean();
        let c2 = self.interarrival.variance() * lambda * lambda;
        (
            lambda * ms - self.r_out,
            lambda * (self.packet_size.variance() + ms * ms * c2),
        )
    }
}
