use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Drift `a` and diffusion `σ²` of the buffer level (buffer = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpParams {
    a: f64,
    sigma2: f64,
}

impl FpParams {
    pub fn new(a: f64, sigma2: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(invalid(format!("drift must be finite, got {a}")));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(invalid(format!("diffusion must be positive, got {sigma2}")));
        }
        Ok(Self { a, sigma2 })
    }

    /// Parameters with dimensionless drift `v = a/σ²` at the given `σ²`.
    pub fn from_v(v: f64, sigma2: f64) -> Result<Self> {
        Self::new(v * sigma2, sigma2)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// `v = a/σ²`
    pub fn v(&self) -> f64 {
        self.a / self.sigma2
    }

    /// `τ = σ² t / 2`
    pub fn tau(&self, t: f64) -> f64 {
        0.5 * self.sigma2 * t
    }

    pub fn time_from_tau(&self, tau: f64) -> f64 {
        2.0 * tau / self.sigma2
    }

    /// Time over which diffusion spreads across the whole buffer, `2/σ²`.
    pub fn relaxation_time(&self) -> f64 {
        2.0 / self.sigma2
    }

    /// Parameters of the mirrored problem `ℓ -> 1-ℓ`, `v -> -v`, which turns
    /// overflow statistics at `ℓ = 1` into idleness statistics at `ℓ = 0`.
    pub fn idleness_dual(&self) -> Self {
        Self {
            a: -self.a,
            sigma2: self.sigma2,
        }
    }
}

/// Truncation and inversion settings for the eigenseries and Laplace routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    /// Fixed truncation order; `None` picks `ceil(6/sqrt(τ)) + 8` (capped).
    pub k_max: Option<usize>,
    /// Absolute tolerance for quadratures built on the series.
    pub tol: f64,
    /// Talbot node count for numerical Laplace inversion.
    pub laplace_nodes: usize,
    /// Smallest `τ` the series is evaluated at.
    pub tau_floor: f64,
}

pub const K_MAX_CAP: usize = 100_000;

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            k_max: None,
            tol: 1e-10,
            laplace_nodes: crate::numerics::laplace::DEFAULT_NODES,
            tau_floor: 1e-8,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if matches!(self.k_max, Some(0)) {
            return Err(invalid("k_max must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        if !(self.tau_floor > 0.0) {
            return Err(invalid("tau floor must be positive"));
        }
        Ok(())
    }

    pub fn terms_for(&self, tau: f64) -> usize {
        match self.k_max {
            Some(k) => k,
            None => (((6.0 / tau.sqrt()).ceil() as usize) + 8).min(K_MAX_CAP),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalings() {
        let p = FpParams::new(0.3, 0.6).unwrap();
        assert!((p.v() - 0.5).abs() < 1e-15);
        assert!((p.tau(2.0) - 0.6).abs() < 1e-15);
        assert!((p.time_from_tau(p.tau(3.7)) - 3.7).abs() < 1e-15);
        assert_eq!(p.idleness_dual().v(), -0.5);
        assert!(FpParams::new(0.1, 0.0).is_err());
        assert!(FpParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn default_truncation() {
        let c = SeriesControl::default();
        assert_eq!(c.terms_for(1.0), 14);
        assert_eq!(c.terms_for(1e-4), 608);
        assert_eq!(c.terms_for(1e-14), K_MAX_CAP);
        assert!(SeriesControl {
            k_max: Some(0),
            ..c
        }
        .validate()
        .is_err());
    }
}
