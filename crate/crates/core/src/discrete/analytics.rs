//! Exact loss statistics of the bounded walk.
//!
//! The mean is closed form. Second-order statistics reduce to sums of the
//! return probability `G_j(L, L)` over time lags; those are collapsed into
//! per-mode geometric sums over the spectrum of the symmetrized kernel, so
//! the cost is one O(L^2) eigen-solve regardless of the window length.

use std::f64::consts::PI;

use super::kernel::{pow_u64, TransitionKernel};
use super::params::DiscreteQueueParams;
use crate::error::{invalid, Error, Result};
use crate::numerics::{compensated_sum, integrate, special, CompensatedSum, Domain};

/// Stationary queue-length distribution `π(l) ∝ q^l`.
pub fn stationary_distribution(params: DiscreteQueueParams) -> Vec<f64> {
    let n = params.states();
    let l = params.capacity();
    let p = params.p();
    let mut pi = vec![0.0; n];
    if p == 0.0 {
        pi[0] = 1.0;
        return pi;
    }
    if p == 1.0 {
        pi[l] = 1.0;
        return pi;
    }
    let ln_q = (p / (1.0 - p)).ln();
    // scale so the largest weight is 1
    for (i, w) in pi.iter_mut().enumerate() {
        let e = if ln_q <= 0.0 {
            i as f64
        } else {
            i as f64 - l as f64
        };
        *w = (e * ln_q).exp();
    }
    let z = compensated_sum(pi.iter().copied());
    pi.iter_mut().for_each(|w| *w /= z);
    pi
}

/// Mean number of losses per slot, `p (q^{L+1} - q^L)/(q^{L+1} - 1)`, with
/// the `q -> 1` limit `p/(L+1)` taken explicitly at `p = 1/2`.
pub fn mean_loss_rate_exact(params: DiscreteQueueParams) -> f64 {
    let p = params.p();
    let l = params.capacity() as f64;
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    if p == 0.5 {
        return p / (l + 1.0);
    }
    let ln_q = (p / (1.0 - p)).ln();
    let q_minus_1 = (2.0 * p - 1.0) / (1.0 - p);
    if ln_q > 0.0 {
        // p (1 - 1/q) / (1 - q^{-(L+1)})
        p * (q_minus_1 / (1.0 + q_minus_1)) / (-(-(l + 1.0) * ln_q).exp_m1())
    } else {
        // p q^L (1 - q) / (1 - q^{L+1})
        p * (l * ln_q).exp() * (-q_minus_1) / (-((l + 1.0) * ln_q).exp_m1())
    }
}

/// Large-`L` asymptotes of the mean loss rate: `2p-1`, `1/(L+1)`, and
/// `(1-2p)/(1-p) q^L` above, at, and below criticality. The critical value
/// is the asymptote as usually quoted; the exact `q -> 1` limit is `p/(L+1)`.
pub fn mean_loss_rate_asymptote(params: DiscreteQueueParams) -> f64 {
    let p = params.p();
    let l = params.capacity() as f64;
    if p > 0.5 {
        2.0 * p - 1.0
    } else if p == 0.5 {
        1.0 / (l + 1.0)
    } else if p == 0.0 {
        0.0
    } else {
        (1.0 - 2.0 * p) / (1.0 - p) * (l * (p / (1.0 - p)).ln()).exp()
    }
}

/// `sum_{j=0}^{m-1} (m - j) λ^j`
fn triangular_geometric(lambda: f64, m: u64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    let delta = 1.0 - lambda;
    if delta * mf < 1e-3 {
        let mut s = CompensatedSum::new();
        let mut pow = 1.0;
        for j in 0..m {
            s.add((mf - j as f64) * pow);
            pow *= lambda;
        }
        return s.value();
    }
    let one_minus_pow = if lambda > 0.0 {
        -(mf * lambda.ln()).exp_m1()
    } else {
        1.0 - pow_u64(lambda, m)
    };
    (mf * delta - lambda * one_minus_pow) / (delta * delta)
}

/// `sum_{a=0}^{n-1} λ^a`
fn geometric(lambda: f64, n: u64) -> f64 {
    let nf = n as f64;
    let delta = 1.0 - lambda;
    if delta * nf < 1e-6 {
        // 1 + λ + ... ≈ n - δ n(n-1)/2
        return nf - delta * nf * (nf - 1.0) / 2.0;
    }
    if lambda > 0.0 {
        -(nf * lambda.ln()).exp_m1() / delta
    } else {
        (1.0 - pow_u64(lambda, n)) / delta
    }
}

impl TransitionKernel {
    pub fn mean_loss_rate(&self) -> f64 {
        mean_loss_rate_exact(self.params())
    }

    /// Variance of the number of losses in a window of `n` slots.
    pub fn loss_variance(&self, n: u64) -> Result<f64> {
        if n < 1 {
            return Err(invalid("window length must be at least 1"));
        }
        let params = self.params();
        let p = params.p();
        let m = self.mean_loss_rate();
        let base = n as f64 * m * (1.0 - m);
        if p == 0.0 || p == 1.0 || n == 1 {
            return Ok(base);
        }
        let pi_l = m / p;
        let spec = self.boundary_spectrum()?;
        let tail = compensated_sum(
            spec.relaxing_modes()
                .map(|(lambda, w)| w * triangular_geometric(lambda, n - 1)),
        );
        Ok(base + 2.0 * pi_l * p * p * tail)
    }

    /// `χ_N = Var(L_N) / <L_N>`.
    pub fn compressibility(&self, n: u64) -> Result<f64> {
        let m = self.mean_loss_rate();
        if m <= 0.0 {
            return Err(Error::Undefined(
                "compressibility with zero mean loss".into(),
            ));
        }
        Ok(self.loss_variance(n)? / (n as f64 * m))
    }

    /// Covariance of the loss counts of two windows of `n` slots whose starts
    /// are `m` slots apart (`m >= n`).
    pub fn loss_covariance(&self, n: u64, m: u64) -> Result<f64> {
        if n < 1 || m < n {
            return Err(invalid(format!(
                "need separation >= window >= 1, got N={n}, M={m}"
            )));
        }
        let params = self.params();
        let p = params.p();
        if p == 0.0 || p == 1.0 {
            return Ok(0.0);
        }
        let pi_l = self.mean_loss_rate() / p;
        let spec = self.boundary_spectrum()?;
        let s = compensated_sum(spec.relaxing_modes().map(|(lambda, w)| {
            let g = geometric(lambda, n);
            w * pow_u64(lambda, m - n) * g * g
        }));
        Ok(pi_l * p * p * s)
    }

    pub fn correlator_r2(&self, n: u64, m: u64) -> Result<f64> {
        let var = self.loss_variance(n)?;
        if var <= 0.0 {
            return Err(Error::Undefined("R2 with zero loss variance".into()));
        }
        Ok(self.loss_covariance(n, m)? / var)
    }
}

pub fn loss_variance_exact(params: DiscreteQueueParams, n: u64) -> Result<f64> {
    TransitionKernel::new(params).loss_variance(n)
}

pub fn compressibility(params: DiscreteQueueParams, n: u64) -> Result<f64> {
    TransitionKernel::new(params).compressibility(n)
}

/// Integrand of the critical coefficient,
/// `x^-2 (1 - (1 - e^{-x^2})/x^2)`, continuous at 0 with value 1/2.
pub fn critical_integrand(x: f64) -> f64 {
    let y = x * x;
    if y < 0.1 {
        // sum_k (-y)^k / (k+2)!
        let mut acc = -1.0 / 362_880.0;
        for c in [
            1.0 / 40_320.0,
            -1.0 / 5040.0,
            1.0 / 720.0,
            -1.0 / 120.0,
            1.0 / 24.0,
            -1.0 / 6.0,
            0.5,
        ] {
            acc = acc * y + c;
        }
        return acc;
    }
    (y + (-y).exp_m1()) / (y * y)
}

/// `c` in `χ_N ≈ c sqrt(N)` at criticality for `1 << N << N0`.
pub fn critical_coefficient() -> Result<f64> {
    let r = integrate(critical_integrand, Domain::UpperInfinite(0.0), 1e-12)?;
    Ok(2.0 * 2f64.sqrt() / PI * r.value)
}

/// Saturated compressibility `χ_∞` for `N >> N0`. With `d = |2p-1|`:
/// `(1-d²)/d` above criticality and `1/d` below it when `dL >> 1`, and
/// `2L/3` when `dL << 1`. Returns `None` between the regimes.
pub fn chi_infinity_asymptote(params: DiscreteQueueParams) -> Option<f64> {
    let d = params.detuning();
    let l = params.capacity() as f64;
    if d * l >= 10.0 {
        if params.p() > 0.5 {
            Some((1.0 - d * d) / d)
        } else {
            Some(1.0 / d)
        }
    } else if d * l <= 0.1 {
        Some(2.0 * l / 3.0)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R2Branch {
    /// Green's-function sums, valid for any `N <= M`.
    Exact,
    /// Closed form for `N0 >> N >> 1`.
    Analytic,
}

/// Normalized correlation of loss fluctuations in windows of `n` slots
/// whose starts are `m` apart.
pub fn correlator_r2(params: DiscreteQueueParams, n: u64, m: u64, branch: R2Branch) -> Result<f64> {
    let k = TransitionKernel::new(params);
    match branch {
        R2Branch::Exact => k.correlator_r2(n, m),
        R2Branch::Analytic => {
            if m <= n {
                return Err(invalid("analytic R2 needs M > N"));
            }
            let chi = k.compressibility(n)?;
            Ok(r2_analytic(params.p(), n, m, chi))
        }
    }
}

/// `(pN/χ_N)[e^{-Md²/2} sqrt(2/(πM)) - d erfc(d sqrt(M/2))]`, `d = |2p-1|`.
pub fn r2_analytic(p: f64, n: u64, m: u64, chi: f64) -> f64 {
    let d = (2.0 * p - 1.0).abs();
    let mf = m as f64;
    let bracket = (-mf * d * d / 2.0).exp() * (2.0 / (PI * mf)).sqrt()
        - d * special::erfc(d * (mf / 2.0).sqrt());
    p * n as f64 / chi * bracket
}
