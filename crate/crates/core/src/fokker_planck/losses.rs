//! Statistics of the traffic lost at the full-buffer wall in the stationary
//! regime. All transforms are over `τ = σ²t/2` and lost volume is measured in
//! buffer units.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::laplace_domain::return_transform_full;
use super::params::{FpParams, SeriesControl};
use super::stationary::p_full;
use crate::error::{invalid, Error, Result};
use crate::numerics::special::{coth_over_x_minus_csch2, erfc, gamma};
use crate::numerics::{laplace_invert, laplace_invert_scaled};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossMoments {
    pub k: u32,
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `τ ≪ 1`
    Short,
    /// `τ ≫ 1`
    Long,
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("time must be positive, got {t}")));
    }
    Ok(())
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `k`-th moment of the volume lost in a window of length `t`.
pub fn loss_moment(params: &FpParams, ctrl: &SeriesControl, k: u32, t: f64) -> Result<LossMoments> {
    check_time(t)?;
    if k == 0 {
        return Err(invalid("moment order must be at least 1"));
    }
    let p1 = p_full(params);
    let tau = params.tau(t);
    let value = if k == 1 {
        p1 * tau
    } else {
        let v = params.v();
        let coef = factorial(k) * p1;
        let inv = laplace_invert(
            |eps: Complex64| coef * return_transform_full(v, eps).powu(k - 1) / (eps * eps),
            tau,
            ctrl.laplace_nodes,
        )?;
        inv.value.max(0.0)
    };
    Ok(LossMoments { k, t, value })
}

/// Leading behaviour of the `k`-th moment in the short- and long-time regimes.
pub fn loss_moment_asymptotic(params: &FpParams, k: u32, t: f64, regime: Regime) -> Result<f64> {
    check_time(t)?;
    if k == 0 {
        return Err(invalid("moment order must be at least 1"));
    }
    let p1 = p_full(params);
    let tau = params.tau(t);
    Ok(match regime {
        Regime::Short => {
            let kf = f64::from(k);
            factorial(k) * p1 * tau.powf(0.5 * (kf + 1.0)) / gamma(0.5 * (kf + 3.0))
        }
        Regime::Long => (p1 * tau).powi(k as i32),
    })
}

/// Variance of the lost volume for windows much longer than the relaxation time.
pub fn loss_variance_longtime(params: &FpParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let tau = params.tau(t);
    if tau < 10.0 {
        log::warn!(
            "long-time loss variance used at tau = {tau:.3}, below the validity threshold 10"
        );
    }
    Ok(p_full(params) * tau * coth_over_x_minus_csch2(params.v()))
}

/// Probability that any traffic is lost in a window of length `t`.
pub fn p_loss(params: &FpParams, ctrl: &SeriesControl, t: f64) -> Result<f64> {
    check_time(t)?;
    let p1 = p_full(params);
    let v = params.v();
    let inv = laplace_invert(
        |eps: Complex64| p1 / (eps * eps * return_transform_full(v, eps)),
        params.tau(t),
        ctrl.laplace_nodes,
    )?;
    Ok(inv.value.clamp(0.0, 1.0))
}

pub fn p_loss_asymptotic(params: &FpParams, t: f64, regime: Regime) -> Result<f64> {
    check_time(t)?;
    Ok(match regime {
        Regime::Short => p_full(params) * (4.0 * params.tau(t) / std::f64::consts::PI).sqrt(),
        Regime::Long => 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossDensity {
    pub value: f64,
    /// Set when the value comes from the long-time Gaussian surrogate rather
    /// than from inversion.
    pub asymptotic: bool,
}

fn gaussian_surrogate(params: &FpParams, x: f64, t: f64) -> f64 {
    let mean = p_full(params) * params.tau(t);
    let var = p_full(params) * params.tau(t) * coth_over_x_minus_csch2(params.v());
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Density of the lost volume `x > 0` in a window of length `t`. Its total
/// mass is `p_loss(t)`; the remainder sits at `x = 0`.
pub fn loss_pdf(params: &FpParams, ctrl: &SeriesControl, x: f64, t: f64) -> Result<LossDensity> {
    check_time(t)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(invalid(format!(
            "lost volume must be non-negative, got {x}"
        )));
    }
    let p1 = p_full(params);
    let v = params.v();
    let tau = params.tau(t);
    let f = |eps: Complex64| {
        let w = return_transform_full(v, eps);
        p1 / (eps * eps * w * w) * (-x / w).exp()
    };
    // far in the tail the default contour loses the tiny inverse in roundoff;
    // widening it recovers the value
    let mut res = laplace_invert(f, tau, ctrl.laplace_nodes);
    for scale in [2.0, 4.0, 8.0] {
        if !matches!(res, Err(Error::InversionNoConvergence { .. })) {
            break;
        }
        res = laplace_invert_scaled(f, tau, ctrl.laplace_nodes, scale);
    }
    match res {
        Ok(inv) => Ok(LossDensity {
            value: inv.value.max(0.0),
            asymptotic: false,
        }),
        Err(Error::InversionNoConvergence { .. }) if tau >= 10.0 => Ok(LossDensity {
            value: gaussian_surrogate(params, x, t),
            asymptotic: true,
        }),
        Err(e) => Err(e),
    }
}

/// Regime forms of the loss density: `p(1) erfc(x/sqrt(4τ))` for short
/// windows, and the narrow Gaussian around `τ p(1)` standing in for the
/// long-time point mass.
pub fn loss_pdf_asymptotic(params: &FpParams, x: f64, t: f64, regime: Regime) -> Result<f64> {
    check_time(t)?;
    Ok(match regime {
        Regime::Short => p_full(params) * erfc(x / (4.0 * params.tau(t)).sqrt()),
        Regime::Long => gaussian_surrogate(params, x, t),
    })
}

/// Density of the lost volume given that some loss occurred.
pub fn conditional_loss_pdf(
    params: &FpParams,
    ctrl: &SeriesControl,
    x: f64,
    t: f64,
) -> Result<LossDensity> {
    let d = loss_pdf(params, ctrl, x, t)?;
    if d.asymptotic {
        return Ok(d);
    }
    let pl = p_loss(params, ctrl, t)?;
    if pl <= 0.0 {
        return Err(Error::Undefined("loss probability is zero".into()));
    }
    Ok(LossDensity {
        value: d.value / pl,
        asymptotic: false,
    })
}
