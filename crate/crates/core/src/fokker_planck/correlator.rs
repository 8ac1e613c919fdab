//! Covariance of the volumes lost in two windows of lengths `t1` and `t2`
//! separated by a gap `T` (end of the first to start of the second).
//!
//! The double time integral of `w(1, s₂ - s₁; 1) - p(1)` over the two windows
//! depends only on the difference `z = s₂ - s₁ - T`, which leaves a single
//! integral against the trapezoid `h(z) = min(z, t1 + t2 - z, t1, t2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::params::{FpParams, SeriesControl};
use super::series::relaxing_part_tau;
use super::stationary::p_full;
use crate::error::{invalid, Result};
use crate::numerics::{CompensatedSum, Quadrature};

fn check(t1: f64, t2: f64, gap: f64) -> Result<()> {
    for (name, x) in [("t1", t1), ("t2", t2), ("T", gap)] {
        if !(x > 0.0) || !x.is_finite() {
            return Err(invalid(format!("{name} must be positive, got {x}")));
        }
    }
    Ok(())
}

fn trapezoid(z: f64, a: f64, b: f64) -> f64 {
    z.min(a + b - z).min(a).min(b).max(0.0)
}

/// `w(1, s; 1) - p(1)` in `τ` units, falling back to the free half-line
/// form below the series floor.
fn return_excess(v: f64, p1: f64, s: f64, ctrl: &SeriesControl) -> f64 {
    if s < ctrl.tau_floor {
        return 1.0 / (PI * s).sqrt() + v - p1;
    }
    relaxing_part_tau(v, 1.0, s, 1.0, ctrl.terms_for(s)).value
}

/// Loss covariance by quadrature over the window offsets.
pub fn loss_correlator(
    params: &FpParams,
    ctrl: &SeriesControl,
    t1: f64,
    t2: f64,
    gap: f64,
) -> Result<f64> {
    check(t1, t2, gap)?;
    ctrl.validate()?;
    let v = params.v();
    let p1 = p_full(params);
    let (a, b, g) = (params.tau(t1), params.tau(t2), params.tau(gap));
    let lo = a.min(b);
    let hi = a.max(b);
    // the integrand is positive, so a relative tolerance is meaningful even
    // when the covariance has decayed to nothing
    let quad = Quadrature {
        abs_tol: 0.0,
        rel_tol: ctrl.tol,
        ..Quadrature::default()
    };
    let f = |z: f64| trapezoid(z, a, b) * return_excess(v, p1, g + z, ctrl);
    let mut total = CompensatedSum::new();
    for (l, r) in [(0.0, lo), (lo, hi), (hi, a + b)] {
        if r > l {
            total.add(
                quad.integrate(f, crate::numerics::Domain::Finite(l, r))?
                    .value,
            );
        }
    }
    Ok(p1 * total.value())
}

/// Same covariance summed mode by mode; each mode integrates in closed form.
pub fn loss_correlator_series(
    params: &FpParams,
    t1: f64,
    t2: f64,
    gap: f64,
    modes: usize,
) -> Result<f64> {
    check(t1, t2, gap)?;
    let v = params.v();
    let (a, b, g) = (params.tau(t1), params.tau(t2), params.tau(gap));
    let mut acc = CompensatedSum::new();
    for n in 1..=modes {
        let k2 = (n as f64 * PI).powi(2);
        let lam = k2 + v * v;
        let term =
            2.0 * k2 / lam * (-lam * g).exp() * (-(-lam * a).exp_m1()) * (-(-lam * b).exp_m1())
                / (lam * lam);
        acc.add(term);
        if term < 1e-18 * acc.value().abs() {
            break;
        }
    }
    Ok(p_full(params) * acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelatorRegime {
    /// Gap much longer than the relaxation time `2/σ²`.
    LongGap,
    /// `2/σ² ≫ T ≫ t1, t2`.
    Intermediate,
}

pub fn loss_correlator_asymptotic(
    params: &FpParams,
    t1: f64,
    t2: f64,
    gap: f64,
    regime: CorrelatorRegime,
) -> Result<f64> {
    check(t1, t2, gap)?;
    Ok(match regime {
        CorrelatorRegime::LongGap => 0.0,
        CorrelatorRegime::Intermediate => {
            let p1 = p_full(params);
            let m1 = p1 * params.tau(t1);
            let m2 = p1 * params.tau(t2);
            m1 * m2 / p1 * (2.0 / (PI * params.sigma2() * gap)).sqrt()
        }
    })
}
