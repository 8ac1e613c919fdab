//! Eigenfunction expansion of the transition density on `[0, 1]` with
//! zero-flux walls.
//!
//! In `τ = σ²t/2` the equation is `∂_τ w = ∂²w - 2v ∂w`. With
//! `w = e^{v(x-y)} u` the problem becomes self-adjoint with eigenvalues
//! `λ_n = π²n² + v²` and eigenfunctions `u_n(x) = nπ cos(nπx) + v sin(nπx)`,
//! `‖u_n‖² = λ_n/2`. The zero mode is the stationary density, so
//!
//! ```text
//! w(x, τ; y) = p(x) + 2 e^{v(x-y)} Σ_{n≥1} e^{-λ_n τ} u_n(x) u_n(y) / λ_n
//! ```
//!
//! Each term carries zero flux, and so does `p`. The probability current
//! telescopes to `J = σ² e^{v(x-y)} Σ e^{-λ_n τ} sin(nπx) u_n(y)`.

use std::f64::consts::PI;

use super::params::{FpParams, SeriesControl};
use super::stationary::stationary_density_v;
use crate::error::{invalid, Error, Result};
use crate::numerics::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Upper bound on the discarded tail.
    pub truncation_bound: f64,
    pub terms: usize,
}

fn check_position(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

fn prepare(ctrl: &SeriesControl, tau: f64) -> Result<usize> {
    ctrl.validate()?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid(format!("time must be positive, got tau = {tau}")));
    }
    if tau < ctrl.tau_floor {
        return Err(Error::InsufficientTruncation {
            tau,
            floor: ctrl.tau_floor,
        });
    }
    Ok(ctrl.terms_for(tau))
}

/// Density in `τ` units; `x` is the end point, `y` the start.
pub(crate) fn density_tau(v: f64, x: f64, tau: f64, y: f64, terms: usize) -> SeriesValue {
    let relaxing = relaxing_part_tau(v, x, tau, y, terms);
    SeriesValue {
        value: stationary_density_v(v, x) + relaxing.value,
        ..relaxing
    }
}

/// `w - p(x)`, the part of the density that decays in time.
pub(crate) fn relaxing_part_tau(v: f64, x: f64, tau: f64, y: f64, terms: usize) -> SeriesValue {
    let pref_exp = v * (x - y) - v * v * tau;
    let mut acc = CompensatedSum::new();
    for n in 1..=terms {
        let k = n as f64 * PI;
        let lambda_k = k * k;
        let decay = (-lambda_k * tau).exp();
        if decay == 0.0 {
            break;
        }
        let (sx, cx) = (k * x).sin_cos();
        let (sy, cy) = (k * y).sin_cos();
        let ux = k * cx + v * sx;
        let uy = k * cy + v * sy;
        acc.add(decay * ux * uy / (lambda_k + v * v));
    }
    let value = 2.0 * pref_exp.exp() * acc.value();
    // |u_n(x) u_n(y)| / λ_n <= 2
    let kk = (terms + 1) as f64 * PI;
    let ratio = (-PI * PI * (2 * terms + 3) as f64 * tau).exp();
    let truncation_bound = 4.0 * pref_exp.exp() * (-kk * kk * tau).exp() / (1.0 - ratio);
    SeriesValue {
        value,
        truncation_bound,
        terms,
    }
}

/// `∂_τ`-flux `2v w - ∂_x w` in `τ` units (multiply by `σ²/2` for `J`).
pub(crate) fn flux_tau(v: f64, x: f64, tau: f64, y: f64, terms: usize) -> SeriesValue {
    let pref_exp = v * (x - y) - v * v * tau;
    let mut acc = CompensatedSum::new();
    for n in 1..=terms {
        let k = n as f64 * PI;
        let decay = (-k * k * tau).exp();
        if decay == 0.0 {
            break;
        }
        let (sy, cy) = (k * y).sin_cos();
        acc.add(decay * (k * x).sin() * (k * cy + v * sy));
    }
    let value = 2.0 * pref_exp.exp() * acc.value();
    let n1 = (terms + 1) as f64;
    let first = 2.0 * pref_exp.exp() * (-(n1 * PI).powi(2) * tau).exp() * (n1 * PI + v.abs());
    let ratio = ((n1 + 1.0) * PI + v.abs()) / (n1 * PI + v.abs())
        * (-PI * PI * (2.0 * n1 + 1.0) * tau).exp();
    let truncation_bound = if ratio < 1.0 {
        first / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    SeriesValue {
        value,
        truncation_bound,
        terms,
    }
}

/// Transition density `w(ℓ', t; ℓ)` of reaching `ell_to` at time `t` from `ell_from`.
pub fn transition_density(
    params: &FpParams,
    ctrl: &SeriesControl,
    ell_to: f64,
    t: f64,
    ell_from: f64,
) -> Result<SeriesValue> {
    check_position("ell_to", ell_to)?;
    check_position("ell_from", ell_from)?;
    let tau = params.tau(t);
    let terms = prepare(ctrl, tau)?;
    Ok(density_tau(params.v(), ell_to, tau, ell_from, terms))
}

/// Probability current `J = a w - (σ²/2) ∂_{ℓ'} w`, differentiated term by term.
pub fn probability_current(
    params: &FpParams,
    ctrl: &SeriesControl,
    ell_to: f64,
    t: f64,
    ell_from: f64,
) -> Result<SeriesValue> {
    check_position("ell_to", ell_to)?;
    check_position("ell_from", ell_from)?;
    let tau = params.tau(t);
    let terms = prepare(ctrl, tau)?;
    let f = flux_tau(params.v(), ell_to, tau, ell_from, terms);
    let half = 0.5 * params.sigma2();
    Ok(SeriesValue {
        value: half * f.value,
        truncation_bound: half * f.truncation_bound,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fokker_planck::stationary_density;
    use crate::numerics::{integrate, Domain};

    fn ctrl() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn probability_is_conserved() {
        for &v in &[-5.0, -1.0, 0.0, 0.7, 5.0] {
            let p = FpParams::from_v(v, 2.0).unwrap();
            for &t in &[1e-3, 0.05, 1.0, 10.0] {
                for &y in &[0.0, 0.3, 1.0] {
                    let r = integrate(
                        |x| transition_density(&p, &ctrl(), x, t, y).unwrap().value,
                        Domain::Finite(0.0, 1.0),
                        1e-12,
                    )
                    .unwrap();
                    assert!(
                        (r.value - 1.0).abs() < 1e-9,
                        "v={v} t={t} y={y}: {}",
                        r.value
                    );
                }
            }
        }
    }

    #[test]
    fn relaxes_to_stationary_density() {
        let p = FpParams::from_v(1.0, 2.0).unwrap();
        for &x in &[0.0, 0.4, 1.0] {
            let w = transition_density(&p, &ctrl(), x, 50.0, 0.2).unwrap().value;
            assert!((w - stationary_density(&p, x)).abs() < 1e-12);
        }
        let flat = FpParams::from_v(0.0, 2.0).unwrap();
        let w = transition_density(&flat, &ctrl(), 0.9, 30.0, 0.1)
            .unwrap()
            .value;
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_flux_at_walls() {
        for &v in &[-3.0, 0.0, 2.0] {
            let p = FpParams::from_v(v, 1.0).unwrap();
            for &t in &[2e-3, 0.1, 3.0] {
                for &x in &[0.0, 1.0] {
                    let j = probability_current(&p, &ctrl(), x, t, 0.6).unwrap();
                    assert!(j.value.abs() < 1e-9, "v={v} t={t} x={x}: {}", j.value);
                }
            }
        }
    }

    #[test]
    fn current_matches_finite_difference() {
        let p = FpParams::new(0.4, 0.8).unwrap();
        let (t, y, x, h) = (0.3, 0.35, 0.55, 1e-5);
        let w = |x: f64| transition_density(&p, &ctrl(), x, t, y).unwrap().value;
        let dw = (w(x + h) - w(x - h)) / (2.0 * h);
        let j = p.a() * w(x) - 0.5 * p.sigma2() * dw;
        let js = probability_current(&p, &ctrl(), x, t, y).unwrap().value;
        assert!((j - js).abs() < 1e-7, "{j} vs {js}");
    }

    #[test]
    fn symmetric_current_antisymmetric() {
        let p = FpParams::from_v(0.0, 1.5).unwrap();
        for &x in &[0.1, 0.25, 0.4] {
            let a = probability_current(&p, &ctrl(), x, 0.2, 0.5).unwrap().value;
            let b = probability_current(&p, &ctrl(), 1.0 - x, 0.2, 0.5)
                .unwrap()
                .value;
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_bound_shrinks_with_order() {
        let p = FpParams::from_v(0.5, 2.0).unwrap();
        let mut prev = f64::INFINITY;
        for k in [2, 4, 8, 16] {
            let c = SeriesControl {
                k_max: Some(k),
                ..ctrl()
            };
            let r = transition_density(&p, &c, 0.9, 0.01, 0.8).unwrap();
            assert!(r.truncation_bound <= prev);
            prev = r.truncation_bound;
        }
        let exact = transition_density(&p, &ctrl(), 0.9, 0.01, 0.8)
            .unwrap()
            .value;
        let c = SeriesControl {
            k_max: Some(6),
            ..ctrl()
        };
        let r = transition_density(&p, &c, 0.9, 0.01, 0.8).unwrap();
        assert!((r.value - exact).abs() <= r.truncation_bound);
    }

    #[test]
    fn errors() {
        let p = FpParams::from_v(0.5, 2.0).unwrap();
        assert!(matches!(
            transition_density(&p, &ctrl(), 0.5, 1e-12, 0.5),
            Err(Error::InsufficientTruncation { .. })
        ));
        assert!(transition_density(&p, &ctrl(), 1.2, 1.0, 0.5).is_err());
        assert!(transition_density(&p, &ctrl(), 0.5, 0.0, 0.5).is_err());
    }
}
