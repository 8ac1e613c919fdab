//! Buffer with only the overflow wall: `ℓ ∈ (-∞, 1]`, reflecting at 1.

use std::f64::consts::PI;

use super::params::FpParams;
use crate::error::{invalid, Result};
use crate::numerics::special::{erfc, erfcx};
use crate::numerics::{integrate, Domain};

/// Half-line density in `τ` units.
pub(crate) fn halfline_density_tau(v: f64, x: f64, tau: f64, y: f64) -> f64 {
    let four_tau = 4.0 * tau;
    let base = v * (x - y) - v * v * tau;
    let direct = (base - (x - y).powi(2) / four_tau).exp();
    let image = (base - (2.0 - x - y).powi(2) / four_tau).exp();
    let gauss = (direct + image) / (PI * four_tau).sqrt();
    let z = (2.0 - x - y - 2.0 * v * tau) / four_tau.sqrt();
    let wall = -2.0 * v * (1.0 - x);
    let corr = if z > 0.0 {
        v * (wall - z * z).exp() * erfcx(z)
    } else {
        v * wall.exp() * erfc(z)
    };
    gauss + corr
}

/// `w₀(ℓ', t; ℓ)` for the buffer with the empty wall sent to `-∞`.
pub fn halfline_density(params: &FpParams, ell_to: f64, t: f64, ell_from: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("time must be positive, got {t}")));
    }
    if !(ell_to <= 1.0) || !(ell_from <= 1.0) {
        return Err(invalid("positions must not exceed the buffer size 1"));
    }
    Ok(halfline_density_tau(
        params.v(),
        ell_to,
        params.tau(t),
        ell_from,
    ))
}

/// `(1/t) ∫dℓ ∫dℓ' (ℓ' - ℓ - at) w₀(ℓ', t; ℓ)` by nested quadrature, returned
/// as a magnitude. Tends to the loss rate coefficient as `t -> 0`.
pub fn loss_rate_from_halfline(params: &FpParams, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("time must be positive, got {t}")));
    }
    let tau = params.tau(t);
    let v = params.v();
    let drift = 2.0 * v * tau;
    let width = 14.0 * (2.0 * tau).sqrt() + drift.abs();
    let tol = 1e-9 * t;
    let inner = |y: f64| -> Result<f64> {
        let r = integrate(
            |x| (x - y - drift) * halfline_density_tau(v, x, tau, y),
            Domain::Finite(y - width, 1.0),
            tol,
        )?;
        Ok(r.value)
    };
    let mut err = None;
    let outer = integrate(
        |y| match inner(y) {
            Ok(val) => val,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        Domain::Finite(1.0 - width, 1.0),
        tol,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(outer.value.abs() / t)
}
