use num_complex::Complex64;

use super::params::FpParams;
use crate::error::{invalid, Result};
use crate::numerics::special::{cosh_ratio, k_coth_k, sinh_ratio};

/// Laplace transform over `τ` of the transition density, for complex `ε`
/// off the cut `(-∞, -v²]`.
///
/// ```text
/// W = e^{v(x-y)}/(2κ) [ (2v²/ε + 1) C(x+y-1) + (2κv/ε) S(x+y-1) + C(|x-y|-1) ]
/// ```
///
/// with `κ = sqrt(ε + v²)`, `C(s) = cosh(κs)/sinh κ`, `S(s) = sinh(κs)/sinh κ`.
pub fn laplace_propagator_complex(v: f64, ell_to: f64, eps: Complex64, ell_from: f64) -> Complex64 {
    let kappa = (eps + v * v).sqrt();
    let s1 = ell_to + ell_from - 1.0;
    let s2 = (ell_to - ell_from).abs() - 1.0;
    let bracket = (2.0 * v * v / eps + 1.0) * cosh_ratio(kappa, s1)
        + 2.0 * kappa * v / eps * sinh_ratio(kappa, s1)
        + cosh_ratio(kappa, s2);
    (v * (ell_to - ell_from)).exp() * bracket / (2.0 * kappa)
}

/// `W(ℓ', ε; ℓ)` on the positive real axis.
pub fn laplace_propagator(params: &FpParams, ell_to: f64, eps: f64, ell_from: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    for (name, x) in [("ell_to", ell_to), ("ell_from", ell_from)] {
        if !(0.0..=1.0).contains(&x) {
            return Err(invalid(format!("{name} must lie in [0, 1], got {x}")));
        }
    }
    Ok(laplace_propagator_complex(params.v(), ell_to, Complex64::new(eps, 0.0), ell_from).re)
}

/// Return transform at the full-buffer wall, `(κ coth κ + v)/ε`.
pub fn return_transform_full(v: f64, eps: Complex64) -> Complex64 {
    (k_coth_k((eps + v * v).sqrt()) + v) / eps
}

/// Return transform at the empty-buffer wall, `(κ coth κ - v)/ε`.
pub fn return_transform_empty(v: f64, eps: Complex64) -> Complex64 {
    return_transform_full(-v, eps)
}
