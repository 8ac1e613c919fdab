//! Special functions and overflow-safe hyperbolic ratios.
//!
//! `erfc` and `gamma` are thin wrappers over `libm`. Hyperbolic ratios are
//! written in exponent-shifted form so that arguments beyond ~700 do not
//! overflow: every ratio below divides by `sinh(k)` and is rewritten in
//! terms of `exp(-k)` factors, which only underflow.

use num_complex::Complex64;

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Scaled complementary error function `exp(x^2) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        // erfcx(-y) = 2 exp(y^2) - erfcx(y)
        let y = -x;
        if y > 26.0 {
            return f64::INFINITY;
        }
        return 2.0 * (y * y).exp() - erfcx(y);
    }
    if x < 4.0 {
        return (x * x).exp() * libm::erfc(x);
    }
    // Continued fraction erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let mut frac = x;
    for n in (1..=60).rev() {
        frac = x + (n as f64 / 2.0) / frac;
    }
    1.0 / (frac * std::f64::consts::PI.sqrt())
}

/// `x cosh(x)/sinh(x)`, continuous at `x = 0` where it equals 1.
pub fn x_coth_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-4 {
        return 1.0 + ax * ax / 3.0;
    }
    let e = (-2.0 * ax).exp();
    ax * (1.0 + e) / (-(-2.0 * ax).exp_m1())
}

/// `coth(x)/x - 1/sinh^2(x)`, continuous at `x = 0` where it equals 2/3.
pub fn coth_over_x_minus_csch2(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-3 {
        let x2 = ax * ax;
        return 2.0 / 3.0 - 4.0 * x2 / 45.0 + 4.0 * x2 * x2 / 315.0;
    }
    let e = (-2.0 * ax).exp();
    let one_minus = -(-2.0 * ax).exp_m1();
    let coth = (1.0 + e) / one_minus;
    let csch2 = 4.0 * e / (one_minus * one_minus);
    coth / ax - csch2
}

/// `exp(z) - 1` for complex `z`, accurate near zero.
pub fn expm1_c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        // Horner form of z + z^2/2 + ... + z^6/720
        let mut acc = Complex64::new(1.0 / 720.0, 0.0);
        for d in [120.0, 24.0, 6.0, 2.0, 1.0] {
            acc = acc * z + 1.0 / d;
        }
        acc * z
    } else {
        z.exp() - 1.0
    }
}

/// `cosh(k s) / sinh(k)` for `Re k > 0` and real `|s| <= 1`.
pub fn cosh_ratio(k: Complex64, s: f64) -> Complex64 {
    let den = -expm1_c(-2.0 * k);
    ((k * (s - 1.0)).exp() + (-k * (s + 1.0)).exp()) / den
}

/// `sinh(k s) / sinh(k)` for `Re k > 0` and real `|s| <= 1`.
pub fn sinh_ratio(k: Complex64, s: f64) -> Complex64 {
    let den = -expm1_c(-2.0 * k);
    ((k * (s - 1.0)).exp() - (-k * (s + 1.0)).exp()) / den
}

/// `k coth(k)` for complex `k`, continuous at `k = 0`. Even in `k`, so the
/// square-root branch used to build `k` does not matter.
pub fn k_coth_k(k: Complex64) -> Complex64 {
    let k = if k.re < 0.0 { -k } else { k };
    if k.norm() < 1e-4 {
        return 1.0 + k * k / 3.0;
    }
    let e = (-2.0 * k).exp();
    k * (1.0 + e) / (-expm1_c(-2.0 * k))
}
