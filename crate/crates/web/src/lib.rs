//! Browser bindings for the demo page in `www/`.
//!
//! Curves come back as flat `Float64Array`s of interleaved `(x, y)` pairs.

use qloss::discrete::{DiscreteQueueParams, TransitionKernel};
use qloss::fokker_planck::{
    conditional_loss_pdf, loss_moment, p_full, p_loss, stationary_density, transition_density,
    FpParams, SeriesControl,
};
use wasm_bindgen::prelude::*;

fn js(e: qloss::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `χ_N` on `points` log-spaced windows in `[n_min, n_max]`.
pub fn chi_curve_values(
    p: f64,
    capacity: usize,
    n_min: f64,
    n_max: f64,
    points: usize,
) -> qloss::Result<Vec<f64>> {
    if !(n_min >= 1.0 && n_max > n_min) || points < 2 {
        return Err(qloss::Error::InvalidParameter(
            "need 1 <= n_min < n_max and points >= 2".into(),
        ));
    }
    let kernel = TransitionKernel::new(DiscreteQueueParams::new(p, capacity)?);
    let ratio = (n_max / n_min).ln() / (points - 1) as f64;
    let mut out = Vec::with_capacity(2 * points);
    let mut last = 0;
    for k in 0..points {
        let n = (n_min * (ratio * k as f64).exp()).round().max(1.0) as u64;
        if n == last {
            continue;
        }
        last = n;
        out.push(n as f64);
        out.push(kernel.compressibility(n)?);
    }
    Ok(out)
}

/// `(ℓ, w(ℓ, τ; start), p(ℓ))` triples on a uniform grid.
pub fn density_profile_values(
    v: f64,
    tau: f64,
    start: f64,
    points: usize,
) -> qloss::Result<Vec<f64>> {
    let params = FpParams::from_v(v, 2.0)?;
    let ctrl = SeriesControl::default();
    let points = points.max(2);
    let mut out = Vec::with_capacity(3 * points);
    for k in 0..points {
        let x = k as f64 / (points - 1) as f64;
        out.push(x);
        out.push(transition_density(&params, &ctrl, x, tau, start)?.value);
        out.push(stationary_density(&params, x));
    }
    Ok(out)
}

/// `[p_loss, mean, variance, x_0, f_0, x_1, f_1, ...]` where `f` is the
/// lost-volume density given at least one loss in a window of length `τ`.
pub fn loss_distribution_values(v: f64, tau: f64, points: usize) -> qloss::Result<Vec<f64>> {
    let params = FpParams::from_v(v, 2.0)?;
    let ctrl = SeriesControl::default();
    let pl = p_loss(&params, &ctrl, tau)?;
    let m1 = loss_moment(&params, &ctrl, 1, tau)?.value;
    let m2 = loss_moment(&params, &ctrl, 2, tau)?.value;
    let var = m2 - m1 * m1;
    let hi = 2.0 * p_full(&params) * tau + 6.0 * var.max(0.0).sqrt() + 1e-3;
    let points = points.max(2);
    let mut out = vec![pl, m1, var];
    for k in 0..points {
        let x = hi * k as f64 / (points - 1) as f64;
        out.push(x);
        out.push(conditional_loss_pdf(&params, &ctrl, x, tau)?.value);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn chi_curve(
    p: f64,
    capacity: usize,
    n_min: f64,
    n_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    chi_curve_values(p, capacity, n_min, n_max, points).map_err(js)
}

#[wasm_bindgen]
pub fn density_profile(v: f64, tau: f64, start: f64, points: usize) -> Result<Vec<f64>, JsError> {
    density_profile_values(v, tau, start, points).map_err(js)
}

#[wasm_bindgen]
pub fn loss_distribution(v: f64, tau: f64, points: usize) -> Result<Vec<f64>, JsError> {
    loss_distribution_values(v, tau, points).map_err(js)
}
