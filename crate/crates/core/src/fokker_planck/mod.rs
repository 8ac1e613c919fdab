//! Diffusion approximation of the buffer level on `[0, 1]`.
//!
//! The level `ℓ` (in buffer units) drifts at rate `a` and diffuses with
//! `σ²`; both walls reflect. Traffic pushed against `ℓ = 1` is lost. The
//! natural clock is `τ = σ²t/2` and the shape parameter is `v = a/σ²`.

mod correlator;
mod halfline;
mod laplace_domain;
mod losses;
mod params;
mod series;
mod stationary;

pub use correlator::{
    loss_correlator, loss_correlator_asymptotic, loss_correlator_series, CorrelatorRegime,
};
pub use halfline::{halfline_density, loss_rate_from_halfline};
pub use laplace_domain::{
    laplace_propagator, laplace_propagator_complex, return_transform_empty, return_transform_full,
};
pub use losses::{
    conditional_loss_pdf, loss_moment, loss_moment_asymptotic, loss_pdf, loss_pdf_asymptotic,
    loss_variance_longtime, p_loss, p_loss_asymptotic, LossDensity, LossMoments, Regime,
};
pub use params::{FpParams, SeriesControl, K_MAX_CAP};
pub use series::{probability_current, transition_density, SeriesValue};
pub use stationary::{loss_rate_coefficient, p_full, stationary_density};
