//! Discrete bounded random-walk queue.
//!
//! Each slot one packet arrives with probability `p` and one service unit
//! leaves; the queue length is a lazy-at-the-walls random walk on `0..=L`.
//! A packet is lost when it arrives to a full buffer, so losses are counted
//! by consecutive visits to `L`.

mod analytics;
mod kernel;
mod params;
mod path;

pub use analytics::{
    chi_infinity_asymptote, compressibility, correlator_r2, critical_coefficient,
    critical_integrand, loss_variance_exact, mean_loss_rate_asymptote, mean_loss_rate_exact,
    r2_analytic, stationary_distribution, R2Branch,
};
pub use kernel::{build_kernel, BoundarySpectrum, TransitionKernel};
pub use params::DiscreteQueueParams;
pub use path::{simulate_path, DiscretePath, DiscreteWalker};

/// `G_n(to, from)`: probability of length `to` after `n` slots starting from `from`.
pub fn green_function(
    params: DiscreteQueueParams,
    n: u64,
    from: usize,
    to: usize,
) -> crate::Result<f64> {
    build_kernel(params).green_function(n, from, to)
}
