//! Estimators with batch-means error bars for windowed loss series.
//!
//! Loss windows are correlated, strongly so near criticality, so every
//! standard error is computed from the spread of the statistic over
//! contiguous batches rather than from an i.i.d. formula.

mod estimators;
mod moments;
mod series;

pub use estimators::{
    compressibility_estimate, correlation_estimate, covariance_estimate, mean_and_variance,
    mean_and_variance_with, zero_fraction, CorrelationPoint, MeanVariance, DEFAULT_BATCHES,
    MIN_WINDOWS,
};
pub use moments::RunningMoments;
pub use series::{OverlapPolicy, WindowedSeries};

use serde::{Deserialize, Serialize};

/// A value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Distance to `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error > 0.0 {
            (self.value - target) / self.std_error
        } else if self.value == target {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn agrees_with(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target).abs() <= sigmas
    }
}
