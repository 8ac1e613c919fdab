use serde::{Deserialize, Serialize};

use super::moments::RunningMoments;
use super::series::WindowedSeries;
use super::Estimate;
use crate::error::{invalid, Error, Result};

pub const MIN_WINDOWS: usize = 30;
pub const DEFAULT_BATCHES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanVariance {
    pub mean: Estimate,
    pub variance: Estimate,
    pub windows: usize,
    pub batches: usize,
}

fn require(series: &WindowedSeries, min: usize) -> Result<()> {
    if series.len() < min {
        return Err(Error::InsufficientData(format!(
            "{} windows, need at least {min}",
            series.len()
        )));
    }
    Ok(())
}

/// Contiguous batches of equal size; a remainder at the end is left out.
fn batches(values: &[f64], count: usize) -> impl Iterator<Item = &[f64]> {
    let size = values.len() / count;
    values.chunks_exact(size).take(count)
}

/// Mean and standard error of per-batch statistics.
fn spread(stats: &[f64]) -> (f64, f64) {
    let m: RunningMoments = stats.iter().copied().collect();
    (m.mean(), (m.variance() / stats.len() as f64).sqrt())
}

/// Sample covariance of two per-batch statistics.
fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (n - 1.0)
}

fn default_batches(n: usize) -> usize {
    DEFAULT_BATCHES.min(n / 2)
}

/// Unbiased mean and variance with batch-means errors.
pub fn mean_and_variance(series: &WindowedSeries) -> Result<MeanVariance> {
    require(series, MIN_WINDOWS)?;
    mean_and_variance_with(series, default_batches(series.len()))
}

pub fn mean_and_variance_with(series: &WindowedSeries, batch_count: usize) -> Result<MeanVariance> {
    require(series, MIN_WINDOWS)?;
    if batch_count < 2 || batch_count > series.len() / 2 {
        return Err(invalid(format!(
            "batch count {batch_count} must lie in [2, {}]",
            series.len() / 2
        )));
    }
    let all: RunningMoments = series.values.iter().copied().collect();
    let (means, vars): (Vec<f64>, Vec<f64>) = batches(&series.values, batch_count)
        .map(|b| {
            let m: RunningMoments = b.iter().copied().collect();
            (m.mean(), m.variance())
        })
        .unzip();
    Ok(MeanVariance {
        mean: Estimate {
            value: all.mean(),
            std_error: spread(&means).1,
        },
        variance: Estimate {
            value: all.variance(),
            std_error: spread(&vars).1,
        },
        windows: series.len(),
        batches: batch_count,
    })
}

/// `χ_N = Var / (N · mean rate)` for windows of `n_steps` slots, with the
/// error propagated from the batch (mean, variance) pairs.
pub fn compressibility_estimate(series: &WindowedSeries, n_steps: f64) -> Result<Estimate> {
    require(series, MIN_WINDOWS)?;
    if !(n_steps > 0.0) {
        return Err(invalid("window size must be positive"));
    }
    let mv = mean_and_variance(series)?;
    let mean = mv.mean.value;
    if !(mean > 0.0) {
        return Err(Error::Undefined(
            "compressibility needs a positive mean".into(),
        ));
    }
    let rate = mean / n_steps;
    let chi = mv.variance.value / (n_steps * rate);
    let (ms, vs): (Vec<f64>, Vec<f64>) = batches(&series.values, mv.batches)
        .map(|b| {
            let m: RunningMoments = b.iter().copied().collect();
            (m.mean(), m.variance())
        })
        .unzip();
    let b = mv.batches as f64;
    let var_m = covariance(&ms, &ms);
    let var_v = covariance(&vs, &vs);
    let cov_vm = covariance(&vs, &ms);
    let v = mv.variance.value;
    let se2 = (var_v / (mean * mean) - 2.0 * v * cov_vm / mean.powi(3)
        + v * v * var_m / mean.powi(4))
        / b;
    Ok(Estimate {
        value: chi,
        std_error: se2.max(0.0).sqrt(),
    })
}

/// Fraction of windows with no loss. The error never falls below the
/// binomial one, nor below `1/n` when every window agrees.
pub fn zero_fraction(series: &WindowedSeries) -> Result<Estimate> {
    require(series, MIN_WINDOWS)?;
    let n = series.len() as f64;
    let ind: Vec<f64> = series
        .values
        .iter()
        .map(|&x| if x == 0.0 { 1.0 } else { 0.0 })
        .collect();
    let per: Vec<f64> = batches(&ind, default_batches(ind.len()))
        .map(|b| b.iter().sum::<f64>() / b.len() as f64)
        .collect();
    let f = ind.iter().sum::<f64>() / n;
    let floor = (f * (1.0 - f) / n).sqrt().max(1.0 / n);
    Ok(Estimate {
        value: f,
        std_error: spread(&per).1.max(floor),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPoint {
    /// Separation in windows.
    pub separation: usize,
    pub value: Estimate,
}

struct PairSums {
    per_batch_products: Vec<Vec<f64>>,
    per_batch_squares: Vec<f64>,
    products: Vec<f64>,
    squares: f64,
}

fn pair_sums(series: &WindowedSeries, separations: &[usize]) -> Result<PairSums> {
    require(series, MIN_WINDOWS)?;
    let n = series.len();
    let max_sep = separations.iter().copied().max().unwrap_or(0);
    if separations.is_empty() || max_sep * 10 > n {
        return Err(Error::InsufficientData(format!(
            "largest separation {max_sep} exceeds a tenth of the {n} windows"
        )));
    }
    let mean = series.values.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = series.values.iter().map(|x| x - mean).collect();
    let count = DEFAULT_BATCHES.min(n / (2 * max_sep.max(1)));
    let mut per_batch_products = Vec::with_capacity(count);
    let mut per_batch_squares = Vec::with_capacity(count);
    for b in batches(&d, count) {
        per_batch_squares.push(b.iter().map(|x| x * x).sum::<f64>() / b.len() as f64);
        per_batch_products.push(
            separations
                .iter()
                .map(|&m| b.windows(m + 1).map(|w| w[0] * w[m]).sum::<f64>() / (b.len() - m) as f64)
                .collect(),
        );
    }
    let products = separations
        .iter()
        .map(|&m| d.windows(m + 1).map(|w| w[0] * w[m]).sum::<f64>() / (n - m) as f64)
        .collect();
    let squares = d.iter().map(|x| x * x).sum::<f64>() / n as f64;
    Ok(PairSums {
        per_batch_products,
        per_batch_squares,
        products,
        squares,
    })
}

/// `⟨δx(0) δx(M)⟩` per separation `M` (in windows) with batch errors.
pub fn covariance_estimate(
    series: &WindowedSeries,
    separations: &[usize],
) -> Result<Vec<CorrelationPoint>> {
    let s = pair_sums(series, separations)?;
    Ok(separations
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let per: Vec<f64> = s.per_batch_products.iter().map(|p| p[j]).collect();
            CorrelationPoint {
                separation: m,
                value: Estimate {
                    value: s.products[j],
                    std_error: spread(&per).1,
                },
            }
        })
        .collect())
}

/// `⟨δx(0) δx(M)⟩ / ⟨δx²⟩` per separation, errors from the ratio's delta
/// method over batches.
pub fn correlation_estimate(
    series: &WindowedSeries,
    separations: &[usize],
) -> Result<Vec<CorrelationPoint>> {
    let s = pair_sums(series, separations)?;
    if !(s.squares > 0.0) {
        return Err(Error::Undefined("correlation of a constant series".into()));
    }
    let b = s.per_batch_squares.len() as f64;
    let var_s = covariance(&s.per_batch_squares, &s.per_batch_squares);
    Ok(separations
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let per: Vec<f64> = s.per_batch_products.iter().map(|p| p[j]).collect();
            let c = s.products[j];
            let q = s.squares;
            let var_c = covariance(&per, &per);
            let cov = covariance(&per, &s.per_batch_squares);
            let se2 = (var_c / (q * q) - 2.0 * c * cov / q.powi(3) + c * c * var_s / q.powi(4)) / b;
            CorrelationPoint {
                separation: m,
                value: Estimate {
                    value: c / q,
                    std_error: se2.max(0.0).sqrt(),
                },
            }
        })
        .collect())
}
