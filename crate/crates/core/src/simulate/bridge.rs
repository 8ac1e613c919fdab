//! Compare window-loss statistics of a packet simulation with the diffusion
//! predictions at the fitted drift and diffusion.

use serde::{Deserialize, Serialize};

use super::engine::run_with;
use super::estimate::{DriftDiffusion, DriftDiffusionEstimator};
use super::traffic::TrafficModel;
use super::windows::{default_warmup, LossSample, WindowCollector, WindowSpec};
use crate::error::{invalid, Result};
use crate::fokker_planck::{loss_correlator, loss_moment, p_loss, FpParams, SeriesControl};
use crate::stats::{correlation_estimate, mean_and_variance, zero_fraction, Estimate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeConfig {
    pub traffic: TrafficModel,
    pub duration: f64,
    pub seed: u64,
    /// Coarse-graining step for the drift and diffusion fit.
    pub dt: f64,
    /// Window lengths; windows of each length are laid back to back.
    pub windows: Vec<f64>,
    /// Separation, in windows, of the correlation point.
    pub separation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub simulated: Estimate,
    pub predicted: f64,
}

impl Comparison {
    pub fn z_score(&self) -> f64 {
        self.simulated.z_score(self.predicted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowComparison {
    pub window: f64,
    pub tau: f64,
    pub windows: usize,
    pub mean: Comparison,
    pub variance: Comparison,
    pub zero_loss: Comparison,
    pub correlation: Comparison,
}

impl WindowComparison {
    pub fn max_abs_z(&self) -> f64 {
        [self.mean, self.variance, self.zero_loss, self.correlation]
            .iter()
            .map(|c| c.z_score().abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub fit: DriftDiffusion,
    pub params: FpParams,
    pub warmup: f64,
    pub conservation_residual: f64,
    pub rows: Vec<WindowComparison>,
}

/// Run the simulation once, fit `(a, σ²)`, and compare each window length.
pub fn bridge(cfg: &BridgeConfig, ctrl: &SeriesControl) -> Result<BridgeReport> {
    if cfg.windows.is_empty() {
        return Err(invalid("no window lengths given"));
    }
    if cfg.separation == 0 {
        return Err(invalid(
            "correlation separation must be at least one window",
        ));
    }
    let (_, sigma2) = cfg.traffic.drift_diffusion();
    let warmup = default_warmup(sigma2);
    let mut est = DriftDiffusionEstimator::new(cfg.dt, cfg.traffic.r_out, 0.0)?;
    let mut collectors = cfg
        .windows
        .iter()
        .map(|&t| {
            WindowCollector::new(WindowSpec {
                length: t,
                spacing: t,
                warmup,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = run_with(cfg.traffic, cfg.duration, cfg.seed, |s| {
        est.observe(s);
        for c in collectors.iter_mut() {
            c.observe(s);
        }
    })?;
    let fit = est.finish()?;
    let params = FpParams::new(fit.a.value, fit.sigma2.value)?;
    let samples: Vec<LossSample> = collectors
        .into_iter()
        .map(|c| c.finish(cfg.duration))
        .collect();
    let mut rows = Vec::with_capacity(samples.len());
    for (sample, &t) in samples.iter().zip(&cfg.windows) {
        let series = sample.series()?;
        let mv = mean_and_variance(&series)?;
        let zero = zero_fraction(&series)?;
        let corr = correlation_estimate(&series, &[cfg.separation])?[0];
        let m1 = loss_moment(&params, ctrl, 1, t)?.value;
        let m2 = loss_moment(&params, ctrl, 2, t)?.value;
        let var = m2 - m1 * m1;
        let gap = (cfg.separation - 1) as f64 * t;
        let cov = if gap > 0.0 {
            loss_correlator(&params, ctrl, t, t, gap)?
        } else {
            loss_correlator(&params, ctrl, t, t, 1e-9 * t)?
        };
        rows.push(WindowComparison {
            window: t,
            tau: params.tau(t),
            windows: series.len(),
            mean: Comparison {
                simulated: mv.mean,
                predicted: m1,
            },
            variance: Comparison {
                simulated: mv.variance,
                predicted: var,
            },
            zero_loss: Comparison {
                simulated: zero,
                predicted: 1.0 - p_loss(&params, ctrl, t)?,
            },
            correlation: Comparison {
                simulated: corr.value,
                predicted: cov / var,
            },
        });
    }
    Ok(BridgeReport {
        fit,
        params,
        warmup,
        conservation_residual: summary.conservation_residual(),
        rows,
    })
}
