use serde::{Deserialize, Serialize};

use super::engine::{EventLog, Step};
use crate::error::{invalid, Error, Result};
use crate::stats::{Estimate, RunningMoments};

/// Levels bounding the interior band used for increment samples.
pub const INTERIOR: (f64, f64) = (0.1, 0.9);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftDiffusion {
    pub a: Estimate,
    pub sigma2: Estimate,
    pub dt: f64,
    pub samples: u64,
}

/// Streaming estimator of the free-level drift and diffusion.
///
/// Time is cut into intervals of length `dt`. An interval is sampled when the
/// level at its start lies in the interior band. Its increment is the offered
/// volume minus `r_out dt`, which is the level change the buffer would see
/// without walls.
#[derive(Debug, Clone)]
pub struct DriftDiffusionEstimator {
    dt: f64,
    r_out: f64,
    next_edge: f64,
    last_time: f64,
    last_level: f64,
    current_interior: bool,
    offered: f64,
    moments: RunningMoments,
}

impl DriftDiffusionEstimator {
    pub fn new(dt: f64, r_out: f64, initial_level: f64) -> Result<Self> {
        if !(dt > 0.0) || !(r_out > 0.0) {
            return Err(invalid("dt and r_out must be positive"));
        }
        Ok(Self {
            dt,
            r_out,
            next_edge: dt,
            last_time: 0.0,
            last_level: initial_level,
            current_interior: in_band(initial_level),
            offered: 0.0,
            moments: RunningMoments::new(),
        })
    }

    pub fn observe(&mut self, s: &Step) {
        while self.next_edge <= s.time {
            if self.current_interior {
                self.moments.push(self.offered - self.r_out * self.dt);
            }
            let level = (self.last_level - self.r_out * (self.next_edge - self.last_time)).max(0.0);
            self.current_interior = in_band(level);
            self.offered = 0.0;
            self.next_edge += self.dt;
        }
        self.offered += s.offered();
        self.last_time = s.time;
        self.last_level = s.level_after;
    }

    pub fn finish(&self) -> Result<DriftDiffusion> {
        let n = self.moments.count();
        if n < 30 {
            return Err(Error::InsufficientData(format!(
                "{n} interior increments, need at least 30"
            )));
        }
        let nf = n as f64;
        let var = self.moments.variance();
        let kurt_term = (self.moments.central_moment4() - var * var).max(0.0);
        Ok(DriftDiffusion {
            a: Estimate {
                value: self.moments.mean() / self.dt,
                std_error: (var / nf).sqrt() / self.dt,
            },
            sigma2: Estimate {
                value: var / self.dt,
                std_error: (kurt_term / nf).sqrt() / self.dt,
            },
            dt: self.dt,
            samples: n,
        })
    }
}

fn in_band(level: f64) -> bool {
    (INTERIOR.0..=INTERIOR.1).contains(&level)
}

/// Drift and diffusion of the free level from a stored run. `dt` must be at
/// least 20 mean interarrival times.
pub fn estimate_drift_diffusion(log: &EventLog, dt: f64) -> Result<DriftDiffusion> {
    let traffic = &log.summary.traffic;
    if dt < 20.0 * traffic.interarrival.mean() {
        return Err(invalid(format!(
            "dt = {dt} is shorter than 20 mean interarrival times ({})",
            20.0 * traffic.interarrival.mean()
        )));
    }
    let mut est = DriftDiffusionEstimator::new(dt, traffic.r_out, log.summary.initial_level)?;
    for s in &log.steps {
        est.observe(s);
    }
    est.finish()
}
