use serde::{Deserialize, Serialize};

use super::engine::{EventLog, Step};
use crate::error::{invalid, Result};
use crate::stats::{OverlapPolicy, WindowedSeries};

/// Placement of loss windows: window `k` covers
/// `[warmup + k spacing, warmup + k spacing + length)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub length: f64,
    pub spacing: f64,
    pub warmup: f64,
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !(self.spacing > 0.0) || !(self.warmup >= 0.0) {
            return Err(invalid(format!("invalid window spec {self:?}")));
        }
        Ok(())
    }

    pub fn start(&self, k: usize) -> f64 {
        self.warmup + k as f64 * self.spacing
    }
}

/// Warm-up before the first window: ten relaxation times `2/σ²`.
pub fn default_warmup(sigma2: f64) -> f64 {
    if sigma2 > 0.0 {
        20.0 / sigma2
    } else {
        0.0
    }
}

/// Volume lost (and server idle time) per window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossSample {
    pub spec: WindowSpec,
    pub lost: Vec<f64>,
    pub idle: Vec<f64>,
}

impl LossSample {
    pub fn len(&self) -> usize {
        self.lost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lost.is_empty()
    }

    pub fn series(&self) -> Result<WindowedSeries> {
        let overlap = if self.spec.spacing < self.spec.length {
            OverlapPolicy::Overlapping
        } else {
            OverlapPolicy::Disjoint
        };
        WindowedSeries::new(self.lost.clone(), self.spec.length, overlap)
    }

    /// CSV with columns `window_index,t_start,lost_volume,idle_time`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["window_index", "t_start", "lost_volume", "idle_time"])?;
        for (k, (l, i)) in self.lost.iter().zip(&self.idle).enumerate() {
            w.write_record([
                k.to_string(),
                self.spec.start(k).to_string(),
                l.to_string(),
                i.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Streaming window accumulator fed step by step.
#[derive(Debug, Clone)]
pub struct WindowCollector {
    spec: WindowSpec,
    lost: Vec<f64>,
    idle: Vec<f64>,
    last_time: f64,
}

impl WindowCollector {
    pub fn new(spec: WindowSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec,
            lost: Vec::new(),
            idle: Vec::new(),
            last_time: 0.0,
        })
    }

    /// Indices of windows containing time `t`.
    fn covering(&self, t: f64) -> std::ops::Range<usize> {
        let rel = t - self.spec.warmup;
        if rel < 0.0 {
            return 0..0;
        }
        let hi = (rel / self.spec.spacing).floor() as usize;
        let lo = ((rel - self.spec.length) / self.spec.spacing).floor();
        let lo = if lo < 0.0 { 0 } else { lo as usize + 1 };
        lo..hi + 1
    }

    fn grow(&mut self, k: usize) {
        if self.lost.len() <= k {
            self.lost.resize(k + 1, 0.0);
            self.idle.resize(k + 1, 0.0);
        }
    }

    pub fn observe(&mut self, s: &Step) {
        if s.idle > 0.0 {
            // the server is idle at the end of the drain stretch
            let b = s.time;
            let a = b - s.idle;
            let first = self.covering(a.max(self.spec.warmup)).start;
            let last = self.covering(b).end;
            for k in first..last {
                let ws = self.spec.start(k);
                let overlap = b.min(ws + self.spec.length) - a.max(ws);
                if overlap > 0.0 {
                    self.grow(k);
                    self.idle[k] += overlap;
                }
            }
        }
        let dropped = s.dropped();
        if dropped > 0.0 {
            for k in self.covering(s.time) {
                self.grow(k);
                self.lost[k] += dropped;
            }
        }
        self.last_time = s.time;
    }

    /// Windows that end by `duration`.
    pub fn finish(mut self, duration: f64) -> LossSample {
        let complete = if duration < self.spec.warmup + self.spec.length {
            0
        } else {
            ((duration - self.spec.warmup - self.spec.length) / self.spec.spacing).floor() as usize
                + 1
        };
        self.lost.resize(complete, 0.0);
        self.idle.resize(complete, 0.0);
        LossSample {
            spec: self.spec,
            lost: self.lost,
            idle: self.idle,
        }
    }
}

/// Losses per window of length `t_window`, starts `spacing` apart, after the
/// default warm-up for the run's traffic.
pub fn window_losses(log: &EventLog, t_window: f64, spacing: f64) -> Result<LossSample> {
    let (_, sigma2) = log.summary.traffic.drift_diffusion();
    window_losses_with(
        log,
        WindowSpec {
            length: t_window,
            spacing,
            warmup: default_warmup(sigma2),
        },
    )
}

pub fn window_losses_with(log: &EventLog, spec: WindowSpec) -> Result<LossSample> {
    if spec.length >= log.duration() / 10.0 {
        return Err(invalid(format!(
            "window {} must be shorter than a tenth of the run {}",
            spec.length,
            log.duration()
        )));
    }
    let mut c = WindowCollector::new(spec)?;
    for s in &log.steps {
        c.observe(s);
    }
    Ok(c.finish(log.duration()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{run, TrafficModel};

    #[test]
    fn totals_match_log() {
        let log = run(TrafficModel::poisson(103.0, 0.01, 1.0).unwrap(), 5000.0, 4).unwrap();
        let spec = WindowSpec {
            length: 50.0,
            spacing: 50.0,
            warmup: 0.0,
        };
        let w = window_losses_with(&log, spec).unwrap();
        assert_eq!(w.len(), 100);
        let lost: f64 = w.lost.iter().sum();
        let idle: f64 = w.idle.iter().sum();
        assert!((lost - log.summary.totals.dropped).abs() < 1e-9);
        assert!((idle - log.summary.totals.idle).abs() < 1e-9);
        assert!(w.lost.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn overlapping_windows_count_twice() {
        let log = run(TrafficModel::poisson(103.0, 0.01, 1.0).unwrap(), 5000.0, 4).unwrap();
        let half = window_losses_with(
            &log,
            WindowSpec {
                length: 50.0,
                spacing: 25.0,
                warmup: 0.0,
            },
        )
        .unwrap();
        let full = window_losses_with(
            &log,
            WindowSpec {
                length: 50.0,
                spacing: 50.0,
                warmup: 0.0,
            },
        )
        .unwrap();
        for k in 0..full.len() {
            assert!((half.lost[2 * k] - full.lost[k]).abs() < 1e-12);
        }
        assert_eq!(half.series().unwrap().overlap, OverlapPolicy::Overlapping);
    }

    #[test]
    fn no_drops_gives_zero_sample() {
        let log = run(TrafficModel::poisson(50.0, 0.01, 1.0).unwrap(), 10_000.0, 1).unwrap();
        assert_eq!(log.summary.totals.drops, 0);
        let w = window_losses(&log, 10.0, 10.0).unwrap();
        assert!(!w.is_empty() && w.lost.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn csv_layout() {
        let log = run(TrafficModel::poisson(100.0, 0.01, 1.0).unwrap(), 3000.0, 1).unwrap();
        let w = window_losses(&log, 100.0, 100.0).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("window_index,t_start,lost_volume,idle_time")
        );
        assert_eq!(lines.next().unwrap().split(',').nth(1), Some("2000"));
        assert!(window_losses(&log, 400.0, 400.0).is_err());
    }
}
