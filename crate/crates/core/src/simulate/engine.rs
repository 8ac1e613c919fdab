use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::traffic::TrafficModel;
use crate::error::{invalid, Result};
use crate::numerics::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    pub size: f64,
    pub accepted: bool,
}

/// One stretch of the trajectory: drain from the previous record's time up
/// to `time`, then the arrival at `time` if there is one. The final record
/// of a run carries no arrival and closes the run at its duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub time: f64,
    /// Volume served since the previous record.
    pub served: f64,
    /// Time the server spent with an empty buffer since the previous record.
    pub idle: f64,
    pub level_before: f64,
    pub level_after: f64,
    pub arrival: Option<Arrival>,
}

impl Step {
    pub fn dropped(&self) -> f64 {
        match self.arrival {
            Some(Arrival {
                size,
                accepted: false,
            }) => size,
            _ => 0.0,
        }
    }

    pub fn offered(&self) -> f64 {
        self.arrival.map_or(0.0, |a| a.size)
    }
}

/// Endless event-driven sampler; every item is a [`Step`] ending in an arrival.
#[derive(Debug, Clone)]
pub struct Simulation {
    traffic: TrafficModel,
    rng: ChaCha8Rng,
    time: f64,
    level: f64,
    pending: (f64, f64),
}

impl Simulation {
    pub fn new(traffic: TrafficModel, seed: u64) -> Result<Self> {
        traffic.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pending = Self::draw(&traffic, &mut rng);
        Ok(Self {
            traffic,
            rng,
            time: 0.0,
            level: 0.0,
            pending,
        })
    }

    fn draw(traffic: &TrafficModel, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let gap = traffic.interarrival.sample(rng);
        (gap, traffic.packet_size.sample(rng))
    }

    /// Time of the arrival the next call to `next` will produce.
    pub fn next_arrival_time(&self) -> f64 {
        self.time + self.pending.0
    }

    pub fn with_initial_level(mut self, level: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&level) {
            return Err(invalid(format!(
                "initial level must lie in [0, 1], got {level}"
            )));
        }
        self.level = level;
        Ok(self)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    fn drain_to(&mut self, t: f64) -> (f64, f64, f64) {
        let dt = t - self.time;
        let r = self.traffic.r_out;
        let capacity = r * dt;
        let (served, idle) = if capacity >= self.level {
            (self.level, dt - self.level / r)
        } else {
            (capacity, 0.0)
        };
        let before = self.level;
        self.level = if capacity >= before {
            0.0
        } else {
            before - capacity
        };
        self.time = t;
        (served, idle.max(0.0), self.level)
    }

    /// Drain without an arrival up to `t`, which must not precede the current time.
    pub fn close(&mut self, t: f64) -> Step {
        let t = t.max(self.time);
        let (served, idle, level) = self.drain_to(t);
        Step {
            time: t,
            served,
            idle,
            level_before: level,
            level_after: level,
            arrival: None,
        }
    }
}

impl Iterator for Simulation {
    type Item = Step;

    fn next(&mut self) -> Option<Step> {
        let (gap, size) = self.pending;
        self.pending = Self::draw(&self.traffic, &mut self.rng);
        let (served, idle, before) = self.drain_to(self.time + gap);
        let accepted = before + size <= 1.0;
        if accepted {
            self.level = before + size;
        }
        Some(Step {
            time: self.time,
            served,
            idle,
            level_before: before,
            level_after: self.level,
            arrival: Some(Arrival { size, accepted }),
        })
    }
}

/// Running totals of a run, kept whether or not the steps are stored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTotals {
    pub arrivals: u64,
    pub drops: u64,
    pub offered: f64,
    pub dropped: f64,
    pub served: f64,
    pub idle: f64,
}

#[derive(Debug, Default)]
struct TotalsAcc {
    arrivals: u64,
    drops: u64,
    offered: CompensatedSum,
    dropped: CompensatedSum,
    served: CompensatedSum,
    idle: CompensatedSum,
}

impl TotalsAcc {
    fn add(&mut self, s: &Step) {
        if let Some(a) = s.arrival {
            self.arrivals += 1;
            self.offered.add(a.size);
            if !a.accepted {
                self.drops += 1;
                self.dropped.add(a.size);
            }
        }
        self.served.add(s.served);
        self.idle.add(s.idle);
    }

    fn totals(&self) -> RunTotals {
        RunTotals {
            arrivals: self.arrivals,
            drops: self.drops,
            offered: self.offered.value(),
            dropped: self.dropped.value(),
            served: self.served.value(),
            idle: self.idle.value(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub traffic: TrafficModel,
    pub seed: u64,
    pub duration: f64,
    pub initial_level: f64,
    pub final_level: f64,
    pub totals: RunTotals,
}

impl RunSummary {
    /// `offered - served - dropped - (final - initial)`, zero up to rounding.
    pub fn conservation_residual(&self) -> f64 {
        let t = &self.totals;
        t.offered - t.served - t.dropped - (self.final_level - self.initial_level)
    }
}

/// Run for `duration`, handing every step (the closing one included) to `sink`.
pub fn run_with<F: FnMut(&Step)>(
    traffic: TrafficModel,
    duration: f64,
    seed: u64,
    mut sink: F,
) -> Result<RunSummary> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(invalid(format!(
            "duration must be positive, got {duration}"
        )));
    }
    let mut sim = Simulation::new(traffic, seed)?;
    let initial_level = sim.level();
    let mut totals = TotalsAcc::default();
    while sim.next_arrival_time() <= duration {
        let step = sim.next().expect("simulation is endless");
        totals.add(&step);
        sink(&step);
    }
    let last = sim.close(duration);
    totals.add(&last);
    sink(&last);
    Ok(RunSummary {
        traffic,
        seed,
        duration,
        initial_level,
        final_level: sim.level(),
        totals: totals.totals(),
    })
}

/// Stored trajectory of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub summary: RunSummary,
    pub steps: Vec<Step>,
}

impl EventLog {
    pub fn duration(&self) -> f64 {
        self.summary.duration
    }

    pub fn seed(&self) -> u64 {
        self.summary.seed
    }

    /// Level at time `t`, interpolated along the linear drain between records.
    pub fn level_at(&self, t: f64) -> f64 {
        let r = self.summary.traffic.r_out;
        let idx = self.steps.partition_point(|s| s.time <= t);
        let (t0, l0) = if idx == 0 {
            (0.0, self.summary.initial_level)
        } else {
            let s = &self.steps[idx - 1];
            (s.time, s.level_after)
        };
        (l0 - r * (t - t0)).max(0.0)
    }

    /// Write every step as CSV with columns
    /// `time,size,accepted,level_before,level_after,served,idle`; the closing
    /// record has an empty `size` and `accepted`.
    pub fn write_steps_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "time",
            "size",
            "accepted",
            "level_before",
            "level_after",
            "served",
            "idle",
        ])?;
        for s in &self.steps {
            let (size, acc) = match s.arrival {
                Some(a) => (a.size.to_string(), a.accepted.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([
                s.time.to_string(),
                size,
                acc,
                s.level_before.to_string(),
                s.level_after.to_string(),
                s.served.to_string(),
                s.idle.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Run for `duration` keeping every step.
pub fn run(traffic: TrafficModel, duration: f64, seed: u64) -> Result<EventLog> {
    let mut steps = Vec::new();
    let summary = run_with(traffic, duration, seed, |s| steps.push(*s))?;
    Ok(EventLog { summary, steps })
}
