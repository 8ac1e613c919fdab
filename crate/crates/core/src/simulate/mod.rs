//! Packet-level simulation of a finite buffer fed by renewal traffic.
//!
//! Packets arrive at renewal times and are dropped whole when they do not
//! fit. The buffer drains at a constant rate between arrivals. The run is
//! event driven, so the trajectory is exact between events.

mod bridge;
mod engine;
mod estimate;
mod traffic;
mod windows;

pub use bridge::{bridge, BridgeConfig, BridgeReport, Comparison, WindowComparison};
pub use engine::{run, run_with, Arrival, EventLog, RunSummary, RunTotals, Simulation, Step};
pub use estimate::{estimate_drift_diffusion, DriftDiffusion, DriftDiffusionEstimator, INTERIOR};
pub use traffic::{Dist, TrafficModel, MAX_MEAN_PACKET};
pub use windows::{
    default_warmup, window_losses, window_losses_with, LossSample, WindowCollector, WindowSpec,
};
