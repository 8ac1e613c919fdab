use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    /// Base seed; replica `r` uses `seed + r` unless `seeds` is given.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrete: Option<DiscreteGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuous: Option<ContinuousGrid>,
    #[serde(default)]
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteGrid {
    pub p: Vec<f64>,
    #[serde(rename = "L")]
    pub capacity: Vec<usize>,
    /// Window lengths in slots.
    pub windows: Vec<u64>,
    /// Monte Carlo slots per replica.
    #[serde(default = "default_steps")]
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousGrid {
    #[serde(default)]
    pub a: Vec<f64>,
    #[serde(default)]
    pub sigma2: Vec<f64>,
    pub windows: Vec<f64>,
    /// Correlation point, in windows between starts.
    #[serde(default = "default_separation")]
    pub separation: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traffic: Option<TrafficGrid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficGrid {
    /// Poisson arrival rates.
    pub rate: Vec<f64>,
    pub size: f64,
    #[serde(default = "default_r_out")]
    pub r_out: f64,
    pub duration: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    /// Agreement threshold in standard errors.
    #[serde(default = "default_sigmas")]
    pub sigmas: f64,
    #[serde(default = "default_normalization")]
    pub normalization: f64,
    #[serde(default = "default_conservation")]
    pub conservation: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            sigmas: default_sigmas(),
            normalization: default_normalization(),
            conservation: default_conservation(),
        }
    }
}

fn default_replicas() -> usize {
    1
}
fn default_seed() -> u64 {
    1
}
fn default_steps() -> usize {
    1_000_000
}
fn default_separation() -> usize {
    2
}
fn default_r_out() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    0.5
}
fn default_sigmas() -> f64 {
    3.0
}
fn default_normalization() -> f64 {
    1e-8
}
fn default_conservation() -> f64 {
    1e-9
}

pub const PRESETS: &[&str] = &["fig2-desk", "loss-asymptotes"];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = match name {
        "fig2-desk" => FIG2_DESK,
        "loss-asymptotes" => LOSS_ASYMPTOTES,
        _ => bail!(
            "unknown preset `{name}` (available: {})",
            PRESETS.join(", ")
        ),
    };
    parse(text, Path::new(name))
}

const FIG2_DESK: &str = r#"
model = "discrete"
replicas = 4
seed = 2024

[discrete]
p = [0.5]
L = [100]
windows = [10, 18, 32, 56, 100, 178, 316, 562, 1000, 1778, 3162, 5623, 10000, 17783, 31623, 56234, 100000, 1000000]
steps = 2000000
"#;

const LOSS_ASYMPTOTES: &str = r#"
model = "discrete"
replicas = 4
seed = 7

[discrete]
p = [0.3, 0.5, 0.7]
L = [20]
windows = [1000]
steps = 1000000
"#;

pub fn parse(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    toml::from_str(text).with_context(|| format!("invalid config {}", origin.display()))
}

pub fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    parse(&text, path)
}

impl ExperimentConfig {
    /// Seeds of each replica, validated to be distinct.
    pub fn replica_seeds(&self) -> Result<Vec<u64>> {
        let seeds = match &self.seeds {
            Some(s) => {
                if s.len() != self.replicas {
                    bail!(
                        "`seeds` lists {} values for {} replicas",
                        s.len(),
                        self.replicas
                    );
                }
                s.clone()
            }
            None => (0..self.replicas as u64)
                .map(|r| self.seed.wrapping_add(r))
                .collect(),
        };
        let unique: HashSet<_> = seeds.iter().collect();
        if unique.len() != seeds.len() {
            bail!("replica seeds must be distinct");
        }
        Ok(seeds)
    }

    pub fn discrete_grid(&self) -> Result<&DiscreteGrid> {
        let g = self
            .discrete
            .as_ref()
            .context("config has no [discrete] section")?;
        nonempty("discrete.p", &g.p)?;
        nonempty("discrete.L", &g.capacity)?;
        nonempty("discrete.windows", &g.windows)?;
        Ok(g)
    }

    pub fn continuous_grid(&self) -> Result<&ContinuousGrid> {
        let g = self
            .continuous
            .as_ref()
            .context("config has no [continuous] section")?;
        nonempty("continuous.windows", &g.windows)?;
        Ok(g)
    }

    /// `(a, σ²)` points: the explicit grid, else the values implied by the traffic rates.
    pub fn drift_diffusion_points(&self) -> Result<Vec<(f64, f64)>> {
        let g = self.continuous_grid()?;
        if !g.a.is_empty() || !g.sigma2.is_empty() {
            nonempty("continuous.a", &g.a)?;
            nonempty("continuous.sigma2", &g.sigma2)?;
            return Ok(g
                .a
                .iter()
                .flat_map(|&a| g.sigma2.iter().map(move |&s| (a, s)))
                .collect());
        }
        let t = self.traffic_grid()?;
        t.rate
            .iter()
            .map(|&r| {
                Ok(qloss::simulate::TrafficModel::poisson(r, t.size, t.r_out)?.drift_diffusion())
            })
            .collect()
    }

    pub fn traffic_grid(&self) -> Result<&TrafficGrid> {
        let g = self.continuous_grid()?;
        let t = g
            .traffic
            .as_ref()
            .context("config has no [continuous.traffic] section")?;
        nonempty("continuous.traffic.rate", &t.rate)?;
        Ok(t)
    }

    /// SHA-256 of the resolved configuration in canonical TOML form, output
    /// directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let canonical = toml::to_string(&c).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn nonempty<T>(key: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        bail!("empty grid: `{key}` has no values");
    }
    Ok(())
}
