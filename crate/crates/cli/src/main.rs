#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod check;
mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use config::{ExperimentConfig, Model};
use output::Table;

/// Loss statistics of finite-buffer queues: exact, diffusion, and Monte Carlo tables.
#[derive(Debug, Parser)]
#[command(name = "qloss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML experiment config.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Built-in config: fig2-desk or loss-asymptotes.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Output directory (overrides the config's `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo replicas (overrides the config).
    #[arg(long, global = true)]
    replicas: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Exact loss mean, variance and compressibility of the discrete queue.
    ExactDiscrete,
    /// Monte Carlo of the discrete queue against the exact values.
    SimDiscrete,
    /// Diffusion-model loss statistics on an (a, sigma2, t) grid.
    FpEval,
    /// Packet simulation bridged to the diffusion model.
    SimContinuous,
    /// Every table the config's model supports.
    Sweep,
    /// Invariant suite.
    Check,
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match (&cli.config, &cli.preset, cli.command) {
        (Some(path), _, _) => config::load(path)?,
        (None, Some(name), _) => config::preset(name)?,
        (None, None, Command::Check) => config::preset("loss-asymptotes")?,
        (None, None, _) => bail!("pass --config PATH or --preset NAME"),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
        cfg.seeds = None;
    }
    if let Some(r) = cli.replicas {
        cfg.replicas = r;
        if cfg.seeds.as_ref().is_some_and(|s| s.len() != r) {
            cfg.seeds = None;
        }
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    Ok(cfg)
}

fn tables(cmd: Command, cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    Ok(match cmd {
        Command::ExactDiscrete => vec![commands::exact_discrete(cfg)?],
        Command::SimDiscrete => vec![commands::sim_discrete(cfg)?],
        Command::FpEval => vec![commands::fp_eval(cfg)?],
        Command::SimContinuous => vec![commands::sim_continuous(cfg)?],
        Command::Sweep => match cfg.model {
            Model::Discrete => {
                let mut t = vec![commands::exact_discrete(cfg)?];
                if cfg.replicas > 0 {
                    t.push(commands::sim_discrete(cfg)?);
                }
                t
            }
            Model::Continuous => {
                let mut t = vec![commands::fp_eval(cfg)?];
                if cfg.replicas > 0 && cfg.continuous_grid()?.traffic.is_some() {
                    t.push(commands::sim_continuous(cfg)?);
                }
                t
            }
        },
        Command::Check => vec![check::run(&cfg.tolerance)],
    })
}

fn command_name(cmd: Command) -> &'static str {
    match cmd {
        Command::ExactDiscrete => "exact-discrete",
        Command::SimDiscrete => "sim-discrete",
        Command::FpEval => "fp-eval",
        Command::SimContinuous => "sim-continuous",
        Command::Sweep => "sweep",
        Command::Check => "check",
    }
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = resolve(&cli)?;
    let seeds = cfg.replica_seeds()?;
    let all = tables(cli.command, &cfg)?;
    let dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("qloss-out"));
    let mut ok = true;
    for t in &all {
        let path = output::write_table(&dir, t, &cfg, command_name(cli.command), &seeds)?;
        let agree = t.header.iter().position(|h| *h == "agree" || *h == "pass");
        let summary = match agree {
            Some(col) => {
                let n = t.rows.iter().filter(|r| r[col] == "true").count();
                format!(", {n}/{} agree", t.rows.len())
            }
            None => String::new(),
        };
        println!("{}: {} rows{summary}", path.display(), t.rows.len());
        for v in &t.violations {
            eprintln!("invariant violated: {v}");
            ok = false;
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
