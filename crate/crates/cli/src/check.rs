//! Invariant suite behind `qloss check`.

use num_complex::Complex64;
use qloss::discrete::{
    build_kernel, mean_loss_rate_exact, stationary_distribution, DiscreteQueueParams,
};
use qloss::fokker_planck::{probability_current, transition_density, FpParams, SeriesControl};
use qloss::numerics::{integrate, laplace_invert, Domain};
use qloss::simulate::{run_with, TrafficModel};

use crate::config::Tolerance;
use crate::output::{num, Table};

struct Check {
    name: &'static str,
    worst: qloss::Result<f64>,
    limit: f64,
}

fn fp_normalization() -> qloss::Result<f64> {
    let ctrl = SeriesControl::default();
    let mut worst: f64 = 0.0;
    for v in [-5.0, -1.0, 0.0, 1.0, 5.0] {
        let p = FpParams::from_v(v, 2.0)?;
        for tau in [1e-3, 0.1, 10.0] {
            for y in [0.0, 0.5, 1.0] {
                let t = p.time_from_tau(tau);
                let r = integrate(
                    |x| {
                        transition_density(&p, &ctrl, x, t, y)
                            .map(|s| s.value)
                            .unwrap_or(f64::NAN)
                    },
                    Domain::Finite(0.0, 1.0),
                    1e-12,
                )?;
                worst = worst.max((r.value - 1.0).abs());
            }
        }
    }
    Ok(worst)
}

fn fp_wall_flux() -> qloss::Result<f64> {
    let ctrl = SeriesControl::default();
    let mut worst: f64 = 0.0;
    for v in [-5.0, 0.0, 3.0] {
        let p = FpParams::from_v(v, 2.0)?;
        for tau in [1e-3, 0.1, 10.0] {
            for x in [0.0, 1.0] {
                let j = probability_current(&p, &ctrl, x, p.time_from_tau(tau), 0.4)?;
                worst = worst.max(j.value.abs());
            }
        }
    }
    Ok(worst)
}

fn discrete_stationarity() -> qloss::Result<f64> {
    let mut worst: f64 = 0.0;
    for (p, l) in [(0.3, 20), (0.5, 50), (0.7, 20)] {
        let par = DiscreteQueueParams::new(p, l)?;
        let pi = stationary_distribution(par);
        let next = build_kernel(par).step_distribution(&pi);
        for (a, b) in pi.iter().zip(&next) {
            worst = worst.max((a - b).abs());
        }
        worst = worst.max((pi.iter().sum::<f64>() - 1.0).abs());
        worst = worst.max((mean_loss_rate_exact(par) - p * pi[l]).abs());
    }
    Ok(worst)
}

fn simulation_conservation() -> qloss::Result<f64> {
    let mut worst: f64 = 0.0;
    for (k, rate) in [60.0, 100.0, 150.0].into_iter().enumerate() {
        let tm = TrafficModel::poisson(rate, 0.01, 1.0)?;
        let s = run_with(tm, 2e4, k as u64, |_| {})?;
        worst = worst.max(s.conservation_residual().abs());
    }
    Ok(worst)
}

fn laplace_pairs() -> qloss::Result<f64> {
    let mut worst: f64 = 0.0;
    for t in [0.1, 1.0, 5.0] {
        let a = laplace_invert(|e: Complex64| 1.0 / (e * e), t, 32)?.value;
        let b = laplace_invert(|e: Complex64| 1.0 / (e + 1.0), t, 32)?.value;
        worst = worst
            .max((a / t - 1.0).abs())
            .max((b / (-t).exp() - 1.0).abs());
    }
    Ok(worst)
}

/// Run every invariant; the table has one row per check.
pub fn run(tol: &Tolerance) -> Table {
    let checks = [
        Check {
            name: "fp_normalization",
            worst: fp_normalization(),
            limit: tol.normalization,
        },
        Check {
            name: "fp_wall_flux",
            worst: fp_wall_flux(),
            limit: 1e-6,
        },
        Check {
            name: "discrete_stationarity",
            worst: discrete_stationarity(),
            limit: 1e-12,
        },
        Check {
            name: "simulation_conservation",
            worst: simulation_conservation(),
            limit: tol.conservation,
        },
        Check {
            name: "laplace_known_pairs",
            worst: laplace_pairs(),
            limit: 1e-7,
        },
    ];
    let mut t = Table::new("check", vec!["check", "worst", "limit", "pass"]);
    for c in checks {
        let (worst, pass) = match &c.worst {
            Ok(w) => (num(*w), *w <= c.limit),
            Err(e) => (format!("error: {e}"), false),
        };
        if !pass {
            t.violations
                .push(format!("{} exceeded {:e}: {worst}", c.name, c.limit));
        }
        t.rows.push(vec![
            c.name.to_string(),
            worst,
            num(c.limit),
            pass.to_string(),
        ]);
    }
    t
}
