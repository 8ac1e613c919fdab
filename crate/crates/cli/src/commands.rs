use anyhow::{bail, Result};
use rayon::prelude::*;

use qloss::discrete::{
    chi_infinity_asymptote, mean_loss_rate_asymptote, simulate_path, DiscreteQueueParams,
    TransitionKernel,
};
use qloss::fokker_planck::{
    loss_correlator, loss_moment, p_full, p_loss, transition_density, FpParams, SeriesControl,
};
use qloss::numerics::{integrate, Domain};
use qloss::simulate::{bridge, BridgeConfig, TrafficModel};
use qloss::stats::{compressibility_estimate, mean_and_variance, WindowedSeries};

use crate::config::ExperimentConfig;
use crate::output::{num, Table};

/// Stream seed for grid point `point` of a replica.
pub fn point_seed(replica_seed: u64, point: usize) -> u64 {
    replica_seed.wrapping_add((point as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

type KeyedRows = Vec<((usize, usize, usize), Vec<String>)>;

fn status<T>(r: &qloss::Result<T>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => format!("error: {e}"),
    }
}

fn require_replicas(cfg: &ExperimentConfig) -> Result<Vec<u64>> {
    if cfg.replicas == 0 {
        bail!("Monte Carlo runs need replicas >= 1");
    }
    cfg.replica_seeds()
}

fn discrete_params(cfg: &ExperimentConfig) -> Result<Vec<DiscreteQueueParams>> {
    let g = cfg.discrete_grid()?;
    let mut out = Vec::new();
    for &p in &g.p {
        for &l in &g.capacity {
            out.push(DiscreteQueueParams::new(p, l)?);
        }
    }
    Ok(out)
}

pub fn exact_discrete(cfg: &ExperimentConfig) -> Result<Table> {
    let g = cfg.discrete_grid()?;
    let params = discrete_params(cfg)?;
    let mut t = Table::new(
        "exact_discrete",
        vec![
            "p",
            "L",
            "N",
            "n0",
            "mean_rate",
            "mean_rate_asymptote",
            "loss_mean",
            "loss_variance",
            "chi",
            "chi_infinity",
            "status",
        ],
    );
    let blocks: Vec<Vec<Vec<String>>> = params
        .par_iter()
        .map(|&par| {
            let kernel = TransitionKernel::new(par);
            let rate = kernel.mean_loss_rate();
            g.windows
                .iter()
                .map(|&n| {
                    let var = kernel.loss_variance(n);
                    let chi = kernel.compressibility(n);
                    let st = if var.is_err() {
                        status(&var)
                    } else {
                        status(&chi)
                    };
                    vec![
                        num(par.p()),
                        par.capacity().to_string(),
                        n.to_string(),
                        num(par.crossover_window()),
                        num(rate),
                        num(mean_loss_rate_asymptote(par)),
                        num(rate * n as f64),
                        var.map(num).unwrap_or_default(),
                        chi.map(num).unwrap_or_default(),
                        chi_infinity_asymptote(par).map(num).unwrap_or_default(),
                        st,
                    ]
                })
                .collect()
        })
        .collect();
    t.rows = blocks.into_iter().flatten().collect();
    Ok(t)
}

pub fn sim_discrete(cfg: &ExperimentConfig) -> Result<Table> {
    let g = cfg.discrete_grid()?;
    let params = discrete_params(cfg)?;
    let seeds = require_replicas(cfg)?;
    let sigmas = cfg.tolerance.sigmas;
    let mut t = Table::new(
        "sim_discrete",
        vec![
            "p",
            "L",
            "N",
            "replica",
            "seed",
            "windows",
            "mean",
            "mean_se",
            "mean_exact",
            "mean_z",
            "chi",
            "chi_se",
            "chi_exact",
            "chi_z",
            "agree",
            "status",
        ],
    );
    let jobs: Vec<(usize, usize)> = (0..params.len())
        .flat_map(|i| (0..seeds.len()).map(move |r| (i, r)))
        .collect();
    let results: Vec<KeyedRows> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let par = params[i];
            let seed = point_seed(seeds[r], i);
            let kernel = TransitionKernel::new(par);
            let path = simulate_path(par, g.steps, 0, seed);
            g.windows
                .iter()
                .enumerate()
                .map(|(k, &n)| {
                    let mut row = vec![
                        num(par.p()),
                        par.capacity().to_string(),
                        n.to_string(),
                        r.to_string(),
                        seed.to_string(),
                    ];
                    let stats = path.as_ref().map_err(Clone::clone).and_then(|path| {
                        let nw = n as usize;
                        let series =
                            WindowedSeries::disjoint(path.window_losses(nw, nw), n as f64)?;
                        let mv = mean_and_variance(&series)?;
                        let chi = compressibility_estimate(&series, n as f64)?;
                        let mean_exact = kernel.mean_loss_rate() * n as f64;
                        let chi_exact = kernel.compressibility(n)?;
                        Ok((series.len(), mv.mean, mean_exact, chi, chi_exact))
                    });
                    match &stats {
                        Ok((w, mean, mean_exact, chi, chi_exact)) => {
                            let (zm, zc) = (mean.z_score(*mean_exact), chi.z_score(*chi_exact));
                            row.extend([
                                w.to_string(),
                                num(mean.value),
                                num(mean.std_error),
                                num(*mean_exact),
                                num(zm),
                                num(chi.value),
                                num(chi.std_error),
                                num(*chi_exact),
                                num(zc),
                                (zm.abs() < sigmas && zc.abs() < sigmas).to_string(),
                            ]);
                        }
                        Err(_) => row.extend(std::iter::repeat_n(String::new(), 10)),
                    }
                    row.push(status(&stats));
                    ((i, k, r), row)
                })
                .collect()
        })
        .collect();
    let mut rows: Vec<_> = results.into_iter().flatten().collect();
    rows.sort_by_key(|(key, _)| *key);
    t.rows = rows.into_iter().map(|(_, row)| row).collect();
    Ok(t)
}

pub fn fp_eval(cfg: &ExperimentConfig) -> Result<Table> {
    let g = cfg.continuous_grid()?;
    let points = cfg.drift_diffusion_points()?;
    let tol = cfg.tolerance.normalization;
    let ctrl = SeriesControl::default();
    let mut t = Table::new(
        "fp_eval",
        vec![
            "a",
            "sigma2",
            "t",
            "tau",
            "v",
            "p_full",
            "loss_mean",
            "loss_variance",
            "variance_to_mean",
            "p_loss",
            "zero_loss",
            "correlation",
            "normalization_error",
            "status",
        ],
    );
    let jobs: Vec<((f64, f64), f64)> = points
        .iter()
        .flat_map(|&pt| g.windows.iter().map(move |&w| (pt, w)))
        .collect();
    let rows: Vec<(Vec<String>, Option<String>)> = jobs
        .par_iter()
        .map(|&((a, s2), window)| {
            let r = (|| -> qloss::Result<Vec<f64>> {
                let p = FpParams::new(a, s2)?;
                let m1 = loss_moment(&p, &ctrl, 1, window)?.value;
                let m2 = loss_moment(&p, &ctrl, 2, window)?.value;
                let var = m2 - m1 * m1;
                let pl = p_loss(&p, &ctrl, window)?;
                let gap = ((g.separation.max(1) - 1) as f64 * window).max(1e-9 * window);
                let corr = loss_correlator(&p, &ctrl, window, window, gap)? / var;
                let norm = integrate(
                    |x| {
                        transition_density(&p, &ctrl, x, window, 1.0)
                            .map(|s| s.value)
                            .unwrap_or(f64::NAN)
                    },
                    Domain::Finite(0.0, 1.0),
                    1e-12,
                )?
                .value;
                Ok(vec![
                    p.tau(window),
                    p.v(),
                    p_full(&p),
                    m1,
                    var,
                    var / m1,
                    pl,
                    1.0 - pl,
                    corr,
                    (norm - 1.0).abs(),
                ])
            })();
            let mut row = vec![num(a), num(s2), num(window)];
            let mut violation = None;
            match &r {
                Ok(vals) => {
                    row.extend(vals.iter().map(|&x| num(x)));
                    let err = vals[9];
                    if !(err <= tol) {
                        violation = Some(format!(
                            "normalization error {err:e} at a={a}, sigma2={s2}, t={window}"
                        ));
                    }
                }
                Err(_) => row.extend(std::iter::repeat_n(String::new(), 10)),
            }
            row.push(status(&r));
            (row, violation)
        })
        .collect();
    for (row, v) in rows {
        t.rows.push(row);
        t.violations.extend(v);
    }
    Ok(t)
}

pub fn sim_continuous(cfg: &ExperimentConfig) -> Result<Table> {
    let g = cfg.continuous_grid()?;
    let tr = cfg.traffic_grid()?;
    let seeds = require_replicas(cfg)?;
    let tol = cfg.tolerance;
    let ctrl = SeriesControl::default();
    let mut t = Table::new(
        "sim_continuous",
        vec![
            "rate",
            "replica",
            "seed",
            "window",
            "tau",
            "a_hat",
            "a_se",
            "sigma2_hat",
            "sigma2_se",
            "windows",
            "mean",
            "mean_se",
            "mean_pred",
            "variance",
            "variance_se",
            "variance_pred",
            "zero_loss",
            "zero_loss_se",
            "zero_loss_pred",
            "correlation",
            "correlation_se",
            "correlation_pred",
            "max_abs_z",
            "agree",
            "conservation_residual",
            "status",
        ],
    );
    let jobs: Vec<(usize, usize)> = (0..tr.rate.len())
        .flat_map(|i| (0..seeds.len()).map(move |r| (i, r)))
        .collect();
    let results: Vec<(KeyedRows, Option<String>)> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let rate = tr.rate[i];
            let seed = point_seed(seeds[r], i);
            let report = TrafficModel::poisson(rate, tr.size, tr.r_out).and_then(|traffic| {
                bridge(
                    &BridgeConfig {
                        traffic,
                        duration: tr.duration,
                        seed,
                        dt: tr.dt,
                        windows: g.windows.clone(),
                        separation: g.separation,
                    },
                    &ctrl,
                )
            });
            let lead = |w: f64| vec![num(rate), r.to_string(), seed.to_string(), num(w)];
            match report {
                Ok(rep) => {
                    let res = rep.conservation_residual;
                    let violation = (!(res.abs() <= tol.conservation)).then(|| {
                        format!("conservation residual {res:e} at rate={rate}, seed={seed}")
                    });
                    let rows = rep
                        .rows
                        .iter()
                        .enumerate()
                        .map(|(k, w)| {
                            let mut row = lead(w.window);
                            row.extend([
                                num(w.tau),
                                num(rep.fit.a.value),
                                num(rep.fit.a.std_error),
                                num(rep.fit.sigma2.value),
                                num(rep.fit.sigma2.std_error),
                                w.windows.to_string(),
                            ]);
                            for c in [w.mean, w.variance, w.zero_loss, w.correlation] {
                                row.extend([
                                    num(c.simulated.value),
                                    num(c.simulated.std_error),
                                    num(c.predicted),
                                ]);
                            }
                            let z = w.max_abs_z();
                            row.extend([
                                num(z),
                                (z < tol.sigmas).to_string(),
                                num(res),
                                "ok".into(),
                            ]);
                            ((i, k, r), row)
                        })
                        .collect();
                    (rows, violation)
                }
                Err(e) => {
                    let rows = g
                        .windows
                        .iter()
                        .enumerate()
                        .map(|(k, &w)| {
                            let mut row = lead(w);
                            row.extend(std::iter::repeat_n(String::new(), 21));
                            row.push(format!("error: {e}"));
                            ((i, k, r), row)
                        })
                        .collect();
                    (rows, None)
                }
            }
        })
        .collect();
    let mut rows = Vec::new();
    for (block, v) in results {
        rows.extend(block);
        t.violations.extend(v);
    }
    rows.sort_by_key(|(key, _)| *key);
    t.rows = rows.into_iter().map(|(_, row)| row).collect();
    Ok(t)
}
