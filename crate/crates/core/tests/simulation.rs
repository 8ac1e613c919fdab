use qloss::discrete::{compressibility, mean_loss_rate_exact, simulate_path, DiscreteQueueParams};
use qloss::fokker_planck::SeriesControl;
use qloss::simulate::{
    bridge, estimate_drift_diffusion, run, run_with, window_losses, BridgeConfig, Dist,
    TrafficModel,
};
use qloss::stats::{compressibility_estimate, mean_and_variance, WindowedSeries};

#[test]
fn bridge_grid_agrees_with_diffusion() {
    // drift sign x window length
    for (k, rate) in [99.0, 100.0, 101.0].into_iter().enumerate() {
        let cfg = BridgeConfig {
            traffic: TrafficModel::poisson(rate, 0.01, 1.0).unwrap(),
            duration: 1e6,
            seed: 11 + k as u64,
            dt: 0.5,
            windows: vec![20.0, 100.0, 500.0],
            separation: 2,
        };
        let r = bridge(&cfg, &SeriesControl::default()).unwrap();
        assert!(r.conservation_residual.abs() < 1e-9);
        let (a, s2) = cfg.traffic.drift_diffusion();
        assert!(
            r.fit.a.agrees_with(a, 4.0),
            "rate {rate}: a {:?} vs {a}",
            r.fit.a
        );
        assert!(r.fit.sigma2.agrees_with(s2, 4.0));
        for row in &r.rows {
            assert!(
                row.max_abs_z() < 3.0,
                "rate {rate}, t={}: {row:?}",
                row.window
            );
        }
    }
}

#[test]
fn identical_seeds_give_identical_runs() {
    let tm = TrafficModel {
        interarrival: Dist::Exponential { mean: 0.01 },
        packet_size: Dist::Uniform {
            low: 0.005,
            high: 0.015,
        },
        r_out: 1.0,
    };
    let a = run(tm, 200.0, 5).unwrap();
    let b = run(tm, 200.0, 5).unwrap();
    let c = run(tm, 200.0, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.steps, c.steps);
}

#[test]
fn volume_is_conserved() {
    for rate in [50.0, 100.0, 180.0] {
        let tm = TrafficModel::poisson(rate, 0.01, 1.0).unwrap();
        let s = run_with(tm, 5e4, 3, |_| {}).unwrap();
        assert!(
            s.conservation_residual().abs() < 1e-9,
            "rate {rate}: {}",
            s.conservation_residual()
        );
        let t = &s.totals;
        assert!(t.drops <= t.arrivals && t.idle >= 0.0 && t.idle <= 5e4);
    }
}

#[test]
fn drift_diffusion_fit_matches_renewal_values() {
    let tm = TrafficModel {
        interarrival: Dist::Deterministic { value: 0.01 },
        packet_size: Dist::Uniform {
            low: 0.004,
            high: 0.016,
        },
        r_out: 1.0,
    };
    let log = run(tm, 2e5, 8).unwrap();
    let fit = estimate_drift_diffusion(&log, 0.5).unwrap();
    let (a, s2) = tm.drift_diffusion();
    assert!(fit.a.agrees_with(a, 4.0), "{:?} vs {a}", fit.a);
    assert!(fit.sigma2.agrees_with(s2, 4.0), "{:?} vs {s2}", fit.sigma2);
}

#[test]
fn window_losses_sum_to_total() {
    let tm = TrafficModel::poisson(102.0, 0.01, 1.0).unwrap();
    let log = run(tm, 2e4, 4).unwrap();
    let sample = window_losses(&log, 100.0, 100.0).unwrap();
    let lost: f64 = sample.lost.iter().sum();
    let tail: f64 = log
        .steps
        .iter()
        .filter(|s| s.time < sample.spec.warmup || s.time >= sample.spec.start(sample.lost.len()))
        .map(|s| s.dropped())
        .sum();
    assert!((lost + tail - log.summary.totals.dropped).abs() < 1e-9);
}

#[test]
fn discrete_walk_matches_exact_statistics() {
    for (p, l, n) in [(0.5, 10usize, 200usize), (0.6, 15, 500)] {
        let par = DiscreteQueueParams::new(p, l).unwrap();
        let path = simulate_path(par, 4_000_000, 0, 21).unwrap();
        let series = WindowedSeries::disjoint(path.window_losses(n, n), n as f64).unwrap();
        let mv = mean_and_variance(&series).unwrap();
        assert!(mv
            .mean
            .agrees_with(n as f64 * mean_loss_rate_exact(par), 3.5));
        let chi = compressibility_estimate(&series, n as f64).unwrap();
        let exact = compressibility(par, n as u64).unwrap();
        assert!(chi.agrees_with(exact, 3.5), "p={p}: {chi:?} vs {exact}");
    }
}
