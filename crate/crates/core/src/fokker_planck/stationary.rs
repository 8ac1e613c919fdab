use super::params::FpParams;

/// `p(ℓ) = 2v e^{2vℓ}/(e^{2v} - 1)`, evaluated without overflow.
pub(crate) fn stationary_density_v(v: f64, ell: f64) -> f64 {
    if v == 0.0 {
        return 1.0;
    }
    if v.abs() < 1e-12 {
        return 1.0 + v * (2.0 * ell - 1.0);
    }
    if v > 0.0 {
        2.0 * v * (2.0 * v * (ell - 1.0)).exp() / (-(-2.0 * v).exp_m1())
    } else {
        2.0 * v * (2.0 * v * ell).exp() / (2.0 * v).exp_m1()
    }
}

/// Stationary density of the buffer level.
pub fn stationary_density(params: &FpParams, ell: f64) -> f64 {
    stationary_density_v(params.v(), ell)
}

/// Density at the full-buffer wall, `p(1)`, which sets the mean loss rate.
pub fn p_full(params: &FpParams) -> f64 {
    stationary_density_v(params.v(), 1.0)
}

/// `r_loss = σ²/2`
pub fn loss_rate_coefficient(params: &FpParams) -> f64 {
    0.5 * params.sigma2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, Domain};

    #[test]
    fn uniform_at_zero_drift() {
        let p = FpParams::new(0.0, 1.0).unwrap();
        for x in [0.0, 0.5, 1.0] {
            assert_eq!(stationary_density(&p, x), 1.0);
        }
    }

    #[test]
    fn normalized() {
        for v in [-3.0, -1e-9, 0.5, 4.0, 300.0, -300.0] {
            let p = FpParams::from_v(v, 1.0).unwrap();
            let r = integrate(
                |x| stationary_density(&p, x),
                Domain::Finite(0.0, 1.0),
                1e-12,
            )
            .unwrap();
            assert!((r.value - 1.0).abs() < 1e-10, "v={v}: {}", r.value);
        }
    }

    #[test]
    fn value_at_full_buffer() {
        let p = FpParams::from_v(1.0, 1.0).unwrap();
        let e2 = 2f64.exp();
        let expect = 2.0 * e2 / (e2 - 1.0);
        assert!((p_full(&p) - expect).abs() < 1e-14);
        assert!((p_full(&p) - 2.313).abs() < 1e-3);
    }

    #[test]
    fn continuous_through_zero_drift() {
        let a = stationary_density_v(1e-11, 0.8);
        let b = stationary_density_v(2e-12, 0.8);
        assert!((a - 1.0).abs() < 1e-10 && (b - 1.0).abs() < 1e-11);
    }

    #[test]
    fn idleness_mirror() {
        for v in [-2.0, 0.3, 1.7] {
            let p = FpParams::from_v(v, 1.0).unwrap();
            let d = p.idleness_dual();
            for x in [0.0, 0.2, 0.9] {
                assert!(
                    (stationary_density(&p, x) - stationary_density(&d, 1.0 - x)).abs() < 1e-13
                );
            }
        }
        let p = FpParams::new(0.2, 2.0).unwrap();
        assert_eq!(loss_rate_coefficient(&p), 1.0);
        assert_eq!(loss_rate_coefficient(&p.idleness_dual()), 1.0);
    }
}
