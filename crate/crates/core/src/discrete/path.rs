use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::analytics::stationary_distribution;
use super::params::DiscreteQueueParams;
use crate::error::{invalid, Result};

/// A sampled queue trajectory. `loss_events[n]` marks a packet lost between
/// `lengths[n]` and `lengths[n+1]`, i.e. both equal `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePath {
    pub seed: u64,
    pub capacity: usize,
    pub lengths: Vec<u32>,
    pub loss_events: Vec<bool>,
}

impl DiscretePath {
    pub fn steps(&self) -> usize {
        self.loss_events.len()
    }

    pub fn total_losses(&self) -> u64 {
        self.loss_events.iter().filter(|&&x| x).count() as u64
    }

    /// Loss counts in consecutive windows of `window` slots whose starts
    /// are `stride` slots apart. Trailing partial windows are dropped.
    pub fn window_losses(&self, window: usize, stride: usize) -> Vec<f64> {
        assert!(window >= 1 && stride >= 1);
        let mut prefix = Vec::with_capacity(self.loss_events.len() + 1);
        prefix.push(0u64);
        let mut acc = 0;
        for &e in &self.loss_events {
            acc += e as u64;
            prefix.push(acc);
        }
        (0..)
            .map(|i| i * stride)
            .take_while(|&s| s + window <= self.loss_events.len())
            .map(|s| (prefix[s + window] - prefix[s]) as f64)
            .collect()
    }
}

/// Step-by-step sampler of the bounded walk.
#[derive(Debug, Clone)]
pub struct DiscreteWalker {
    p: f64,
    capacity: u32,
    level: u32,
    rng: ChaCha8Rng,
}

impl DiscreteWalker {
    /// Start at `level` with a ChaCha8 stream seeded from `seed`.
    pub fn new(params: DiscreteQueueParams, level: u32, seed: u64) -> Self {
        Self {
            p: params.p(),
            capacity: params.capacity() as u32,
            level: level.min(params.capacity() as u32),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Start from a draw of the exact stationary distribution.
    pub fn stationary(params: DiscreteQueueParams, seed: u64) -> Self {
        let mut w = Self::new(params, 0, seed);
        let pi = stationary_distribution(params);
        let u: f64 = w.rng.random();
        let mut cdf = 0.0;
        let mut level = params.capacity();
        for (i, &x) in pi.iter().enumerate() {
            cdf += x;
            if u < cdf {
                level = i;
                break;
            }
        }
        w.level = level as u32;
        w
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Advance one slot; returns whether a packet was lost.
    #[inline]
    pub fn step(&mut self) -> bool {
        let arrival = self.rng.random_bool(self.p);
        if arrival {
            if self.level == self.capacity {
                return true;
            }
            self.level += 1;
        } else if self.level > 0 {
            self.level -= 1;
        }
        false
    }
}

/// Sample `n_steps` slots. With `burn_in == 0` the initial state is drawn
/// from the stationary distribution; otherwise the walk starts empty and
/// the first `burn_in` slots are discarded. Identical seeds give identical
/// paths on every platform.
pub fn simulate_path(
    params: DiscreteQueueParams,
    n_steps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<DiscretePath> {
    if n_steps < 1 {
        return Err(invalid("n_steps must be at least 1"));
    }
    let mut walker = if burn_in == 0 {
        DiscreteWalker::stationary(params, seed)
    } else {
        let mut w = DiscreteWalker::new(params, 0, seed);
        for _ in 0..burn_in {
            w.step();
        }
        w
    };
    let mut lengths = Vec::with_capacity(n_steps + 1);
    let mut loss_events = Vec::with_capacity(n_steps);
    lengths.push(walker.level());
    for _ in 0..n_steps {
        loss_events.push(walker.step());
        lengths.push(walker.level());
    }
    Ok(DiscretePath {
        seed,
        capacity: params.capacity(),
        lengths,
        loss_events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::mean_loss_rate_exact;
    use proptest::prelude::*;

    #[test]
    fn saturation_at_p_one() {
        let par = DiscreteQueueParams::new(1.0, 5).unwrap();
        let path = simulate_path(par, 40, 1, 3).unwrap();
        // started at 0, one burn-in slot: reaches L after 4 more slots
        assert!(path.loss_events[4..].iter().all(|&x| x));
        assert!(path.loss_events[..4].iter().all(|&x| !x));
    }

    #[test]
    fn no_losses_without_arrivals() {
        let par = DiscreteQueueParams::new(0.0, 5).unwrap();
        let path = simulate_path(par, 1000, 0, 11).unwrap();
        assert_eq!(path.total_losses(), 0);
    }

    #[test]
    fn reproducible() {
        let par = DiscreteQueueParams::new(0.5, 20).unwrap();
        let a = simulate_path(par, 5000, 0, 42).unwrap();
        let b = simulate_path(par, 5000, 0, 42).unwrap();
        let c = simulate_path(par, 5000, 0, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.lengths, c.lengths);
    }

    #[test]
    fn window_loss_counts() {
        let path = DiscretePath {
            seed: 0,
            capacity: 1,
            lengths: vec![1; 7],
            loss_events: vec![true, false, true, true, false, true],
        };
        assert_eq!(path.window_losses(2, 2), vec![1.0, 2.0, 1.0]);
        assert_eq!(path.window_losses(3, 1), vec![2.0, 2.0, 2.0, 2.0]);
        assert_eq!(path.window_losses(4, 4), vec![3.0]);
    }

    #[test]
    fn empirical_rate_matches_exact() {
        let par = DiscreteQueueParams::new(0.5, 20).unwrap();
        let path = simulate_path(par, 1_000_000, 0, 7).unwrap();
        let counts = path.window_losses(10_000, 10_000);
        let rates: Vec<f64> = counts.iter().map(|c| c / 1e4).collect();
        let n = rates.len() as f64;
        let mean = rates.iter().sum::<f64>() / n;
        let sd = (rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let exact = mean_loss_rate_exact(par);
        assert!(
            (mean - exact).abs() < 3.0 * sd / n.sqrt(),
            "{mean} vs {exact}"
        );
    }

    proptest! {
        #[test]
        fn path_invariants(p in 0.0f64..=1.0, l in 1usize..12, seed in any::<u64>()) {
            let par = DiscreteQueueParams::new(p, l).unwrap();
            let path = simulate_path(par, 300, 0, seed).unwrap();
            for n in 0..path.steps() {
                let (a, b) = (path.lengths[n], path.lengths[n + 1]);
                prop_assert!(b as usize <= l);
                let d = b as i64 - a as i64;
                prop_assert!(d.abs() <= 1);
                if d == 0 {
                    prop_assert!(a == 0 || a as usize == l);
                }
                prop_assert_eq!(path.loss_events[n], a as usize == l && b as usize == l);
            }
        }
    }
}
