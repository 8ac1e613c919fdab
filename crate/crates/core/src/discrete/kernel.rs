use std::sync::OnceLock;

use super::params::DiscreteQueueParams;
use crate::error::{invalid, Result};
use crate::numerics::{tridiag_eigen_rows, SymTridiagonal, TridiagEigen};

/// Row-stochastic one-step kernel of the bounded walk over queue lengths
/// `0..=L`. Interior states step up with `p` and down with `1-p`; state 0
/// holds on no arrival, state `L` holds on arrival (the packet is lost).
#[derive(Debug)]
pub struct TransitionKernel {
    params: DiscreteQueueParams,
    boundary_spectrum: OnceLock<Result<BoundarySpectrum>>,
}

/// Eigenvalues of the symmetrized kernel with the squared eigenvector
/// components at the full-buffer state, so that
/// `G_n(L, L) = sum_k weights[k] * eigenvalues[k]^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpectrum {
    pub eigenvalues: Vec<f64>,
    pub weights: Vec<f64>,
}

impl BoundarySpectrum {
    /// Modes other than the stationary one (`λ = 1`, weight `π(L)`).
    pub fn relaxing_modes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.eigenvalues
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .skip(1)
    }

    pub fn return_probability(&self, n: u64) -> f64 {
        crate::numerics::compensated_sum(
            self.eigenvalues
                .iter()
                .zip(&self.weights)
                .map(|(&l, &w)| w * pow_u64(l, n)),
        )
    }
}

pub(crate) fn pow_u64(x: f64, n: u64) -> f64 {
    if n <= i32::MAX as u64 {
        x.powi(n as i32)
    } else {
        x.powf(n as f64)
    }
}

pub fn build_kernel(params: DiscreteQueueParams) -> TransitionKernel {
    TransitionKernel::new(params)
}

impl TransitionKernel {
    pub fn new(params: DiscreteQueueParams) -> Self {
        Self {
            params,
            boundary_spectrum: OnceLock::new(),
        }
    }

    pub fn params(&self) -> DiscreteQueueParams {
        self.params
    }

    pub fn size(&self) -> usize {
        self.params.states()
    }

    pub fn entry(&self, from: usize, to: usize) -> f64 {
        let p = self.params.p();
        let l = self.params.capacity();
        let mut x = 0.0;
        if from > l || to > l {
            return 0.0;
        }
        if to == (from + 1).min(l) {
            x += p;
        }
        if to == from.saturating_sub(1) {
            x += 1.0 - p;
        }
        x
    }

    /// Dense row-major matrix, for inspection and small-size oracles.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// `x K` for a row vector `x` (one step of the distribution).
    pub fn step_distribution(&self, x: &[f64]) -> Vec<f64> {
        let p = self.params.p();
        let l = self.params.capacity();
        let mut y = vec![0.0; l + 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            y[(i + 1).min(l)] += p * xi;
            y[i.saturating_sub(1)] += (1.0 - p) * xi;
        }
        y
    }

    /// `D^{1/2} K D^{-1/2}` with `D = diag(q^l)`: symmetric tridiagonal with
    /// off-diagonal `sqrt(p(1-p))` and boundary holds on the diagonal.
    pub fn symmetrized(&self) -> SymTridiagonal {
        let p = self.params.p();
        let n = self.size();
        let mut diag = vec![0.0; n];
        diag[0] += 1.0 - p;
        diag[n - 1] += p;
        let off = vec![(p * (1.0 - p)).sqrt(); n - 1];
        SymTridiagonal { diag, off }
    }

    /// Eigen-decomposition of the symmetrized kernel tracking the given rows.
    pub fn spectrum_rows(&self, rows: &[usize]) -> Result<TridiagEigen> {
        tridiag_eigen_rows(&self.symmetrized(), rows)
    }

    /// Spectral data at the full-buffer state, computed once.
    pub fn boundary_spectrum(&self) -> Result<&BoundarySpectrum> {
        self.boundary_spectrum
            .get_or_init(|| {
                let l = self.params.capacity();
                let eig = self.spectrum_rows(&[l])?;
                let weights = eig.components[0].iter().map(|c| c * c).collect();
                Ok(BoundarySpectrum {
                    eigenvalues: eig.values,
                    weights,
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `n`-step transition probability `(K^n)[from][to]`.
    pub fn green_function(&self, n: u64, from: usize, to: usize) -> Result<f64> {
        if n <= 64 || !(self.params.p() > 0.0 && self.params.p() < 1.0) {
            self.green_function_power(n, from, to)
        } else {
            self.green_function_spectral(n, from, to)
        }
    }

    /// Repeated one-step propagation; O(n L).
    pub fn green_function_power(&self, n: u64, from: usize, to: usize) -> Result<f64> {
        self.check_states(from, to)?;
        let mut x = vec![0.0; self.size()];
        x[from] = 1.0;
        for _ in 0..n {
            x = self.step_distribution(&x);
        }
        Ok(x[to])
    }

    /// `q^{(to-from)/2} sum_k λ_k^n V[from][k] V[to][k]`; needs `0 < p < 1`.
    pub fn green_function_spectral(&self, n: u64, from: usize, to: usize) -> Result<f64> {
        self.check_states(from, to)?;
        let q = match self.params.q() {
            Some(q) if q > 0.0 => q,
            _ => return Err(invalid("spectral Green's function needs 0 < p < 1")),
        };
        let eig = self.spectrum_rows(&[from, to])?;
        let (rf, rt) = (0, 1);
        let s =
            crate::numerics::compensated_sum((0..eig.values.len()).map(|k| {
                pow_u64(eig.values[k], n) * eig.components[rf][k] * eig.components[rt][k]
            }));
        let scale = ((to as f64 - from as f64) * 0.5 * q.ln()).exp();
        Ok(scale * s)
    }

    fn check_states(&self, from: usize, to: usize) -> Result<()> {
        let l = self.params.capacity();
        if from > l || to > l {
            return Err(invalid(format!(
                "states must lie in 0..={l}, got {from} -> {to}"
            )));
        }
        Ok(())
    }
}
