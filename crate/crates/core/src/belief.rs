//! Gaussian-process belief over the workspace: squared-exponential kernel,
//! incremental Cholesky updates, and the posterior statistics that feed the
//! sampling objective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Squared-exponential kernel hyperparameters. When `time_lengthscale` is
/// set, the last input coordinate is treated as time and scaled by it
/// instead of the spatial lengthscale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub lengthscale: f64,
    pub signal_variance: f64,
    pub noise_variance: f64,
    #[serde(default)]
    pub time_lengthscale: Option<f64>,
}

impl KernelParams {
    pub fn new(lengthscale: f64, signal_variance: f64, noise_variance: f64) -> Result<Self> {
        let p = Self {
            lengthscale,
            signal_variance,
            noise_variance,
            time_lengthscale: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_time_lengthscale(mut self, time_lengthscale: f64) -> Self {
        self.time_lengthscale = Some(time_lengthscale);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lengthscale > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "lengthscale {} must be > 0",
                self.lengthscale
            )));
        }
        if !(self.signal_variance > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "signal_variance {} must be > 0",
                self.signal_variance
            )));
        }
        if !(self.noise_variance >= 0.0) {
            return Err(Error::InvalidKernel(format!(
                "noise_variance {} must be >= 0",
                self.noise_variance
            )));
        }
        if let Some(tl) = self.time_lengthscale {
            if !(tl > 0.0) {
                return Err(Error::InvalidKernel(format!("time_lengthscale {tl} must be > 0")));
            }
        }
        Ok(())
    }

    /// k(a, b) = signal_variance * exp(-sum_i ((a_i - b_i) / l_i)^2 / 2)
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let last = a.len().saturating_sub(1);
        let mut sq = 0.0;
        for i in 0..a.len() {
            let l = match self.time_lengthscale {
                Some(tl) if i == last && a.len() > 1 => tl,
                _ => self.lengthscale,
            };
            let d = (a[i] - b[i]) / l;
            sq += d * d;
        }
        self.signal_variance * (-0.5 * sq).exp()
    }
}

/// Posterior mean and standard deviation at a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorStats {
    pub mean: f64,
    pub std: f64,
}

// Relative pivot tolerance below which the Gram extension is declared
// singular (a duplicate point with zero noise lands here).
const PIVOT_REL_TOL: f64 = 1e-12;

/// Gaussian-process belief. Operations return new values; an existing
/// belief is never mutated, so previously returned posteriors stay valid.
#[derive(Debug, Clone)]
pub struct GPBelief {
    kernel: KernelParams,
    bounds: Vec<(f64, f64)>,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    /// Packed row-major lower-triangular Cholesky factor of K + noise*I.
    chol: Vec<f64>,
    /// (K + noise*I)^{-1} y, kept in sync with the factor.
    weights: Vec<f64>,
}

impl GPBelief {
    pub fn new(kernel: KernelParams, bounds: Vec<(f64, f64)>) -> Result<Self> {
        kernel.validate()?;
        for (lo, hi) in &bounds {
            if !(lo < hi) {
                return Err(Error::Domain(format!(
                    "bound ({lo}, {hi}) must satisfy min < max"
                )));
            }
        }
        Ok(Self {
            kernel,
            bounds,
            inputs: Vec::new(),
            targets: Vec::new(),
            chol: Vec::new(),
            weights: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn kernel(&self) -> &KernelParams {
        &self.kernel
    }

    fn check_bounds(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.bounds.len() {
            return Err(Error::Domain(format!(
                "point has {} coordinates, workspace has {}",
                point.len(),
                self.bounds.len()
            )));
        }
        for (x, (lo, hi)) in point.iter().zip(&self.bounds) {
            if x < lo || x > hi {
                return Err(Error::OutOfBounds {
                    point: point.to_vec(),
                });
            }
        }
        Ok(())
    }

    /// New belief containing the extra (point, value) pair; the Cholesky
    /// factor is extended by one row rather than recomputed.
    pub fn add_observation(&self, point: &[f64], value: f64) -> Result<GPBelief> {
        self.check_bounds(point)?;
        let n = self.len();
        let mut next = self.clone();

        // new Gram row and forward-substituted head of the Cholesky row
        let k_vec: Vec<f64> = (0..n).map(|j| self.kernel.eval(point, &self.inputs[j])).collect();
        let mut row = vec![0.0; n + 1];
        for j in 0..n {
            let mut s = k_vec[j];
            for (m, &r) in row.iter().enumerate().take(j) {
                s -= r * self.chol[tri_index(j, m)];
            }
            row[j] = s / self.chol[tri_index(j, j)];
        }
        let diag = self.kernel.eval(point, point) + self.kernel.noise_variance;
        let pivot_sq = diag - row.iter().take(n).map(|r| r * r).sum::<f64>();
        let tol = PIVOT_REL_TOL * (self.kernel.signal_variance + self.kernel.noise_variance);
        if pivot_sq <= tol {
            return Err(Error::IllConditioned { pivot: pivot_sq });
        }
        row[n] = pivot_sq.sqrt();

        next.inputs.push(point.to_vec());
        next.targets.push(value);
        next.chol.extend_from_slice(&row);
        next.refresh_weights();
        Ok(next)
    }

    // weights = (K + noise I)^{-1} y via the two triangular solves
    fn refresh_weights(&mut self) {
        let n = self.len();
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut s = self.targets[i];
            for j in 0..i {
                s -= self.chol[tri_index(i, j)] * z[j];
            }
            z[i] = s / self.chol[tri_index(i, i)];
        }
        let mut w = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = z[i];
            for j in (i + 1)..n {
                s -= self.chol[tri_index(j, i)] * w[j];
            }
            w[i] = s / self.chol[tri_index(i, i)];
        }
        self.weights = w;
    }

    /// GP regression posterior at `point`; the empty belief returns the
    /// prior (mean 0, std sqrt(signal_variance)).
    pub fn posterior(&self, point: &[f64]) -> Result<PosteriorStats> {
        self.check_bounds(point)?;
        let n = self.len();
        if n == 0 {
            return Ok(PosteriorStats {
                mean: 0.0,
                std: self.kernel.signal_variance.sqrt(),
            });
        }
        let k_star: Vec<f64> = (0..n).map(|j| self.kernel.eval(point, &self.inputs[j])).collect();
        let mean: f64 = k_star.iter().zip(&self.weights).map(|(k, w)| k * w).sum();
        // v = L^{-1} k*, var = k(x,x) - v.v
        let mut v = vec![0.0; n];
        for i in 0..n {
            let mut s = k_star[i];
            for j in 0..i {
                s -= self.chol[tri_index(i, j)] * v[j];
            }
            v[i] = s / self.chol[tri_index(i, i)];
        }
        let var = (self.kernel.eval(point, point) - v.iter().map(|x| x * x).sum::<f64>()).max(0.0);
        Ok(PosteriorStats {
            mean,
            std: var.sqrt(),
        })
    }

    /// Independent copy for simulation-local updates.
    pub fn fork(&self) -> GPBelief {
        self.clone()
    }

    /// Training pairs, mainly for diagnostics and tests.
    pub fn observations(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.inputs
            .iter()
            .map(|p| p.as_slice())
            .zip(self.targets.iter().copied())
    }
}

/// The sampling reward mu + c * sigma at a posterior.
pub fn objective_reward(stats: &PosteriorStats, c: f64) -> f64 {
    stats.mean + c * stats.std
}

#[inline]
fn tri_index(row: usize, col: usize) -> usize {
    row * (row + 1) / 2 + col
}
