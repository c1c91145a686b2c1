use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on points per axis.
pub const MAX_GRID: usize = 2001;

/// Spacing of the reference grid `n = 201`, `delta = 0.005`.
const REFERENCE_SPACING: f64 = 0.99 / 200.0;

/// Uniform `n x n` grid on `[delta, 1 - delta]^2`.
///
/// Point `(i, j)` sits at `(r_i, s_j)`; flat index is `i * n + j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub delta: f64,
}

impl GridSpec {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if !(3..=MAX_GRID).contains(&n) {
            return Err(Error::InvalidGrid(format!("n must lie in [3, {MAX_GRID}], got {n}")));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidGrid(format!("delta must lie in (0, 0.5), got {delta}")));
        }
        Ok(Self { n, delta })
    }

    /// Validates a deserialized grid.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.n, self.delta)
    }

    pub fn spacing(&self) -> f64 {
        (1.0 - 2.0 * self.delta) / (self.n - 1) as f64
    }

    pub fn coord(&self, k: usize) -> f64 {
        if k + 1 == self.n {
            1.0 - self.delta
        } else {
            self.delta + k as f64 * self.spacing()
        }
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn point(&self, idx: usize) -> (f64, f64) {
        (self.coord(idx / self.n), self.coord(idx % self.n))
    }

    /// Grid index closest to `(r, s)`.
    pub fn nearest(&self, r: f64, s: f64) -> (usize, usize) {
        let h = self.spacing();
        let snap = |x: f64| (((x - self.delta) / h).round().max(0.0) as usize).min(self.n - 1);
        (snap(r), snap(s))
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.n || j + 1 == self.n
    }

    /// Equality tolerance: `1e-5` on the reference grid, scaled by spacing squared.
    pub fn default_eps(&self) -> f64 {
        let k = self.spacing() / REFERENCE_SPACING;
        1e-5 * k * k
    }
}

/// Strict-concavity threshold on Hessian eigenvalues.
pub const DEFAULT_ETA: f64 = 1e-8;
/// Interior margin of the sampled square.
pub const DEFAULT_DELTA: f64 = 0.005;
