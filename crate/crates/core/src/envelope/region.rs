use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cover::{build_cover, sample, ConcaveCover};
use super::grid::GridSpec;
use super::objective::Surface;
use crate::error::{Error, Result};

/// Boolean mask over the points of a grid, flat-indexed like [`GridSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionMask {
    pub grid: GridSpec,
    pub mask: Vec<bool>,
}

impl RegionMask {
    pub fn new(grid: GridSpec, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "mask of length {} for a grid of {} points",
                mask.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, mask })
    }

    pub fn empty(grid: GridSpec) -> Self {
        Self { grid, mask: vec![false; grid.len()] }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.mask[self.grid.index(i, j)]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.mask.len() as f64
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    fn check_grid(&self, other: &RegionMask) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("masks live on different grids".into()));
        }
        Ok(())
    }

    pub fn and(&self, other: &RegionMask) -> Result<Self> {
        self.check_grid(other)?;
        let mask = self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect();
        Ok(Self { grid: self.grid, mask })
    }

    pub fn or(&self, other: &RegionMask) -> Result<Self> {
        self.check_grid(other)?;
        let mask = self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect();
        Ok(Self { grid: self.grid, mask })
    }

    /// Points set in `self` but not in `other`.
    pub fn minus(&self, other: &RegionMask) -> Result<Self> {
        self.check_grid(other)?;
        let mask = self.mask.iter().zip(&other.mask).map(|(a, b)| *a && !*b).collect();
        Ok(Self { grid: self.grid, mask })
    }

    /// 4-connected component containing `(i, j)`; empty if that point is unset.
    pub fn component(&self, i: usize, j: usize) -> Self {
        let n = self.grid.n;
        let mut out = vec![false; self.mask.len()];
        let start = self.grid.index(i, j);
        if !self.mask[start] {
            return Self { grid: self.grid, mask: out };
        }
        let mut stack = vec![start];
        out[start] = true;
        while let Some(k) = stack.pop() {
            let (a, b) = (k / n, k % n);
            let mut push = |x: usize, y: usize| {
                let q = x * n + y;
                if self.mask[q] && !out[q] {
                    out[q] = true;
                    stack.push(q);
                }
            };
            if a > 0 {
                push(a - 1, b);
            }
            if a + 1 < n {
                push(a + 1, b);
            }
            if b > 0 {
                push(a, b - 1);
            }
            if b + 1 < n {
                push(a, b + 1);
            }
        }
        Self { grid: self.grid, mask: out }
    }

    /// Set points with at least one unset 4-neighbour (or on the grid edge).
    pub fn boundary(&self) -> Self {
        let n = self.grid.n;
        let mask = (0..self.mask.len())
            .map(|k| {
                if !self.mask[k] {
                    return false;
                }
                let (a, b) = (k / n, k % n);
                self.grid.is_edge(a, b)
                    || !self.mask[k - n]
                    || !self.mask[k + n]
                    || !self.mask[k - 1]
                    || !self.mask[k + 1]
            })
            .collect();
        Self { grid: self.grid, mask }
    }
}

/// Grid points where the cover meets the surface: `cover - f <= eps`.
pub fn equality_region<S: Surface + ?Sized>(
    f: &S,
    cover: &ConcaveCover,
    eps: f64,
) -> Result<RegionMask> {
    let grid = *cover.grid();
    let vals = sample(f, &grid)?;
    let mask = vals.iter().zip(cover.grid_values()).map(|(v, c)| c - v <= eps).collect();
    RegionMask::new(grid, mask)
}

/// Eigenvalues `(min, max)` of the central finite-difference Hessian at `(r, s)`.
pub fn hessian_eigenvalues<S: Surface + ?Sized>(f: &S, r: f64, s: f64, h: f64) -> (f64, f64) {
    let f0 = f.value(r, s);
    let frr = (f.value(r + h, s) - 2.0 * f0 + f.value(r - h, s)) / (h * h);
    let fss = (f.value(r, s + h) - 2.0 * f0 + f.value(r, s - h)) / (h * h);
    let frs = (f.value(r + h, s + h) - f.value(r + h, s - h) - f.value(r - h, s + h)
        + f.value(r - h, s - h))
        / (4.0 * h * h);
    let mid = 0.5 * (frr + fss);
    let rad = (0.25 * (frr - fss) * (frr - fss) + frs * frs).sqrt();
    (mid - rad, mid + rad)
}

/// Grid points where both Hessian eigenvalues are below `-eta`.
///
/// The stencil step is the grid spacing, shrunk where needed so the stencil
/// stays inside the open unit square.
pub fn concavity_region<S: Surface + ?Sized>(f: &S, grid: GridSpec, eta: f64) -> RegionMask {
    let h = grid.spacing();
    let mask = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (r, s) = grid.point(k);
            let room = r.min(1.0 - r).min(s).min(1.0 - s);
            let step = h.min(0.99 * room);
            let (_, hi) = hessian_eigenvalues(f, r, s, step);
            hi < -eta
        })
        .collect();
    RegionMask { grid, mask }
}

/// Everything computed for one objective on one grid.
#[derive(Clone, Debug)]
pub struct RegionAnalysis {
    pub cover: ConcaveCover,
    pub equality: RegionMask,
    pub concavity: RegionMask,
    /// Equality points where strict concavity holds.
    pub region: RegionMask,
    /// Equality points that fail the strict-concavity test.
    pub flagged: RegionMask,
}

pub fn analyze<S: Surface + ?Sized>(f: &S, grid: GridSpec, eps: f64, eta: f64) -> Result<RegionAnalysis> {
    let cover = build_cover(f, grid)?;
    let equality = equality_region(f, &cover, eps)?;
    let concavity = concavity_region(f, grid, eta);
    let region = equality.and(&concavity)?;
    let flagged = equality.minus(&concavity)?;
    Ok(RegionAnalysis { cover, equality, concavity, region, flagged })
}

/// Points where the cover equals the surface and the surface is strictly
/// concave: there every block of a mixture must share the barycentric `(r, s)`.
pub fn certified_region<S: Surface + ?Sized>(f: &S, grid: GridSpec, eps: f64, eta: f64) -> Result<RegionMask> {
    Ok(analyze(f, grid, eps, eta)?.region)
}
