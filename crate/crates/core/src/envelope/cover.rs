use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::hull::{convex_hull, HullError};
use super::objective::Surface;
use crate::error::{Error, Result};

/// Smallest vertical normal component for a hull face to count as upper.
const UPPER_NORMAL_MIN: f64 = 1e-9;

/// One planar piece of the cover: a triangle in `(r, s, value)` space and its
/// plane `value = a r + b s + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub vertices: [[f64; 3]; 3],
    pub plane: [f64; 3],
}

impl Facet {
    pub fn at(&self, r: f64, s: f64) -> f64 {
        self.plane[0] * r + self.plane[1] * s + self.plane[2]
    }

    /// Barycentric coordinates of `(r, s)` in the projected triangle.
    fn barycentric(&self, r: f64, s: f64) -> Option<[f64; 3]> {
        let [a, b, c] = self.vertices;
        let det = (b[1] - c[1]) * (a[0] - c[0]) + (c[0] - b[0]) * (a[1] - c[1]);
        if det.abs() < 1e-300 {
            return None;
        }
        let l0 = ((b[1] - c[1]) * (r - c[0]) + (c[0] - b[0]) * (s - c[1])) / det;
        let l1 = ((c[1] - a[1]) * (r - c[0]) + (a[0] - c[0]) * (s - c[1])) / det;
        Some([l0, l1, 1.0 - l0 - l1])
    }

    fn from_points(vertices: [[f64; 3]; 3]) -> Option<Self> {
        let [a, b, c] = vertices;
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        if n[2].abs() < 1e-300 {
            return None;
        }
        let (pa, pb) = (-n[0] / n[2], -n[1] / n[2]);
        let pc = a[2] - pa * a[0] - pb * a[1];
        Some(Self { vertices, plane: [pa, pb, pc] })
    }
}

/// Piecewise-linear concave envelope of a surface sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcaveCover {
    grid: GridSpec,
    facets: Vec<Facet>,
    values: Vec<f64>,
}

impl ConcaveCover {
    /// Rebuilds a cover from its facet list.
    pub fn from_facets(grid: GridSpec, facets: Vec<Facet>) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::Schema("a cover needs at least one facet".into()));
        }
        let values = rasterize(&grid, &facets);
        Ok(Self { grid, facets, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Cover value at an arbitrary point: the lowest supporting plane.
    pub fn eval(&self, r: f64, s: f64) -> f64 {
        self.facets.iter().map(|f| f.at(r, s)).fold(f64::INFINITY, f64::min)
    }

    /// Cover value at grid point `(i, j)`.
    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Cover values at every grid point, flat-indexed.
    pub fn grid_values(&self) -> &[f64] {
        &self.values
    }
}

/// Samples `f` on the grid, in flat index order.
pub fn sample<S: Surface + ?Sized>(f: &S, grid: &GridSpec) -> Result<Vec<f64>> {
    let vals: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (r, s) = grid.point(k);
            f.value(r, s)
        })
        .collect();
    if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
        let (r, s) = grid.point(k);
        return Err(Error::InvalidGrid(format!("objective is not finite at ({r}, {s})")));
    }
    Ok(vals)
}

/// Concave cover from the upper facets of the convex hull of the lifted grid.
pub fn build_cover<S: Surface + ?Sized>(f: &S, grid: GridSpec) -> Result<ConcaveCover> {
    let vals = sample(f, &grid)?;
    let pts: Vec<[f64; 3]> = (0..grid.len())
        .map(|k| {
            let (r, s) = grid.point(k);
            [r, s, vals[k]]
        })
        .collect();
    let facets = match convex_hull(&pts) {
        Ok(faces) => faces
            .iter()
            .filter(|f| f.normal[2] > UPPER_NORMAL_MIN)
            .filter_map(|f| Facet::from_points(f.vertices.map(|v| pts[v])))
            .collect(),
        Err(HullError::Coplanar(tri)) => {
            // Flat surface: one plane, split over the square's two diagonals.
            let plane = Facet::from_points(tri.map(|v| pts[v]))
                .ok_or_else(|| Error::InvalidGrid("vertical sample plane".into()))?
                .plane;
            let n = grid.n - 1;
            let corner = |i: usize, j: usize| {
                let (r, s) = (grid.coord(i), grid.coord(j));
                [r, s, plane[0] * r + plane[1] * s + plane[2]]
            };
            let (c00, c10, c01, c11) = (corner(0, 0), corner(n, 0), corner(0, n), corner(n, n));
            vec![Facet { vertices: [c00, c10, c11], plane }, Facet { vertices: [c00, c11, c01], plane }]
        }
        Err(e) => return Err(Error::InvalidGrid(format!("hull construction failed: {e:?}"))),
    };
    ConcaveCover::from_facets(grid, facets)
}

fn rasterize(grid: &GridSpec, facets: &[Facet]) -> Vec<f64> {
    let n = grid.n;
    let h = grid.spacing();
    let mut values = vec![f64::INFINITY; grid.len()];
    let idx_range = |lo: f64, hi: f64| {
        let a = ((lo - grid.delta) / h - 1e-6).ceil().max(0.0) as usize;
        let b = (((hi - grid.delta) / h + 1e-6).floor().max(-1.0) + 1.0) as usize;
        (a.min(n), b.min(n))
    };
    const INSIDE_TOL: f64 = 1e-9;
    for f in facets {
        let rmin = f.vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let rmax = f.vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        let smin = f.vertices.iter().map(|v| v[1]).fold(f64::INFINITY, f64::min);
        let smax = f.vertices.iter().map(|v| v[1]).fold(f64::NEG_INFINITY, f64::max);
        let (i0, i1) = idx_range(rmin, rmax);
        let (j0, j1) = idx_range(smin, smax);
        for i in i0..i1 {
            let r = grid.coord(i);
            for j in j0..j1 {
                let s = grid.coord(j);
                if let Some(l) = f.barycentric(r, s) {
                    if l.iter().all(|&x| x >= -INSIDE_TOL) {
                        let k = grid.index(i, j);
                        values[k] = values[k].min(f.at(r, s));
                    }
                }
            }
        }
    }
    // Points missed by every projected triangle fall back to the full minimum.
    for (k, v) in values.iter_mut().enumerate() {
        if !v.is_finite() {
            let (r, s) = grid.point(k);
            *v = facets.iter().map(|f| f.at(r, s)).fold(f64::INFINITY, f64::min);
        }
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::objective::FnSurface;

    #[test]
    fn linear_surface_is_its_own_cover() {
        let g = GridSpec::new(21, 0.05).unwrap();
        let f = FnSurface(|r: f64, s: f64| r + s);
        let c = build_cover(&f, g).unwrap();
        assert_eq!(c.facets().len(), 2);
        for k in 0..g.len() {
            let (r, s) = g.point(k);
            assert!((c.grid_values()[k] - (r + s)).abs() < 1e-12);
        }
        assert!((c.eval(0.33, 0.71) - 1.04).abs() < 1e-12);
    }

    #[test]
    fn concave_surface_is_its_own_cover() {
        let g = GridSpec::new(41, 0.02).unwrap();
        let f = FnSurface(|r: f64, s: f64| -(r - 0.5).powi(2) - (s - 0.5).powi(2));
        let c = build_cover(&f, g).unwrap();
        let h = g.spacing();
        for k in 0..g.len() {
            let (r, s) = g.point(k);
            assert!((c.grid_values()[k] - f.value(r, s)).abs() < 1e-12);
        }
        // Between grid points the facets are chords, below f by O(h^2).
        for &(r, s) in &[(0.3123, 0.4567), (0.5, 0.5), (0.9, 0.1)] {
            let gap = f.value(r, s) - c.eval(r, s);
            assert!((-1e-12..=h * h).contains(&gap), "gap {gap} at ({r},{s})");
        }
    }

    #[test]
    fn convex_surface_cover_is_the_corner_plane() {
        let g = GridSpec::new(15, 0.1).unwrap();
        let f = FnSurface(|r: f64, s: f64| r * r + s * s);
        let c = build_cover(&f, g).unwrap();
        let (a, b) = (0.1, 0.9);
        for k in 0..g.len() {
            let (r, s) = g.point(k);
            let plane = (a + b) * (r + s) - 2.0 * a * b;
            assert!((c.grid_values()[k] - plane).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_surface_is_rejected() {
        let g = GridSpec::new(5, 0.1).unwrap();
        let f = FnSurface(|r: f64, _s: f64| if r > 0.5 { f64::NAN } else { 0.0 });
        assert!(build_cover(&f, g).is_err());
    }
}
