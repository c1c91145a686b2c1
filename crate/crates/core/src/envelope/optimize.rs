use super::cover::sample;
use super::grid::GridSpec;
use super::objective::Surface;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub r: f64,
    pub s: f64,
    pub value: f64,
}

/// Grid search followed by a compass search from the best grid point.
///
/// The search stays inside the open unit square and stops once the step
/// falls below `1e-13`.
pub fn maximize<S: Surface + ?Sized>(f: &S, grid: GridSpec) -> Result<Maximum> {
    let vals = sample(f, &grid)?;
    let best = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    let (mut r, mut s) = grid.point(best);
    let mut value = vals[best];
    let mut step = grid.spacing();
    let inside = |x: f64| x > 0.0 && x < 1.0;
    while step > 1e-13 {
        let mut moved = false;
        for (dr, ds) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            let (nr, ns) = (r + dr * step, s + ds * step);
            if !inside(nr) || !inside(ns) {
                continue;
            }
            let v = f.value(nr, ns);
            if v > value {
                (r, s, value) = (nr, ns, v);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(Maximum { r, s, value })
}
