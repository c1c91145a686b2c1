use rayon::prelude::*;

use super::grid::GridSpec;
use super::objective::NuObjective;
use super::region::{certified_region, RegionMask};
use crate::error::{Error, Result};

/// Certified region for one member of the family.
#[derive(Clone, Debug)]
pub struct NuRegion {
    pub nu: f64,
    pub mask: RegionMask,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub n: usize,
    pub members: Vec<NuRegion>,
    pub union: RegionMask,
}

impl SweepResult {
    /// Fraction of grid points inside the union.
    pub fn coverage(&self) -> f64 {
        self.union.fraction()
    }

    pub fn summary(&self) -> String {
        format!("N={} coverage={}", self.n, self.coverage())
    }
}

/// The family members `nu = k/N`, `k = 1..N-1`.
pub fn nu_values(n: usize) -> Vec<f64> {
    (1..n).map(|k| k as f64 / n as f64).collect()
}

/// Union of the certified regions of `Omega_nu` over `nu = k/N`, `k = 1..N-1`.
pub fn sweep_union(n: usize, grid: GridSpec, eps: f64, eta: f64) -> Result<SweepResult> {
    if n < 2 {
        return Err(Error::OutOfDomain(format!("N must be at least 2, got {n}")));
    }
    let members = nu_values(n)
        .into_par_iter()
        .map(|nu| {
            let mask = certified_region(&NuObjective::new(nu)?, grid, eps, eta)?;
            Ok(NuRegion { nu, mask })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut union = RegionMask::empty(grid);
    for m in &members {
        union = union.or(&m.mask)?;
    }
    Ok(SweepResult { n, members, union })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::objective::Objective;

    #[test]
    fn two_is_the_single_omega_star_region() {
        let g = GridSpec::new(41, 0.02).unwrap();
        let eps = g.default_eps();
        let sw = sweep_union(2, g, eps, 1e-8).unwrap();
        assert_eq!(sw.members.len(), 1);
        let star = certified_region(&Objective::omega_star(), g, eps, 1e-8).unwrap();
        let diff = sw.union.mask.iter().zip(&star.mask).filter(|(a, b)| a != b).count();
        assert!(diff <= g.len() / 100, "{diff} points differ");
        assert!(sw.summary().starts_with("N=2 coverage="));
    }

    #[test]
    fn rejects_small_n() {
        let g = GridSpec::new(11, 0.02).unwrap();
        assert!(sweep_union(1, g, 1e-5, 1e-8).is_err());
        assert_eq!(nu_values(4), vec![0.25, 0.5, 0.75]);
    }
}
