//! Concave covers of objectives over the `(r, s)` square and the regions
//! where they certify rigidity.

pub mod cover;
pub mod grid;
pub mod hull;
pub mod objective;
pub mod optimize;
pub mod region;
pub mod sweep;

pub use cover::{build_cover, sample, ConcaveCover, Facet};
pub use grid::{GridSpec, DEFAULT_DELTA, DEFAULT_ETA, MAX_GRID};
pub use objective::{eval_nu, eval_objective, FnSurface, NuObjective, Objective, Surface};
pub use optimize::{maximize, Maximum};
pub use region::{
    analyze, concavity_region, equality_region, hessian_eigenvalues, certified_region, RegionAnalysis,
    RegionMask,
};
pub use sweep::{nu_values, sweep_union, NuRegion, SweepResult};
