//! Closed-form Hardy parametrization: `(r, s)` to angles, state and behavior,
//! plus the checks a black-box experiment runs on recorded statistics.

mod behavior;
mod locality;
mod point;

pub use behavior::{
    Behavior, BehaviorFile, ContextTable, Contexts, Outcome, BEHAVIOR_TOL, CONTEXT_NAMES,
    OUTCOME_NAMES,
};
pub use locality::{chsh_values, is_local, LocalityReport, LOCAL_BOUND_TOL};
pub use point::{
    angles_from_point, half_angle, hardy_amplitudes, hardy_state, max_hardy_probability,
    point_from_angles, rotated_basis, HardyPoint, MeasurementAngles, GOLDEN,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Default tolerance for the zero constraints on simulated or external data.
pub const DEFAULT_CONSTRAINT_TOL: f64 = 1e-9;

/// Indices of the three entries the Hardy test requires to vanish:
/// `p(+,-|A0,B1)`, `p(-,+|A1,B0)`, `p(+,+|A1,B1)`.
pub const ZERO_ENTRIES: [usize; 3] =
    [Behavior::index(0, 1, 0, 1), Behavior::index(1, 0, 1, 0), Behavior::index(1, 1, 0, 0)];
/// Index of `p(+,+|A0,B0)`, the Hardy probability.
pub const HARDY_ENTRY: usize = Behavior::index(0, 0, 0, 0);
/// Index of `p(-,-|A0,B0)`, which records `r`.
pub const R_ENTRY: usize = Behavior::index(0, 0, 1, 1);
/// Index of `p(-,-|A1,B0)`, which records `s`.
pub const S_ENTRY: usize = Behavior::index(1, 0, 1, 1);

/// The full Hardy behavior table for `(r, s)`, zero constraints exact.
pub fn hardy_behavior(pt: HardyPoint) -> Result<Behavior> {
    let d = pt.denom()?;
    let (r, s) = (pt.r, pt.s);
    let p = [
        // A0B0
        (1.0 - r) * r * (1.0 - s) * s / d,
        (1.0 - r) * (1.0 - r) * s / d,
        (1.0 - r) * (1.0 - s),
        r,
        // A0B1
        (1.0 - r) * s,
        0.0,
        (1.0 - r) * r * s * s / d,
        (1.0 - s) / d,
        // A1B0
        (1.0 - r) * (1.0 - s) / d,
        r * (1.0 - s) * (1.0 - s) / d,
        0.0,
        s,
        // A1B1
        0.0,
        1.0 - s,
        (1.0 - r) * s / d,
        r * (1.0 - s) * s / d,
    ];
    Ok(Behavior::from_raw(p))
}

/// `p(+,+|A0,B0) = r(1-r)s(1-s)/(1-rs)`.
pub fn omega_star(pt: HardyPoint) -> Result<f64> {
    let d = pt.denom()?;
    Ok(pt.r * (1.0 - pt.r) * pt.s * (1.0 - pt.s) / d)
}

/// Outcome of the Hardy conditions on a behavior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub holds: bool,
    pub p_hardy: f64,
    /// Values of the three entries required to vanish, in [`ZERO_ENTRIES`] order.
    pub zero_residuals: [f64; 3],
}

/// True iff the three zero entries are `<= tol` and `p(+,+|A0,B0) > tol`.
pub fn check_hardy_constraints(b: &Behavior, tol: f64) -> ConstraintReport {
    let p = b.as_array();
    let zero_residuals = ZERO_ENTRIES.map(|k| p[k]);
    let p_hardy = p[HARDY_ENTRY];
    ConstraintReport {
        holds: zero_residuals.iter().all(|&v| v <= tol) && p_hardy > tol,
        p_hardy,
        zero_residuals,
    }
}

/// Result of comparing a behavior to the Hardy table at its recorded `(r, s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormReport {
    pub pass: bool,
    /// `(r, s)` read from `p(-,-|A0,B0)` and `p(-,-|A1,B0)`; `None` when out of range.
    pub point: Option<HardyPoint>,
    /// Largest entrywise deviation from the rebuilt table (infinite if no rebuild).
    pub residual: f64,
    /// Per-entry absolute deviations in storage order.
    pub residuals: [f64; 16],
    /// Storage index of the worst entry.
    pub worst_entry: usize,
    pub diagnostic: Option<String>,
}

impl FormReport {
    /// Deviation on the Hardy probability entry alone.
    pub fn hardy_entry_residual(&self) -> f64 {
        self.residuals[HARDY_ENTRY]
    }

    fn failed(point: Option<HardyPoint>, msg: String) -> Self {
        Self {
            pass: false,
            point,
            residual: f64::INFINITY,
            residuals: [f64::INFINITY; 16],
            worst_entry: 0,
            diagnostic: Some(msg),
        }
    }
}

/// Reads `(r, s)` off the two designated entries, rebuilds the table and
/// reports the worst entrywise mismatch.
pub fn check_hardy_form(b: &Behavior, tol: f64) -> FormReport {
    let p = b.as_array();
    let (r, s) = (p[R_ENTRY], p[S_ENTRY]);
    let point = match HardyPoint::new(r, s) {
        Ok(pt) => pt,
        Err(e) => return FormReport::failed(None, format!("extracted point invalid: {e}")),
    };
    let table = match hardy_behavior(point) {
        Ok(t) => t,
        Err(e) => return FormReport::failed(Some(point), e.to_string()),
    };
    let mut residuals = [0.0; 16];
    for (k, out) in residuals.iter_mut().enumerate() {
        *out = (p[k] - table.as_array()[k]).abs();
    }
    let (worst_entry, residual) = residuals
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (k, v)| if v > acc.1 || v.is_nan() { (k, v) } else { acc });
    let pass = residual <= tol;
    let diagnostic = (!pass).then(|| {
        let names = Behavior::column_names();
        format!("entry {} deviates from the Hardy table by {residual:e}", names[worst_entry])
    });
    FormReport { pass, point: Some(point), residual, residuals, worst_entry, diagnostic }
}
