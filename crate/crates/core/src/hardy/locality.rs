use serde::{Deserialize, Serialize};

use super::behavior::{Behavior, BEHAVIOR_TOL};
use crate::error::{Error, Result};

/// Slack allowed above the local bound of 2.
pub const LOCAL_BOUND_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub local: bool,
    /// Largest of the eight CHSH expressions.
    pub chsh_max: f64,
    /// `[E00, E01, E10, E11]`.
    pub correlators: [f64; 4],
}

/// The eight CHSH expressions `|s00 E00 + s01 E01 + s10 E10 + s11 E11|` with
/// an odd number of minus signs, in a fixed order.
pub fn chsh_values(b: &Behavior) -> [f64; 8] {
    let e = [b.correlator(0, 0), b.correlator(0, 1), b.correlator(1, 0), b.correlator(1, 1)];
    let mut out = [0.0; 8];
    let mut k = 0;
    for mask in 0u8..16 {
        if mask.count_ones() % 2 == 1 {
            let v: f64 = (0..4)
                .map(|i| if mask & (1 << i) != 0 { -e[i] } else { e[i] })
                .sum();
            out[k] = v.abs();
            k += 1;
        }
    }
    out
}

/// Membership in the local polytope of the 2-input/2-output scenario.
///
/// For nonsignaling behaviors the facets are the positivity constraints and
/// the eight CHSH inequalities, so the test is exact up to [`LOCAL_BOUND_TOL`].
pub fn is_local(b: &Behavior) -> Result<LocalityReport> {
    let ns = b.nonsignaling_violation();
    if ns > BEHAVIOR_TOL {
        return Err(Error::InvalidBehavior(format!(
            "locality test needs a nonsignaling behavior; violation {ns:e}"
        )));
    }
    let chsh_max = chsh_values(b).into_iter().fold(0.0, f64::max);
    Ok(LocalityReport {
        local: chsh_max <= 2.0 + LOCAL_BOUND_TOL,
        chsh_max,
        correlators: [b.correlator(0, 0), b.correlator(0, 1), b.correlator(1, 0), b.correlator(1, 1)],
    })
}
