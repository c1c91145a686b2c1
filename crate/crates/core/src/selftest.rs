//! Certification: a behavior goes in, a verdict with the certified state and
//! measurements (or the reason for rejection) comes out.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hardy::{
    angles_from_point, check_hardy_constraints, check_hardy_form, hardy_amplitudes,
    hardy_behavior, is_local, Behavior, BehaviorFile, HardyPoint, MeasurementAngles,
};
use crate::qcore::{behavior_from_model, CVec, C64};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_BOUNDARY_MARGIN: f64 = 1e-4;
pub const CERTIFICATE_SCHEMA_VERSION: u32 = 1;
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const NOTE_PHASES: &str =
    "phases phi and xi are not observable from the behavior; reported as 0";
pub const NOTE_MIXTURE: &str =
    "behavior in quantum-set interior; arises from mixed higher-dimensional states";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Rejected,
    Boundary,
}

/// Options for [`certify_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    /// Per-entry tolerance on the Hardy form and the zero constraints.
    pub tol: f64,
    /// Points closer than this to the edge of the square get a boundary verdict.
    pub boundary_margin: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, boundary_margin: DEFAULT_BOUNDARY_MARGIN }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub verdict: Verdict,
    pub point: Option<HardyPoint>,
    /// Largest entrywise deviation from the Hardy table at `point`; absent
    /// when no table could be rebuilt.
    pub residual: Option<f64>,
    pub hardy_entry_residual: Option<f64>,
    pub p_hardy: f64,
    /// Hardy state amplitudes on `|00>, |01>, |10>, |11>`.
    pub state_amplitudes: Option<[C64; 4]>,
    pub angles: Option<MeasurementAngles>,
    pub chsh_max: Option<f64>,
    pub notes: Vec<String>,
    pub tolerance: f64,
    pub boundary_margin: f64,
    pub behavior: BehaviorFile,
}

impl Certificate {
    fn new(b: &Behavior, opts: CertifyOptions) -> Self {
        Self {
            schema_version: CERTIFICATE_SCHEMA_VERSION,
            toolkit_version: TOOLKIT_VERSION.to_string(),
            verdict: Verdict::Rejected,
            point: None,
            residual: None,
            hardy_entry_residual: None,
            p_hardy: b.as_array()[0],
            state_amplitudes: None,
            angles: None,
            chsh_max: None,
            notes: Vec::new(),
            tolerance: opts.tol,
            boundary_margin: opts.boundary_margin,
            behavior: BehaviorFile::from(b),
        }
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn input_behavior(&self) -> Behavior {
        Behavior::from(&self.behavior)
    }

    /// Process exit code for the verdict: 0 certified, 1 rejected, 3 boundary.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Certified => 0,
            Verdict::Rejected => 1,
            Verdict::Boundary => 3,
        }
    }
}

/// [`certify_with`] at the default tolerance and boundary margin.
pub fn certify(b: &Behavior) -> Certificate {
    certify_with(b, CertifyOptions::default())
}

/// Certifies `b` at tolerance `tol` with the default boundary margin.
pub fn certify_tol(b: &Behavior, tol: f64) -> Certificate {
    certify_with(b, CertifyOptions { tol, ..CertifyOptions::default() })
}

pub fn certify_with(b: &Behavior, opts: CertifyOptions) -> Certificate {
    let mut c = Certificate::new(b, opts);
    if let Err(e) = b.validate() {
        c.notes.push(format!("malformed behavior: {e}"));
        return c;
    }
    let constraints = check_hardy_constraints(b, opts.tol);
    let form = check_hardy_form(b, opts.tol);
    c.point = form.point;
    c.residual = form.residual.is_finite().then_some(form.residual);
    c.hardy_entry_residual = c.residual.map(|_| form.hardy_entry_residual());
    if let Ok(rep) = is_local(b) {
        c.chsh_max = Some(rep.chsh_max);
    }
    if !form.pass {
        if let Some(d) = &form.diagnostic {
            c.notes.push(d.clone());
        }
        if constraints.holds {
            c.notes.push(NOTE_MIXTURE.to_string());
        }
        return c;
    }
    let pt = form.point.expect("a passing form check carries its point");
    if pt.boundary_distance() < opts.boundary_margin {
        c.verdict = Verdict::Boundary;
        c.notes.push(format!(
            "point ({}, {}) lies within {} of the boundary; the state is not certified there",
            pt.r, pt.s, opts.boundary_margin
        ));
        return c;
    }
    if !constraints.holds {
        c.notes.push(format!(
            "Hardy conditions fail: zero entries {:?}, p_Hardy {}",
            constraints.zero_residuals, constraints.p_hardy
        ));
        return c;
    }
    match c.chsh_max {
        Some(v) if v > 2.0 => {}
        Some(v) => {
            c.notes.push(format!("behavior satisfies every CHSH inequality (max {v})"));
            return c;
        }
        None => {
            c.notes.push("locality test unavailable".to_string());
            return c;
        }
    }
    let (amps, angles) = match (hardy_amplitudes(pt, 0.0, 0.0), angles_from_point(pt, 0.0, 0.0)) {
        (Ok(a), Ok(g)) => (a, g),
        (Err(e), _) | (_, Err(e)) => {
            c.notes.push(format!("state reconstruction failed: {e}"));
            return c;
        }
    };
    c.state_amplitudes = Some(amps);
    c.angles = Some(angles);
    c.notes.push(NOTE_PHASES.to_string());
    c.verdict = Verdict::Certified;
    c
}

/// Behavior predicted by a certificate's state and angles via the Born rule.
pub fn reconstruct_behavior(c: &Certificate) -> Result<Option<Behavior>> {
    let (Some(amps), Some(angles)) = (c.state_amplitudes, c.angles) else {
        return Ok(None);
    };
    let psi = CVec::new(amps.to_vec())?;
    let (alice, bob) = angles.observables()?;
    Ok(Some(behavior_from_model(&psi.projector(), &alice, &bob)?))
}

/// Rebuilds the behavior from the certified point and from the state and
/// angles; true iff both match the recorded input within the tolerance.
pub fn certificate_roundtrip_check(c: &Certificate) -> bool {
    if !c.is_certified() {
        return false;
    }
    let Some(pt) = c.point else { return false };
    let Some(amps) = c.state_amplitudes else { return false };
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return false;
    }
    let input = c.input_behavior();
    let from_point = match hardy_behavior(pt) {
        Ok(b) => b,
        Err(_) => return false,
    };
    let from_state = match reconstruct_behavior(c) {
        Ok(Some(b)) => b,
        _ => return false,
    };
    input.max_abs_diff(&from_point) <= c.tolerance && input.max_abs_diff(&from_state) <= c.tolerance
}
