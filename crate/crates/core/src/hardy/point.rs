use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{CVec, ObservablePair, C64};

/// `(sqrt(5) - 1) / 2`, the coordinate of the maximal Hardy violation.
pub const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// `(-11 + 5 sqrt(5)) / 2`, the largest quantum value of `p(+,+|A0,B0)`
/// under the Hardy constraints.
pub fn max_hardy_probability() -> f64 {
    (-11.0 + 5.0 * 5f64.sqrt()) / 2.0
}

/// The pair `(r, s)` with `r = p(-,-|A0,B0)` and `s = p(-,-|A1,B0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyPoint {
    pub r: f64,
    pub s: f64,
}

impl HardyPoint {
    /// Accepts any point of the closed unit square.
    pub fn new(r: f64, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::OutOfDomain(format!("r out of range: {r}")));
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfDomain(format!("s out of range: {s}")));
        }
        Ok(Self { r, s })
    }

    pub fn golden() -> Self {
        Self { r: GOLDEN, s: GOLDEN }
    }

    /// Strictly inside `(0,1) x (0,1)`, where the behavior is nonlocal.
    pub fn is_interior(&self) -> bool {
        self.r > 0.0 && self.r < 1.0 && self.s > 0.0 && self.s < 1.0
    }

    /// Distance to the boundary of the unit square.
    pub fn boundary_distance(&self) -> f64 {
        self.r.min(1.0 - self.r).min(self.s).min(1.0 - self.s)
    }

    pub(crate) fn denom(&self) -> Result<f64> {
        let d = 1.0 - self.r * self.s;
        if d <= 0.0 {
            return Err(Error::Degenerate(format!(
                "r*s = 1 at ({}, {}); the Hardy table is undefined",
                self.r, self.s
            )));
        }
        Ok(d)
    }
}

/// Measurement angles of the canonical Hardy settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAngles {
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
    pub xi: f64,
}

/// `(cos(z/2), sin(z/2))`.
pub fn half_angle(z: f64) -> (f64, f64) {
    let (s, c) = (z / 2.0).sin_cos();
    (c, s)
}

impl MeasurementAngles {
    pub fn new(alpha: f64, beta: f64, phi: f64, xi: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..=PI).contains(&v) {
                return Err(Error::OutOfDomain(format!("{name} must lie in [0, pi], got {v}")));
            }
        }
        for (name, v) in [("phi", phi), ("xi", xi)] {
            if !v.is_finite() {
                return Err(Error::OutOfDomain(format!("{name} must be finite")));
            }
        }
        Ok(Self { alpha, beta, phi: wrap_phase(phi), xi: wrap_phase(xi) })
    }

    pub fn tan_alpha(&self) -> f64 {
        (self.alpha / 2.0).tan()
    }

    pub fn tan_beta(&self) -> f64 {
        (self.beta / 2.0).tan()
    }

    /// Alice's `A0`, `A1` and Bob's `B0`, `B1` on one qubit each.
    pub fn observables(&self) -> Result<([ObservablePair; 2], [ObservablePair; 2])> {
        let z = ObservablePair::parity(2)?;
        let a1 = rotated_pair(self.alpha, self.phi)?;
        let b1 = rotated_pair(self.beta, self.xi)?;
        Ok(([z.clone(), a1], [z, b1]))
    }
}

fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI { 0.0 } else { w }
}

/// Basis `u0 = C|0> + e^{i phase} S|1>`, `u1 = -S|0> + e^{i phase} C|1>` as qubit vectors.
pub fn rotated_basis(theta: f64, phase: f64) -> [[C64; 2]; 2] {
    let (c, s) = half_angle(theta);
    let e = C64::from_polar(1.0, phase);
    [[C64::new(c, 0.0), e * s], [C64::new(-s, 0.0), e * c]]
}

fn rotated_pair(theta: f64, phase: f64) -> Result<ObservablePair> {
    let [u0, u1] = rotated_basis(theta, phase);
    ObservablePair::from_basis(&CVec::new(u0.to_vec())?, &CVec::new(u1.to_vec())?)
}

/// Angles realizing a Hardy point; `phi`, `xi` are passed through.
pub fn angles_from_point(pt: HardyPoint, phi: f64, xi: f64) -> Result<MeasurementAngles> {
    let d = pt.denom()?;
    let alpha = 2.0 * d.sqrt().min(1.0).asin();
    let beta = 2.0 * ((1.0 - pt.r) / d).sqrt().min(1.0).asin();
    MeasurementAngles::new(alpha, beta, phi, xi)
}

/// `r = 1 - S_a^2 S_b^2`, `s = C_a^2 / r`.
pub fn point_from_angles(ang: &MeasurementAngles) -> Result<HardyPoint> {
    let (ca, sa) = half_angle(ang.alpha);
    let (_, sb) = half_angle(ang.beta);
    let r = 1.0 - sa * sa * sb * sb;
    if r <= 0.0 {
        return Err(Error::Degenerate("alpha = beta = pi gives r = 0; s is undefined".into()));
    }
    let s = (ca * ca / r).clamp(0.0, 1.0);
    HardyPoint::new(r.clamp(0.0, 1.0), s)
}

/// Standard-basis amplitudes of the Hardy state for an interior point.
pub fn hardy_amplitudes(pt: HardyPoint, phi: f64, xi: f64) -> Result<[C64; 4]> {
    if !pt.is_interior() {
        return Err(Error::OutOfDomain(format!(
            "Hardy state requires an interior point, got ({}, {})",
            pt.r, pt.s
        )));
    }
    let d = pt.denom()?;
    let (r, s) = (pt.r, pt.s);
    let a00 = -((1.0 - r) * r * (1.0 - s) * s / d).sqrt();
    let a01 = -((1.0 - r) * (1.0 - r) * s / d).sqrt();
    let a10 = -((1.0 - r) * (1.0 - s)).sqrt();
    let a11 = r.sqrt();
    Ok([
        C64::new(a00, 0.0),
        C64::from_polar(1.0, xi) * a01,
        C64::from_polar(1.0, phi) * a10,
        C64::from_polar(1.0, phi + xi) * a11,
    ])
}

/// The two-qubit Hardy state `|psi(r,s)>`.
pub fn hardy_state(pt: HardyPoint, phi: f64, xi: f64) -> Result<CVec> {
    CVec::state(hardy_amplitudes(pt, phi, xi)?.to_vec())
}
