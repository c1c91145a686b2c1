use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{hardy_behavior, omega_star, Behavior, HardyPoint};

/// A real function on the `(r, s)` square that can be sampled on a grid.
///
/// `value` must be pure; grid sampling and Hessian stencils call it from
/// several threads and may step slightly outside the sampled square.
pub trait Surface: Sync {
    fn value(&self, r: f64, s: f64) -> f64;
}

/// Wraps a closure as a [`Surface`].
pub struct FnSurface<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Sync> Surface for FnSurface<F> {
    fn value(&self, r: f64, s: f64) -> f64 {
        (self.0)(r, s)
    }
}

/// `Omega(r,s) = sum_k c_k p_k(r,s) + c0` over the Hardy table entries,
/// coefficients in behavior storage order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub coefficients: [f64; 16],
    pub c0: f64,
}

impl Objective {
    pub fn new(coefficients: [f64; 16], c0: f64) -> Self {
        Self { coefficients, c0 }
    }

    /// The Hardy probability `p(+,+|A0,B0)`.
    pub fn omega_star() -> Self {
        let mut c = [0.0; 16];
        c[Behavior::index(0, 0, 0, 0)] = 1.0;
        Self::new(c, 0.0)
    }

    pub fn constant(c0: f64) -> Self {
        Self::new([0.0; 16], c0)
    }

    /// Evaluates the linear form on an arbitrary behavior.
    pub fn on_behavior(&self, b: &Behavior) -> f64 {
        self.coefficients.iter().zip(b.as_array()).map(|(c, p)| c * p).sum::<f64>() + self.c0
    }

    /// `a * self + b * other`; the linear form is linear in its coefficients.
    pub fn combine(&self, a: f64, other: &Objective, b: f64) -> Self {
        let mut c = [0.0; 16];
        for (k, v) in c.iter_mut().enumerate() {
            *v = a * self.coefficients[k] + b * other.coefficients[k];
        }
        Self::new(c, a * self.c0 + b * other.c0)
    }
}

/// Value of an objective on the Hardy table at `pt`.
pub fn eval_objective(obj: &Objective, pt: HardyPoint) -> Result<f64> {
    Ok(obj.on_behavior(&hardy_behavior(pt)?))
}

impl Surface for Objective {
    fn value(&self, r: f64, s: f64) -> f64 {
        hardy_behavior(HardyPoint { r, s }).map_or(f64::NAN, |b| self.on_behavior(&b))
    }
}

/// `Omega_nu = Omega* + nu p(+|A0) + (1 - nu) p(-|A0) - 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuObjective {
    nu: f64,
}

impl NuObjective {
    pub fn new(nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::OutOfDomain(format!("nu must lie in [0, 1], got {nu}")));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// The same function written as coefficients on the table entries.
    pub fn to_objective(&self) -> Objective {
        let nu = self.nu;
        let mut c = [0.0; 16];
        c[Behavior::index(0, 0, 0, 0)] = 1.0 + nu;
        c[Behavior::index(0, 0, 0, 1)] = nu;
        c[Behavior::index(0, 0, 1, 0)] = 1.0 - nu;
        c[Behavior::index(0, 0, 1, 1)] = 1.0 - nu;
        Objective::new(c, -0.5)
    }

    fn closed_form(&self, r: f64, s: f64, star: f64) -> f64 {
        star + self.nu * (s - r * s) + (1.0 - self.nu) * (1.0 - s + r * s) - 0.5
    }
}

/// `Omega*(r,s) + nu (s - rs) + (1 - nu)(1 - s + rs) - 1/2`.
pub fn eval_nu(obj: &NuObjective, pt: HardyPoint) -> Result<f64> {
    Ok(obj.closed_form(pt.r, pt.s, omega_star(pt)?))
}

impl Surface for NuObjective {
    fn value(&self, r: f64, s: f64) -> f64 {
        let d = 1.0 - r * s;
        if d <= 0.0 {
            return f64::NAN;
        }
        self.closed_form(r, s, r * (1.0 - r) * s * (1.0 - s) / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(r: f64, s: f64) -> HardyPoint {
        HardyPoint::new(r, s).unwrap()
    }

    #[test]
    fn omega_star_objective() {
        let v = eval_objective(&Objective::omega_star(), pt(0.5, 0.5)).unwrap();
        assert!((v - 1.0 / 12.0).abs() < 1e-16);
    }

    #[test]
    fn constant_objective() {
        for (r, s) in [(0.1, 0.2), (0.9, 0.4)] {
            assert_eq!(eval_objective(&Objective::constant(0.7), pt(r, s)).unwrap(), 0.7);
        }
    }

    #[test]
    fn nu_values() {
        let p = pt(0.5, 0.5);
        let half = NuObjective::new(0.5).unwrap();
        assert!((eval_nu(&half, p).unwrap() - 1.0 / 12.0).abs() < 1e-16);
        let one = NuObjective::new(1.0).unwrap();
        assert!((eval_nu(&one, p).unwrap() + 1.0 / 6.0).abs() < 1e-15);
        let zero = NuObjective::new(0.0).unwrap();
        assert!((eval_nu(&zero, p).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(NuObjective::new(1.5).is_err());
    }

    #[test]
    fn nu_half_is_omega_star_everywhere() {
        let half = NuObjective::new(0.5).unwrap();
        for i in 1..20 {
            for j in 1..20 {
                let p = pt(i as f64 / 20.0, j as f64 / 20.0);
                let a = eval_nu(&half, p).unwrap();
                assert!((a - omega_star(p).unwrap()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn nu_coefficients_match_closed_form() {
        for nu in [0.0, 0.1, 0.37, 0.9, 1.0] {
            let o = NuObjective::new(nu).unwrap();
            let lin = o.to_objective();
            for (r, s) in [(0.2, 0.3), (0.7, 0.95), (0.5, 0.01)] {
                let a = eval_nu(&o, pt(r, s)).unwrap();
                let b = eval_objective(&lin, pt(r, s)).unwrap();
                assert!((a - b).abs() < 1e-14, "nu={nu} ({r},{s}): {a} vs {b}");
                assert!((o.value(r, s) - a).abs() < 1e-15);
            }
        }
    }
}
