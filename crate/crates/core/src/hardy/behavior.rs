use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for normalization and nonsignaling of a behavior.
pub const BEHAVIOR_TOL: f64 = 1e-10;

/// Measurement outcome; `Plus` is index 0, `Minus` index 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

/// Context labels in storage order.
pub const CONTEXT_NAMES: [&str; 4] = ["A0B0", "A0B1", "A1B0", "A1B1"];
/// Outcome-pair labels in storage order.
pub const OUTCOME_NAMES: [&str; 4] = ["++", "+-", "-+", "--"];

/// The 16 conditional probabilities `p(a,b|x,y)` of a 2-input/2-output
/// bipartite experiment.
///
/// Storage is x-major, then y, then a, then b, with `+` before `-`:
/// index = 8x + 4y + 2a + b. A `Behavior` may hold malformed data (so that
/// external input can be diagnosed); [`Behavior::new`] validates,
/// [`Behavior::from_raw`] does not.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Behavior {
    p: [f64; 16],
}

impl Behavior {
    pub const fn index(x: usize, y: usize, a: usize, b: usize) -> usize {
        8 * x + 4 * y + 2 * a + b
    }

    /// Validated constructor. Entries within 1e-12 outside `[0, 1]` are clamped.
    pub fn new(mut p: [f64; 16]) -> Result<Self> {
        for v in p.iter_mut() {
            if !v.is_finite() || *v < -1e-12 || *v > 1.0 + 1e-12 {
                return Err(Error::InvalidBehavior(format!("entry {v} outside [0, 1]")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        let b = Self { p };
        b.validate()?;
        Ok(b)
    }

    pub const fn from_raw(p: [f64; 16]) -> Self {
        Self { p }
    }

    pub fn uniform() -> Self {
        Self { p: [0.25; 16] }
    }

    pub fn as_array(&self) -> &[f64; 16] {
        &self.p
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[Self::index(x, y, a, b)]
    }

    pub fn set(&mut self, x: usize, y: usize, a: usize, b: usize, v: f64) {
        self.p[Self::index(x, y, a, b)] = v;
    }

    /// Probabilities of one context in the order `(++, +-, -+, --)`.
    pub fn context(&self, x: usize, y: usize) -> [f64; 4] {
        let k = Self::index(x, y, 0, 0);
        [self.p[k], self.p[k + 1], self.p[k + 2], self.p[k + 3]]
    }

    /// `p(a|x)` as seen from context `(x, y)`.
    pub fn alice_marginal(&self, x: usize, y: usize, a: usize) -> f64 {
        self.get(x, y, a, 0) + self.get(x, y, a, 1)
    }

    /// `p(b|y)` as seen from context `(x, y)`.
    pub fn bob_marginal(&self, x: usize, y: usize, b: usize) -> f64 {
        self.get(x, y, 0, b) + self.get(x, y, 1, b)
    }

    /// Correlator `E_xy = sum_ab ab p(a,b|x,y)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let c = self.context(x, y);
        c[0] - c[1] - c[2] + c[3]
    }

    /// Worst deviation of a context sum from 1.
    pub fn normalization_violation(&self) -> f64 {
        (0..4)
            .map(|k| (self.p[4 * k..4 * k + 4].iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Worst dependence of a local marginal on the remote input.
    pub fn nonsignaling_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for x in 0..2 {
            for a in 0..2 {
                worst = worst.max((self.alice_marginal(x, 0, a) - self.alice_marginal(x, 1, a)).abs());
            }
        }
        for y in 0..2 {
            for b in 0..2 {
                worst = worst.max((self.bob_marginal(0, y, b) - self.bob_marginal(1, y, b)).abs());
            }
        }
        worst
    }

    /// Checks entry range, normalization and nonsignaling.
    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.p.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(Error::InvalidBehavior(format!("entry {v} outside [0, 1]")));
        }
        let norm = self.normalization_violation();
        if norm > BEHAVIOR_TOL {
            return Err(Error::InvalidBehavior(format!("context sum deviates from 1 by {norm:e}")));
        }
        let ns = self.nonsignaling_violation();
        if ns > BEHAVIOR_TOL {
            return Err(Error::InvalidBehavior(format!("nonsignaling violated by {ns:e}")));
        }
        Ok(())
    }

    /// Convex combination `sum_k w_k b_k`.
    pub fn mixture(parts: &[(f64, Behavior)]) -> Self {
        let mut p = [0.0; 16];
        for (w, b) in parts {
            for (acc, v) in p.iter_mut().zip(b.p.iter()) {
                *acc += w * v;
            }
        }
        Self { p }
    }

    pub fn max_abs_diff(&self, other: &Behavior) -> f64 {
        self.p.iter().zip(other.p.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Column labels for the flat CSV layout, e.g. `A0B1+-`.
    pub fn column_names() -> Vec<String> {
        CONTEXT_NAMES
            .iter()
            .flat_map(|c| OUTCOME_NAMES.iter().map(move |o| format!("{c}{o}")))
            .collect()
    }
}

/// Probabilities of one context in the JSON file layout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextTable {
    #[serde(rename = "++")]
    pub pp: f64,
    #[serde(rename = "+-")]
    pub pm: f64,
    #[serde(rename = "-+")]
    pub mp: f64,
    #[serde(rename = "--")]
    pub mm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct Contexts {
    pub A0B0: ContextTable,
    pub A0B1: ContextTable,
    pub A1B0: ContextTable,
    pub A1B1: ContextTable,
}

/// Serialized behavior: `{"schema_version":1,"contexts":{"A0B0":{"++":..}}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub contexts: Contexts,
}

fn default_schema_version() -> u32 {
    1
}

impl From<&Behavior> for BehaviorFile {
    fn from(b: &Behavior) -> Self {
        let t = |x, y| {
            let c = b.context(x, y);
            ContextTable { pp: c[0], pm: c[1], mp: c[2], mm: c[3] }
        };
        BehaviorFile {
            schema_version: 1,
            contexts: Contexts { A0B0: t(0, 0), A0B1: t(0, 1), A1B0: t(1, 0), A1B1: t(1, 1) },
        }
    }
}

impl From<&BehaviorFile> for Behavior {
    fn from(f: &BehaviorFile) -> Self {
        let c = &f.contexts;
        let mut p = [0.0; 16];
        for (k, t) in [c.A0B0, c.A0B1, c.A1B0, c.A1B1].iter().enumerate() {
            p[4 * k..4 * k + 4].copy_from_slice(&[t.pp, t.pm, t.mp, t.mm]);
        }
        Behavior::from_raw(p)
    }
}
