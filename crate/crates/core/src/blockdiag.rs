//! Black-box models in Jordan form: weighted direct sums of two-qubit Hardy
//! blocks, the rigidity check on their statistics, and the local isometry
//! that pulls the Hardy state out of a common-point model.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{
    angles_from_point, check_hardy_form, hardy_amplitudes, hardy_behavior, hardy_state,
    point_from_angles, rotated_basis, Behavior, FormReport, HardyPoint, MeasurementAngles,
};
use crate::qcore::{behavior_from_model, fidelity, partial_trace, CMat, CVec, ObservablePair, C64};

/// Tolerance on `sum mu = 1`.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Tolerance when checking listed block points against the per-party angles.
pub const ANGLE_CONSISTENCY_TOL: f64 = 1e-9;
/// Largest local dimension `build_global_model` will construct.
pub const MAX_LOCAL_DIM: usize = 16;

/// One `H_A^i (x) H_B^j` block of the model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub i: usize,
    pub j: usize,
    pub mu: f64,
    pub point: HardyPoint,
    pub angles: MeasurementAngles,
}

/// A full `n_a x n_b` grid of blocks with one Alice angle per row and one Bob
/// angle per column. Blocks with zero weight still carry their point.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockModel {
    n_a: usize,
    n_b: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    phi: f64,
    xi: f64,
    blocks: Vec<Block>,
}

/// Serialized block entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub i: usize,
    pub j: usize,
    pub mu: f64,
    pub r: f64,
    pub s: f64,
}

/// On-disk form of a [`BlockModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockModelFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub blocks: Vec<BlockEntry>,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub xi: f64,
}

fn default_schema_version() -> u32 {
    1
}

fn check_weights(mu: &[f64]) -> Result<()> {
    if let Some(m) = mu.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
        return Err(Error::InvalidModel(format!("block weight {m} is negative or not finite")));
    }
    let total: f64 = mu.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidModel(format!("block weights sum to {total}, not 1")));
    }
    Ok(())
}

fn check_dims(n_a: usize, n_b: usize) -> Result<()> {
    if n_a == 0 || n_b == 0 {
        return Err(Error::InvalidModel("a model needs at least one block per party".into()));
    }
    if 2 * n_a > MAX_LOCAL_DIM || 2 * n_b > MAX_LOCAL_DIM {
        return Err(Error::InvalidModel(format!(
            "local dimension {} exceeds the cap {MAX_LOCAL_DIM}",
            2 * n_a.max(n_b)
        )));
    }
    Ok(())
}

impl BlockModel {
    /// Builds a model from per-party angles and row-major weights `mu[i * n_b + j]`.
    pub fn from_angles(alpha: &[f64], beta: &[f64], mu: &[f64], phi: f64, xi: f64) -> Result<Self> {
        let (n_a, n_b) = (alpha.len(), beta.len());
        check_dims(n_a, n_b)?;
        if mu.len() != n_a * n_b {
            return Err(Error::InvalidModel(format!(
                "{} weights for {n_a}x{n_b} blocks",
                mu.len()
            )));
        }
        check_weights(mu)?;
        let mut blocks = Vec::with_capacity(mu.len());
        for (i, &a) in alpha.iter().enumerate() {
            for (j, &b) in beta.iter().enumerate() {
                let angles = MeasurementAngles::new(a, b, phi, xi)?;
                let point = point_from_angles(&angles)?;
                blocks.push(Block { i, j, mu: mu[i * n_b + j], point, angles });
            }
        }
        let (phi, xi) = (blocks[0].angles.phi, blocks[0].angles.xi);
        Ok(Self { n_a, n_b, alpha: alpha.to_vec(), beta: beta.to_vec(), phi, xi, blocks })
    }

    /// Builds a model from listed blocks. Each row must list at least one
    /// block (fixing `alpha_i`) and so must each column; unlisted blocks get
    /// zero weight and the point implied by their row and column angles.
    pub fn from_blocks(entries: &[BlockEntry], phi: f64, xi: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidModel("no blocks listed".into()));
        }
        let n_a = entries.iter().map(|e| e.i).max().unwrap_or(0) + 1;
        let n_b = entries.iter().map(|e| e.j).max().unwrap_or(0) + 1;
        check_dims(n_a, n_b)?;
        let mut mu = vec![0.0; n_a * n_b];
        let mut seen = vec![false; n_a * n_b];
        let mut alpha = vec![None; n_a];
        let mut beta = vec![None; n_b];
        for e in entries {
            let k = e.i * n_b + e.j;
            if seen[k] {
                return Err(Error::InvalidModel(format!("block ({}, {}) listed twice", e.i, e.j)));
            }
            seen[k] = true;
            let pt = HardyPoint::new(e.r, e.s)
                .map_err(|err| Error::InvalidModel(format!("block ({}, {}): {err}", e.i, e.j)))?;
            if !pt.is_interior() {
                return Err(Error::InvalidModel(format!(
                    "block ({}, {}) at ({}, {}) is not interior",
                    e.i, e.j, e.r, e.s
                )));
            }
            let ang = angles_from_point(pt, phi, xi)?;
            alpha[e.i].get_or_insert(ang.alpha);
            beta[e.j].get_or_insert(ang.beta);
            mu[k] = e.mu;
        }
        let missing = |v: &[Option<f64>], who: &str| {
            v.iter().position(Option::is_none).map(|k| {
                Error::InvalidModel(format!("{who} block {k} has no listed entry to fix its angle"))
            })
        };
        if let Some(e) = missing(&alpha, "Alice").or_else(|| missing(&beta, "Bob")) {
            return Err(e);
        }
        let alpha: Vec<f64> = alpha.into_iter().flatten().collect();
        let beta: Vec<f64> = beta.into_iter().flatten().collect();
        let model = Self::from_angles(&alpha, &beta, &mu, phi, xi)?;
        for e in entries {
            let b = model.block(e.i, e.j);
            let dev = (b.point.r - e.r).abs().max((b.point.s - e.s).abs());
            if dev > ANGLE_CONSISTENCY_TOL {
                return Err(Error::InvalidModel(format!(
                    "block ({}, {}) at ({}, {}) is inconsistent with the angles of its row and \
                     column, which give ({}, {})",
                    e.i, e.j, e.r, e.s, b.point.r, b.point.s
                )));
            }
        }
        Ok(model)
    }

    /// Every block at `pt`, weights given row-major.
    pub fn common_point(pt: HardyPoint, n_a: usize, n_b: usize, mu: &[f64], phi: f64, xi: f64) -> Result<Self> {
        let ang = angles_from_point(pt, phi, xi)?;
        Self::from_angles(&vec![ang.alpha; n_a], &vec![ang.beta; n_b], mu, phi, xi)
    }

    pub fn from_file(f: &BlockModelFile) -> Result<Self> {
        Self::from_blocks(&f.blocks, f.phi, f.xi)
    }

    pub fn to_file(&self) -> BlockModelFile {
        let blocks = self
            .blocks
            .iter()
            .map(|b| BlockEntry { i: b.i, j: b.j, mu: b.mu, r: b.point.r, s: b.point.s })
            .collect();
        BlockModelFile { schema_version: 1, blocks, phi: self.phi, xi: self.xi }
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn phases(&self) -> (f64, f64) {
        (self.phi, self.xi)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, i: usize, j: usize) -> &Block {
        &self.blocks[i * self.n_b + j]
    }

    /// Blocks with positive weight.
    pub fn populated(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(|b| b.mu > 0.0)
    }

    /// `(sum mu r, sum mu s)`.
    pub fn barycenter(&self) -> (f64, f64) {
        self.populated().fold((0.0, 0.0), |(r, s), b| (r + b.mu * b.point.r, s + b.mu * b.point.s))
    }

    /// The shared point of all blocks with weight above `tol`, if they agree within `tol`.
    pub fn shared_point(&self, tol: f64) -> Option<HardyPoint> {
        let mut heavy = self.blocks.iter().filter(|b| b.mu > tol);
        let first = heavy.next()?.point;
        heavy
            .all(|b| (b.point.r - first.r).abs() <= tol && (b.point.s - first.s).abs() <= tol)
            .then_some(first)
    }
}

/// `sum_ij mu_ij * hardy_behavior(r_ij, s_ij)`.
pub fn mixture_behavior(model: &BlockModel) -> Result<Behavior> {
    let parts = model
        .populated()
        .map(|b| Ok((b.mu, hardy_behavior(b.point)?)))
        .collect::<Result<Vec<_>>>()?;
    Behavior::new(*Behavior::mixture(&parts).as_array())
}

/// Global state and observables of a model.
#[derive(Clone, Debug)]
pub struct GlobalModel {
    pub rho: CMat,
    pub psi: CVec,
    pub alice: [ObservablePair; 2],
    pub bob: [ObservablePair; 2],
}

impl GlobalModel {
    pub fn local_dims(&self) -> (usize, usize) {
        (self.alice[0].dim(), self.bob[0].dim())
    }

    pub fn behavior(&self) -> Result<Behavior> {
        behavior_from_model(&self.rho, &self.alice, &self.bob)
    }
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Block-diagonal `A1` (or `B1`): the rotated qubit measurement of each block.
fn block_rotated(angles: &[f64], phase: f64) -> Result<ObservablePair> {
    let dim = 2 * angles.len();
    let mut plus = DMatrix::from_element(dim, dim, zero());
    let mut minus = DMatrix::from_element(dim, dim, zero());
    for (k, &theta) in angles.iter().enumerate() {
        let [u0, u1] = rotated_basis(theta, phase);
        for a in 0..2 {
            for b in 0..2 {
                plus[(2 * k + a, 2 * k + b)] = u0[a] * u0[b].conj();
                minus[(2 * k + a, 2 * k + b)] = u1[a] * u1[b].conj();
            }
        }
    }
    ObservablePair::new(CMat::from_matrix(plus)?, CMat::from_matrix(minus)?)
}

/// State `|chi> = (+)_ij sqrt(mu_ij) |psi(r_ij, s_ij)>` and the
/// block-diagonal measurements, on `C^{2 n_a} (x) C^{2 n_b}`.
pub fn build_global_model(model: &BlockModel) -> Result<GlobalModel> {
    let (d_a, d_b) = (2 * model.n_a, 2 * model.n_b);
    let mut chi = vec![zero(); d_a * d_b];
    for b in model.populated() {
        let amp = hardy_amplitudes(b.point, model.phi, model.xi)?;
        let w = b.mu.sqrt();
        for a in 0..2 {
            for c in 0..2 {
                chi[(2 * b.i + a) * d_b + 2 * b.j + c] = amp[2 * a + c] * w;
            }
        }
    }
    let psi = CVec::state(chi)?;
    let alice = [ObservablePair::parity(d_a)?, block_rotated(&model.alpha, model.phi)?];
    let bob = [ObservablePair::parity(d_b)?, block_rotated(&model.beta, model.xi)?];
    Ok(GlobalModel { rho: psi.projector(), psi, alice, bob })
}

/// How a model's statistics relate to its block structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityStatus {
    /// Hardy form holds and the populated blocks share one point.
    Consistent,
    /// Blocks differ and the statistics are correctly flagged as non-Hardy.
    RejectedMixture,
    /// Blocks differ but the residual is below the tolerance: within
    /// tolerance, rigidity not violated.
    BelowResidualFloor,
    /// Blocks share a point yet the form check fails; indicates a bug.
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub status: RigidityStatus,
    pub form: FormReport,
    /// `max(|r_ij - r_bar|, |s_ij - s_bar|)` per block in row-major order,
    /// measured from the barycenter; zero-weight blocks report 0.
    pub deviations: Vec<f64>,
    pub common_point: bool,
    pub residual_floor: f64,
}

impl RigidityReport {
    /// Whether the report agrees with the rigidity statement.
    pub fn holds(&self) -> bool {
        self.status != RigidityStatus::Inconsistent
    }
}

/// Runs the Hardy-form check on a model's mixture and compares its verdict
/// with whether the populated blocks actually share a point.
pub fn verify_rigidity(model: &BlockModel, tol: f64) -> Result<RigidityReport> {
    let mix = mixture_behavior(model)?;
    let form = check_hardy_form(&mix, tol);
    let (rb, sb) = model.barycenter();
    let deviations = model
        .blocks
        .iter()
        .map(|b| if b.mu > tol { (b.point.r - rb).abs().max((b.point.s - sb).abs()) } else { 0.0 })
        .collect();
    let common_point = model.shared_point(tol).is_some();
    let status = match (form.pass, common_point) {
        (true, true) => RigidityStatus::Consistent,
        (false, false) => RigidityStatus::RejectedMixture,
        (true, false) => RigidityStatus::BelowResidualFloor,
        (false, true) => RigidityStatus::Inconsistent,
    };
    Ok(RigidityReport { status, form, deviations, common_point, residual_floor: tol })
}

/// `V |2k> = |2k>|0>`, `V |2k+1> = |2k>|1>`: the ancilla-appending map on one party.
fn ancilla_isometry(dim: usize) -> DMatrix<C64> {
    let mut v = DMatrix::from_element(2 * dim, dim, zero());
    for k in 0..dim / 2 {
        v[(2 * (2 * k), 2 * k)] = C64::new(1.0, 0.0);
        v[(2 * (2 * k) + 1, 2 * k + 1)] = C64::new(1.0, 0.0);
    }
    v
}

/// Output of [`isometry_extract`].
#[derive(Clone, Debug)]
pub struct Extraction {
    /// Reduced state on the original registers.
    pub junk: CMat,
    /// Reduced state on the two ancilla qubits.
    pub extracted: CMat,
    pub point: HardyPoint,
    pub fidelity: f64,
}

/// Appends `|0>_{A'} |0>_{B'}`, applies the local swap isometries and traces
/// out the original registers. Requires every populated block at one point.
pub fn isometry_extract(model: &BlockModel) -> Result<Extraction> {
    let point = model.shared_point(ANGLE_CONSISTENCY_TOL).ok_or_else(|| {
        Error::InvalidModel("isometry extraction needs all populated blocks at one point".into())
    })?;
    let global = build_global_model(model)?;
    let (d_a, d_b) = global.local_dims();
    let w = ancilla_isometry(d_a).kronecker(&ancilla_isometry(d_b));
    let out = &w * global.rho.as_matrix() * w.adjoint();
    let out = CMat::from_matrix(out)?;
    let dims = [d_a, 2, d_b, 2];
    let extracted = partial_trace(&out, &[1, 3], &dims)?;
    let junk = partial_trace(&out, &[0, 2], &dims)?;
    let target = hardy_state(point, model.phi, model.xi)?;
    let fidelity = fidelity(&target, &extracted)?;
    Ok(Extraction { junk, extracted, point, fidelity })
}
