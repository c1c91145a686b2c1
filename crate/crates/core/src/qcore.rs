//! Dense complex linear algebra and Born-rule simulation for small bipartite systems.
//!
//! Everything here is sized for desk-scale models: a few 2x2 Jordan blocks per
//! party, so local dimensions stay in the tens. Matrices are dense and
//! validated eagerly; a density operator or projector that fails its checks is
//! an error, never a warning.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hardy::Behavior;

pub type C64 = Complex64;

/// Equality tolerance for Hermiticity, trace and normalization checks.
pub const EQ_TOL: f64 = 1e-12;
/// Tolerance for idempotence and orthogonality of projectors.
pub const PROJ_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted in a density operator.
pub const EIGEN_FLOOR: f64 = -1e-10;

/// A complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVec(DVector<C64>);

impl CVec {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch("vector dimension must be >= 1".into()));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    /// Builds a vector that must be a normalized state.
    pub fn state(entries: Vec<C64>) -> Result<Self> {
        let v = Self::new(entries)?;
        let n = v.norm_sqr();
        if (n - 1.0).abs() > EQ_TOL {
            return Err(Error::InvalidState(format!("squared norm {n} differs from 1")));
        }
        Ok(v)
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch(format!("basis index {k} >= dim {dim}")));
        }
        let mut e = vec![C64::new(0.0, 0.0); dim];
        e[k] = C64::new(1.0, 0.0);
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn from_vector(v: DVector<C64>) -> Self {
        Self(v)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::InvalidState("cannot normalize the zero vector".into()));
        }
        Ok(Self(self.0.unscale(n)))
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &CVec) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.0.dotc(&other.0))
    }

    /// `|self><self|`.
    pub fn projector(&self) -> CMat {
        CMat(&self.0 * self.0.adjoint())
    }

    pub fn kron(&self, other: &CVec) -> CVec {
        CVec(self.0.kronecker(&other.0))
    }
}

/// A square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat(DMatrix<C64>);

impl CMat {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::from_matrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_fn(dim, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim.max(1), dim.max(1)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim.max(1), dim.max(1)))
    }

    /// Maximally mixed state `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let d = dim.max(1);
        Self(DMatrix::identity(d, d).unscale(d as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &CMat) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn add(&self, other: &CMat) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.scale(k))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMat) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok((&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (i..d).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn validate_density(&self) -> Result<()> {
        if !self.is_hermitian(EQ_TOL) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > EQ_TOL || tr.im.abs() > EQ_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min = self.hermitian_eigenvalues()[0];
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    pub fn validate_projector(&self) -> Result<()> {
        if !self.is_hermitian(PROJ_TOL) {
            return Err(Error::InvalidProjector("not Hermitian".into()));
        }
        let sq = CMat(&self.0 * &self.0);
        let dev = sq.max_abs_diff(self)?;
        if dev > PROJ_TOL {
            return Err(Error::InvalidProjector(format!("P^2 differs from P by {dev:e}")));
        }
        Ok(())
    }

    fn check_same_dim(&self, other: &CMat) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

/// Two-outcome projective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservablePair {
    plus: CMat,
    minus: CMat,
}

impl ObservablePair {
    pub fn new(plus: CMat, minus: CMat) -> Result<Self> {
        if plus.dim() != minus.dim() {
            return Err(Error::DimensionMismatch("outcome projectors differ in dimension".into()));
        }
        plus.validate_projector()?;
        minus.validate_projector()?;
        let sum = plus.add(&minus)?;
        let dev = sum.max_abs_diff(&CMat::identity(plus.dim()))?;
        if dev > EQ_TOL {
            return Err(Error::InvalidProjector(format!("plus + minus differs from I by {dev:e}")));
        }
        let prod = plus.mul(&minus)?;
        let dev = prod.max_abs_diff(&CMat::zeros(plus.dim()))?;
        if dev > PROJ_TOL {
            return Err(Error::InvalidProjector(format!("plus * minus differs from 0 by {dev:e}")));
        }
        Ok(Self { plus, minus })
    }

    /// Measurement in an orthonormal qubit basis `{u0, u1}`.
    pub fn from_basis(u0: &CVec, u1: &CVec) -> Result<Self> {
        Self::new(u0.projector(), u1.projector())
    }

    /// `sigma_z`-like measurement on a `dim`-dimensional space: even indices
    /// carry outcome +1, odd indices outcome -1.
    pub fn parity(dim: usize) -> Result<Self> {
        let plus = CMat::from_fn(dim, |i, j| {
            if i == j && i % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
        })?;
        let minus = CMat::from_fn(dim, |i, j| {
            if i == j && i % 2 == 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
        })?;
        Self::new(plus, minus)
    }

    pub fn plus(&self) -> &CMat {
        &self.plus
    }

    pub fn minus(&self) -> &CMat {
        &self.minus
    }

    /// Projector for outcome index 0 (= +1) or 1 (= -1).
    pub fn outcome(&self, a: usize) -> &CMat {
        if a == 0 { &self.plus } else { &self.minus }
    }

    pub fn dim(&self) -> usize {
        self.plus.dim()
    }
}

/// Kronecker product `a (x) b`.
pub fn tensor(a: &CMat, b: &CMat) -> CMat {
    CMat(a.0.kronecker(&b.0))
}

fn clamp_probability(p: C64) -> Result<f64> {
    if p.im.abs() > EQ_TOL || p.re < -EQ_TOL || p.re > 1.0 + EQ_TOL {
        return Err(Error::ProbabilityOutOfRange { value: p.re });
    }
    Ok(p.re.clamp(0.0, 1.0))
}

fn born_unchecked(rho: &CMat, pa: &CMat, pb: &CMat) -> Result<f64> {
    let (da, db) = (pa.dim(), pb.dim());
    let d = rho.dim();
    if d != da * db {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {d} measured by local projectors of dims {da} and {db}"
        )));
    }
    // Tr(rho (Pa (x) Pb)) = sum_{ij} rho_ij (Pa (x) Pb)_ji, without forming the product.
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        let (ia, ib) = (i / db, i % db);
        for j in 0..d {
            let (ja, jb) = (j / db, j % db);
            let k = pa.0[(ja, ia)] * pb.0[(jb, ib)];
            if k != C64::new(0.0, 0.0) {
                acc += rho.0[(i, j)] * k;
            }
        }
    }
    clamp_probability(acc)
}

/// `Tr(rho Pa (x) Pb)`, clamped to `[0, 1]` after a tolerance check.
pub fn born_probability(rho: &CMat, pa: &CMat, pb: &CMat) -> Result<f64> {
    if rho.dim() != pa.dim() * pb.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} measured by local projectors of dims {} and {}",
            rho.dim(),
            pa.dim(),
            pb.dim()
        )));
    }
    rho.validate_density()?;
    pa.validate_projector()?;
    pb.validate_projector()?;
    born_unchecked(rho, pa, pb)
}

/// Simulates the full 2-input/2-output Bell experiment on `rho`.
pub fn behavior_from_model(
    rho: &CMat,
    alice: &[ObservablePair; 2],
    bob: &[ObservablePair; 2],
) -> Result<Behavior> {
    if alice[0].dim() != alice[1].dim() || bob[0].dim() != bob[1].dim() {
        return Err(Error::DimensionMismatch("observables of one party differ in dimension".into()));
    }
    if rho.dim() != alice[0].dim() * bob[0].dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} for local dims {} and {}",
            rho.dim(),
            alice[0].dim(),
            bob[0].dim()
        )));
    }
    rho.validate_density()?;
    let mut p = [0.0; 16];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    p[Behavior::index(x, y, a, b)] =
                        born_unchecked(rho, alice[x].outcome(a), bob[y].outcome(b))?;
                }
            }
        }
    }
    Behavior::new(p)
}

/// `<psi|rho|psi>`.
pub fn fidelity(psi: &CVec, rho: &CMat) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} against density operator of dim {}",
            psi.dim(),
            rho.dim()
        )));
    }
    if (psi.norm_sqr() - 1.0).abs() > EQ_TOL {
        return Err(Error::InvalidState("fidelity target is not normalized".into()));
    }
    rho.validate_density()?;
    let v = psi.0.dotc(&(&rho.0 * &psi.0));
    clamp_probability(v)
}

/// Reduced operator on the factors listed in `keep` (ascending or not; order
/// of the output follows the natural factor order). `dims` lists the factor
/// dimensions, most significant first.
pub fn partial_trace(rho: &CMat, keep: &[usize], dims: &[usize]) -> Result<CMat> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "factor dims {dims:?} do not multiply to {}",
            rho.dim()
        )));
    }
    if let Some(&k) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!("kept factor {k} does not exist")));
    }
    let kept: Vec<bool> = (0..dims.len()).map(|k| keep.contains(&k)).collect();
    let out_dim: usize = dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(d, _)| d).product();

    // Split a flat index into (kept part, traced part) flat indices.
    let split = |mut idx: usize| -> (usize, usize) {
        let (mut kidx, mut kmul, mut tidx, mut tmul) = (0, 1, 0, 1);
        for (f, &d) in dims.iter().enumerate().rev() {
            let digit = idx % d;
            idx /= d;
            if kept[f] {
                kidx += digit * kmul;
                kmul *= d;
            } else {
                tidx += digit * tmul;
                tmul *= d;
            }
        }
        (kidx, tidx)
    };
    let parts: Vec<(usize, usize)> = (0..total).map(split).collect();
    let mut out = DMatrix::<C64>::zeros(out_dim, out_dim);
    for (i, &(ki, ti)) in parts.iter().enumerate() {
        for (j, &(kj, tj)) in parts.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += rho.0[(i, j)];
            }
        }
    }
    CMat::from_matrix(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ket(bits: &[usize], dim: usize) -> CVec {
        let idx = bits.iter().fold(0, |acc, &b| acc * dim + b);
        CVec::basis(dim.pow(bits.len() as u32), idx).unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor(&CMat::identity(2), &CMat::identity(2));
        assert_eq!(i4, CMat::identity(4));
    }

    #[test]
    fn basis_projector_tensor() {
        let p0 = CVec::basis(2, 0).unwrap().projector();
        let p1 = CVec::basis(2, 1).unwrap().projector();
        let p = tensor(&p0, &p1);
        assert_eq!(p, CVec::basis(4, 1).unwrap().projector());
    }

    #[test]
    fn born_on_product_eigenstate() {
        let rho = ket(&[0, 0], 2).projector();
        let p0 = CVec::basis(2, 0).unwrap().projector();
        let p1 = CVec::basis(2, 1).unwrap().projector();
        assert_eq!(born_probability(&rho, &p0, &p0).unwrap(), 1.0);
        assert_eq!(born_probability(&rho, &p1, &p0).unwrap(), 0.0);
    }

    #[test]
    fn born_rejects_dimension_mismatch() {
        let rho = CMat::maximally_mixed(4);
        let p = CMat::identity(3);
        assert!(matches!(born_probability(&rho, &p, &p), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn born_rejects_non_density() {
        let rho = CMat::identity(4);
        let p = CMat::identity(2);
        assert!(matches!(born_probability(&rho, &p, &p), Err(Error::InvalidDensity(_))));
        let neg = CMat::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]).unwrap();
        assert!(matches!(neg.validate_density(), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn observable_pair_validation() {
        let p0 = CVec::basis(2, 0).unwrap().projector();
        assert!(ObservablePair::new(p0.clone(), p0.clone()).is_err());
        assert!(ObservablePair::new(p0.clone(), CMat::zeros(2)).is_err());
        let p1 = CVec::basis(2, 1).unwrap().projector();
        assert!(ObservablePair::new(p0, p1).is_ok());
    }

    #[test]
    fn maximally_mixed_gives_uniform_behavior() {
        let rho = CMat::maximally_mixed(4);
        let z = ObservablePair::parity(2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let x = ObservablePair::from_basis(
            &CVec::from_real(&[h, h]).unwrap(),
            &CVec::from_real(&[h, -h]).unwrap(),
        )
        .unwrap();
        let b = behavior_from_model(&rho, &[z.clone(), x.clone()], &[x, z]).unwrap();
        for &p in b.as_array() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn fidelity_cases() {
        let k0 = CVec::basis(2, 0).unwrap();
        let k1 = CVec::basis(2, 1).unwrap();
        assert!((fidelity(&k0, &k0.projector()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&k0, &k1.projector()).unwrap(), 0.0);
        let h = 1.0 / 2f64.sqrt();
        let plus = CVec::new(vec![c(h), c(h)]).unwrap();
        assert!((fidelity(&plus, &CMat::maximally_mixed(2)).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(&plus, &CMat::maximally_mixed(3)).is_err());
    }

    #[test]
    fn partial_trace_product_and_bell() {
        let rho = ket(&[0, 0], 2).projector();
        let red = partial_trace(&rho, &[0], &[2, 2]).unwrap();
        assert_eq!(red, CVec::basis(2, 0).unwrap().projector());

        let h = 1.0 / 2f64.sqrt();
        let bell = CVec::new(vec![c(h), c(0.0), c(0.0), c(h)]).unwrap();
        let red = partial_trace(&bell.projector(), &[0], &[2, 2]).unwrap();
        assert!(red.max_abs_diff(&CMat::maximally_mixed(2)).unwrap() < 1e-15);
        let red_b = partial_trace(&bell.projector(), &[1], &[2, 2]).unwrap();
        assert!(red_b.max_abs_diff(&CMat::maximally_mixed(2)).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = CMat::maximally_mixed(4);
        assert!(partial_trace(&rho, &[0], &[2, 3]).is_err());
        assert!(partial_trace(&rho, &[2], &[2, 2]).is_err());
    }

    #[test]
    fn state_constructor_enforces_norm() {
        assert!(CVec::state(vec![c(1.0), c(1.0)]).is_err());
        assert!(CVec::state(vec![c(0.6), c(0.8)]).is_ok());
        assert!(CVec::new(vec![]).is_err());
    }
}
