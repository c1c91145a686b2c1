//! C ABI over `hardy-cert`.
//!
//! Objects cross the boundary as opaque handles created by the `hc_*_from_*`
//! constructors and released with the matching `hc_*_free`. Every fallible
//! call returns an [`HcStatus`]; on failure a message is available from
//! [`hc_last_error_message`] on the same thread. Strings returned through
//! `char **` out-parameters are owned by the caller and released with
//! [`hc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use hardy_cert::blockdiag::{
    isometry_extract, mixture_behavior, verify_rigidity, BlockModel, BlockModelFile, RigidityStatus,
};
use hardy_cert::hardy::{hardy_behavior, is_local, Behavior, HardyPoint};
use hardy_cert::io;
use hardy_cert::selftest::{certificate_roundtrip_check, certify_with, Certificate, CertifyOptions, Verdict};
use hardy_cert::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidBehavior = 3,
    InvalidModel = 4,
    Degenerate = 5,
    Io = 6,
    Parse = 7,
    Internal = 8,
}

/// Certification verdict; values match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcVerdict {
    Certified = 0,
    Rejected = 1,
    Boundary = 3,
}

/// Outcome of the rigidity check on a block model.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcRigidity {
    Consistent = 0,
    RejectedMixture = 1,
    BelowResidualFloor = 2,
    Inconsistent = 3,
}

/// Opaque 16-entry behavior table.
pub struct HcBehavior(Behavior);

/// Opaque certificate.
pub struct HcCertificate(Certificate);

/// Opaque block model.
pub struct HcBlockModel(BlockModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HcStatus {
    match e {
        Error::InvalidBehavior(_) | Error::ProbabilityOutOfRange { .. } => HcStatus::InvalidBehavior,
        Error::InvalidModel(_) => HcStatus::InvalidModel,
        Error::Degenerate(_) => HcStatus::Degenerate,
        Error::Io(_) => HcStatus::Io,
        Error::Json(_) | Error::Csv(_) | Error::Schema(_) => HcStatus::Parse,
        _ => HcStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (HcStatus, String)>) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error: panic inside hardy-cert".into());
            HcStatus::Internal
        }
    }
}

fn lift<T>(r: hardy_cert::Result<T>) -> Result<T, (HcStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (HcStatus, String) {
    (HcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (HcStatus, String)> {
    // SAFETY: the caller guarantees `p` is null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (HcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: the caller guarantees a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| (HcStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (HcStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: `out` is non-null and points to writable storage per the caller.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (HcStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(s).map_err(|_| (HcStatus::Internal, "string contains NUL".to_string()))?;
    // SAFETY: as in `put`.
    unsafe { *out = c.into_raw() };
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, value: T) -> Result<(), (HcStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: as in `put`.
    unsafe { *out = value };
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by `CString::into_raw` in `put_string`.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Closed-form Hardy behavior of `(r, s)` in the closed unit square.
///
/// # Safety
/// `out` must point to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hc_behavior_from_point(r: f64, s: f64, out: *mut *mut HcBehavior) -> HcStatus {
    guard(|| {
        let b = lift(HardyPoint::new(r, s).and_then(hardy_behavior))?;
        unsafe { put(out, HcBehavior(b)) }
    })
}

/// Behavior from 16 probabilities in storage order (index `8x + 4y + 2a + b`).
/// The table is validated.
///
/// # Safety
/// `p` must point to `len` readable doubles; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn hc_behavior_from_array(p: *const f64, len: usize, out: *mut *mut HcBehavior) -> HcStatus {
    guard(|| {
        if p.is_null() {
            return Err(null("probability array"));
        }
        if len != 16 {
            return Err((HcStatus::InvalidArgument, format!("expected 16 probabilities, got {len}")));
        }
        let mut a = [0.0; 16];
        // SAFETY: `p` holds `len` = 16 doubles per the caller.
        a.copy_from_slice(unsafe { std::slice::from_raw_parts(p, 16) });
        let b = lift(Behavior::new(a))?;
        unsafe { put(out, HcBehavior(b)) }
    })
}

/// Parses behavior JSON. The probabilities are not validated, so malformed
/// data can still be passed to [`hc_certify`] for a diagnostic.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn hc_behavior_from_json(json: *const c_char, out: *mut *mut HcBehavior) -> HcStatus {
    guard(|| {
        let text = unsafe { read_str(json, "json") }?;
        let b = lift(io::behavior_from_json(text))?;
        unsafe { put(out, HcBehavior(b)) }
    })
}

/// Reads a behavior file (`.csv` or JSON).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn hc_behavior_read(path: *const c_char, out: *mut *mut HcBehavior) -> HcStatus {
    guard(|| {
        let p = unsafe { read_str(path, "path") }?;
        let b = lift(io::read_behavior(Path::new(p)))?;
        unsafe { put(out, HcBehavior(b)) }
    })
}

/// Copies the 16 probabilities into `out`, which must hold `len >= 16` doubles.
///
/// # Safety
/// `b` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hc_behavior_probabilities(b: *const HcBehavior, out: *mut f64, len: usize) -> HcStatus {
    guard(|| {
        let b = unsafe { deref(b, "behavior") }?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        if len < 16 {
            return Err((HcStatus::InvalidArgument, format!("buffer holds {len} doubles, need 16")));
        }
        // SAFETY: `out` holds at least 16 doubles per the caller.
        unsafe { std::slice::from_raw_parts_mut(out, 16) }.copy_from_slice(b.0.as_array());
        Ok(())
    })
}

/// Serializes a behavior as JSON; free the result with [`hc_string_free`].
///
/// # Safety
/// `b` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hc_behavior_to_json(b: *const HcBehavior, out: *mut *mut c_char) -> HcStatus {
    guard(|| {
        let b = unsafe { deref(b, "behavior") }?;
        let s = lift(io::behavior_to_json(&b.0))?;
        unsafe { put_string(out, s) }
    })
}

/// Largest CHSH value and the locality verdict.
///
/// # Safety
/// `b` must be a live handle; `chsh_max` and `local` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_behavior_chsh(b: *const HcBehavior, chsh_max: *mut f64, local: *mut bool) -> HcStatus {
    guard(|| {
        let b = unsafe { deref(b, "behavior") }?;
        let rep = lift(is_local(&b.0))?;
        unsafe { put_value(chsh_max, rep.chsh_max) }?;
        unsafe { put_value(local, rep.local) }
    })
}

/// Releases a behavior handle. NULL is ignored.
///
/// # Safety
/// `b` must be NULL or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_behavior_free(b: *mut HcBehavior) {
    if !b.is_null() {
        // SAFETY: produced by `Box::into_raw` in `put`.
        drop(unsafe { Box::from_raw(b) });
    }
}

/// Certifies a behavior at tolerance `tol` (use a nonpositive value for the
/// default `1e-6`) with the default boundary margin.
///
/// # Safety
/// `b` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hc_certify(b: *const HcBehavior, tol: f64, out: *mut *mut HcCertificate) -> HcStatus {
    guard(|| {
        let b = unsafe { deref(b, "behavior") }?;
        if tol.is_nan() {
            return Err((HcStatus::InvalidArgument, "tol is NaN".into()));
        }
        let mut opts = CertifyOptions::default();
        if tol > 0.0 {
            opts.tol = tol;
        }
        unsafe { put(out, HcCertificate(certify_with(&b.0, opts))) }
    })
}

/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_certificate_verdict(c: *const HcCertificate, out: *mut HcVerdict) -> HcStatus {
    guard(|| {
        let c = unsafe { deref(c, "certificate") }?;
        let v = match c.0.verdict {
            Verdict::Certified => HcVerdict::Certified,
            Verdict::Rejected => HcVerdict::Rejected,
            Verdict::Boundary => HcVerdict::Boundary,
        };
        unsafe { put_value(out, v) }
    })
}

/// The extracted `(r, s)`; fails with `InvalidBehavior` when none was read.
///
/// # Safety
/// `c` must be a live handle; `r` and `s` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_certificate_point(c: *const HcCertificate, r: *mut f64, s: *mut f64) -> HcStatus {
    guard(|| {
        let c = unsafe { deref(c, "certificate") }?;
        let pt = c.0.point.ok_or((HcStatus::InvalidBehavior, "certificate carries no point".to_string()))?;
        unsafe { put_value(r, pt.r) }?;
        unsafe { put_value(s, pt.s) }
    })
}

/// Largest entrywise deviation from the Hardy table; fails when unavailable.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_certificate_residual(c: *const HcCertificate, out: *mut f64) -> HcStatus {
    guard(|| {
        let c = unsafe { deref(c, "certificate") }?;
        let r = c.0.residual.ok_or((HcStatus::InvalidBehavior, "certificate carries no residual".to_string()))?;
        unsafe { put_value(out, r) }
    })
}

/// Hardy state amplitudes as 8 doubles `(re, im)` for `|00>, |01>, |10>, |11>`;
/// fails unless the certificate is certified.
///
/// # Safety
/// `c` must be a live handle; `out` must point to `len >= 8` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hc_certificate_amplitudes(c: *const HcCertificate, out: *mut f64, len: usize) -> HcStatus {
    guard(|| {
        let c = unsafe { deref(c, "certificate") }?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        if len < 8 {
            return Err((HcStatus::InvalidArgument, format!("buffer holds {len} doubles, need 8")));
        }
        let a = c.0.state_amplitudes.ok_or((HcStatus::InvalidBehavior, "no certified state".to_string()))?;
        // SAFETY: `out` holds at least 8 doubles per the caller.
        let buf = unsafe { std::slice::from_raw_parts_mut(out, 8) };
        for (k, z) in a.iter().enumerate() {
            buf[2 * k] = z.re;
            buf[2 * k + 1] = z.im;
        }
        Ok(())
    })
}

/// True iff the certificate is certified and its point, state and angles all
/// reproduce the input behavior.
///
/// # Safety
/// `c` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_certificate_roundtrip_check(c: *const HcCertificate) -> bool {
    // SAFETY: the caller guarantees `c` is null or live.
    unsafe { c.as_ref() }.is_some_and(|c| certificate_roundtrip_check(&c.0))
}

/// Serializes a certificate as JSON; free the result with [`hc_string_free`].
///
/// # Safety
/// `c` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hc_certificate_to_json(c: *const HcCertificate, out: *mut *mut c_char) -> HcStatus {
    guard(|| {
        let c = unsafe { deref(c, "certificate") }?;
        let s = serde_json::to_string_pretty(&c.0).map_err(|e| (HcStatus::Internal, e.to_string()))?;
        unsafe { put_string(out, s) }
    })
}

/// # Safety
/// `c` must be NULL or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_certificate_free(c: *mut HcCertificate) {
    if !c.is_null() {
        // SAFETY: produced by `Box::into_raw` in `put`.
        drop(unsafe { Box::from_raw(c) });
    }
}

/// Parses a block model from JSON `{"blocks":[{"i","j","mu","r","s"}],"phi","xi"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hc_model_from_json(json: *const c_char, out: *mut *mut HcBlockModel) -> HcStatus {
    guard(|| {
        let text = unsafe { read_str(json, "json") }?;
        let f: BlockModelFile = serde_json::from_str(text).map_err(|e| (HcStatus::Parse, e.to_string()))?;
        let m = lift(BlockModel::from_file(&f))?;
        unsafe { put(out, HcBlockModel(m)) }
    })
}

/// All `n_a * n_b` blocks at `(r, s)` with row-major weights `mu`.
///
/// # Safety
/// `mu` must point to `n_a * n_b` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_model_common_point(
    r: f64,
    s: f64,
    n_a: usize,
    n_b: usize,
    mu: *const f64,
    out: *mut *mut HcBlockModel,
) -> HcStatus {
    guard(|| {
        if mu.is_null() {
            return Err(null("weights"));
        }
        let n = n_a.checked_mul(n_b).ok_or((HcStatus::InvalidArgument, "block count overflows".to_string()))?;
        if n == 0 || n > 64 {
            return Err((HcStatus::InvalidArgument, format!("{n_a}x{n_b} blocks is out of range")));
        }
        // SAFETY: `mu` holds `n` doubles per the caller.
        let w = unsafe { std::slice::from_raw_parts(mu, n) };
        let pt = lift(HardyPoint::new(r, s))?;
        let m = lift(BlockModel::common_point(pt, n_a, n_b, w, 0.0, 0.0))?;
        unsafe { put(out, HcBlockModel(m)) }
    })
}

/// Weighted mixture of the per-block Hardy tables.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_model_mixture(m: *const HcBlockModel, out: *mut *mut HcBehavior) -> HcStatus {
    guard(|| {
        let m = unsafe { deref(m, "model") }?;
        let b = lift(mixture_behavior(&m.0))?;
        unsafe { put(out, HcBehavior(b)) }
    })
}

/// Rigidity status and form residual of the model's mixture at tolerance `tol`.
///
/// # Safety
/// `m` must be a live handle; `status` and `residual` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_model_verify(
    m: *const HcBlockModel,
    tol: f64,
    status: *mut HcRigidity,
    residual: *mut f64,
) -> HcStatus {
    guard(|| {
        let m = unsafe { deref(m, "model") }?;
        let rep = lift(verify_rigidity(&m.0, tol))?;
        let st = match rep.status {
            RigidityStatus::Consistent => HcRigidity::Consistent,
            RigidityStatus::RejectedMixture => HcRigidity::RejectedMixture,
            RigidityStatus::BelowResidualFloor => HcRigidity::BelowResidualFloor,
            RigidityStatus::Inconsistent => HcRigidity::Inconsistent,
        };
        unsafe { put_value(status, st) }?;
        unsafe { put_value(residual, rep.form.residual) }
    })
}

/// Fidelity of the state extracted by the local isometry with the Hardy
/// state; fails with `InvalidModel` unless all populated blocks share a point.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_model_extract_fidelity(m: *const HcBlockModel, out: *mut f64) -> HcStatus {
    guard(|| {
        let m = unsafe { deref(m, "model") }?;
        let e = lift(isometry_extract(&m.0))?;
        unsafe { put_value(out, e.fidelity) }
    })
}

/// # Safety
/// `m` must be NULL or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_model_free(m: *mut HcBlockModel) {
    if !m.is_null() {
        // SAFETY: produced by `Box::into_raw` in `put`.
        drop(unsafe { Box::from_raw(m) });
    }
}
