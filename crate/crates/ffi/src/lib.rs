//! C ABI over `siegel-moduli`.
//!
//! Objects are opaque handles created by `sm_*_new`/`sm_*_from_json` and
//! released with the matching `sm_*_free`. Every fallible call returns an
//! [`SmStatus`]; on failure a message is kept per thread and read with
//! [`sm_last_error_message`]. Matrices cross the boundary row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use siegel_moduli::degeneration::enumerate_boundary_strata;
use siegel_moduli::jacobian::{period_matrix, reduced_period_point, HyperellipticCurve};
use siegel_moduli::measure::{stratum_volume, VolumeMethod};
use siegel_moduli::reduction::siegel_reduce;
use siegel_moduli::universal::{stabilize, universal_distance};
use siegel_moduli::{siegel_distance, Error, SiegelPoint};

/// Result codes. Library errors map one to one onto the codes from
/// `SM_STATUS_NOT_POSITIVE_DEFINITE` on.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    NotPositiveDefinite = 10,
    OrderMismatch = 11,
    NotSymmetric = 12,
    MalformedMatrix = 13,
    NotSymplectic = 14,
    SingularDenominator = 15,
    GenusMismatch = 16,
    IterationLimitExceeded = 17,
    Unsupported = 18,
    NotStandardPosition = 19,
    InvalidIndexSet = 20,
    InvalidCurve = 21,
    RiemannRelationViolation = 22,
    QuadratureNonConvergence = 23,
    QueryTooCloseToBranchPoint = 24,
    InvalidFamily = 25,
    Inconclusive = 26,
    InvalidConfig = 27,
    Internal = 28,
    Panic = 99,
}

impl From<&Error> for SmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NotPositiveDefinite { .. } => SmStatus::NotPositiveDefinite,
            Error::OrderMismatch(..) => SmStatus::OrderMismatch,
            Error::NotSymmetric(_) => SmStatus::NotSymmetric,
            Error::MalformedMatrix(_) => SmStatus::MalformedMatrix,
            Error::NotSymplectic(_) => SmStatus::NotSymplectic,
            Error::SingularDenominator => SmStatus::SingularDenominator,
            Error::GenusMismatch(..) => SmStatus::GenusMismatch,
            Error::IterationLimitExceeded(_) => SmStatus::IterationLimitExceeded,
            Error::Unsupported(_) => SmStatus::Unsupported,
            Error::NotStandardPosition(_) => SmStatus::NotStandardPosition,
            Error::InvalidIndexSet(_) => SmStatus::InvalidIndexSet,
            Error::InvalidCurve(_) => SmStatus::InvalidCurve,
            Error::RiemannRelationViolation(_) => SmStatus::RiemannRelationViolation,
            Error::QuadratureNonConvergence(_) => SmStatus::QuadratureNonConvergence,
            Error::QueryTooCloseToBranchPoint { .. } => SmStatus::QueryTooCloseToBranchPoint,
            Error::InvalidFamily(_) => SmStatus::InvalidFamily,
            Error::Inconclusive(_) => SmStatus::Inconclusive,
            Error::InvalidConfig(_) => SmStatus::InvalidConfig,
            Error::Internal(_) => SmStatus::Internal,
        }
    }
}

/// A point of a Siegel upper half space.
pub struct SmPoint(SiegelPoint);

/// A hyperelliptic curve given by its branch points.
pub struct SmCurve(HyperellipticCurve);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(SmStatus::from(&e), e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SmStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            SmStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(SmStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no NUL").into_raw()
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn sm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Point of genus `g` from row-major `g x g` arrays `x` and `y`.
///
/// # Safety
/// `x` and `y` must hold `g * g` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_point_new(g: usize, x: *const f64, y: *const f64, out: *mut *mut SmPoint) -> SmStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let (x, y) = (slice(x, g * g, "x")?, slice(y, g * g, "y")?);
        let rows = |m: &[f64]| m.chunks(g.max(1)).map(<[f64]>::to_vec).collect::<Vec<_>>();
        let p = SiegelPoint::from_rows(&rows(x), &rows(y))?;
        *out = boxed(SmPoint(p));
        Ok(())
    })
}

/// Point from JSON `{"g", "X", "Y"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_point_from_json(json: *const c_char, out: *mut *mut SmPoint) -> SmStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let raw: siegel_moduli::siegel::SiegelPointJson =
            serde_json::from_str(text(json, "json")?).map_err(|e| Failure(SmStatus::InvalidJson, e.to_string()))?;
        *out = boxed(SmPoint(SiegelPoint::try_from(raw)?));
        Ok(())
    })
}

/// Releases a point. Null is ignored.
///
/// # Safety
/// `p` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sm_point_free(p: *mut SmPoint) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Genus of a point, 0 for null.
///
/// # Safety
/// `p` must be null or a live point.
#[no_mangle]
pub unsafe extern "C" fn sm_point_genus(p: *const SmPoint) -> usize {
    p.as_ref().map_or(0, |p| p.0.genus())
}

/// Copies `X` and `Y` row-major into buffers of `g * g` doubles.
///
/// # Safety
/// `p` must be live; `x` and `y` must hold `g * g` doubles.
#[no_mangle]
pub unsafe extern "C" fn sm_point_matrices(p: *const SmPoint, x: *mut f64, y: *mut f64) -> SmStatus {
    guard(|| {
        let p = &deref(p, "point")?.0;
        if x.is_null() || y.is_null() {
            return Err(null("output buffer"));
        }
        let g = p.genus();
        for i in 0..g {
            for j in 0..g {
                *x.add(i * g + j) = p.x().get(i, j);
                *y.add(i * g + j) = p.y().get(i, j);
            }
        }
        Ok(())
    })
}

/// JSON text of a point; free with [`sm_string_free`].
///
/// # Safety
/// `p` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_point_to_json(p: *const SmPoint, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let p = &deref(p, "point")?.0;
        let out = out_ptr(out, "out")?;
        *out = owned_string(serde_json::to_string(p).expect("points serialize"));
        Ok(())
    })
}

/// Invariant distance. Points of different genera are compared in the
/// larger genus.
///
/// # Safety
/// `a`, `b` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_distance(a: *const SmPoint, b: *const SmPoint, out: *mut f64) -> SmStatus {
    guard(|| {
        let (a, b) = (&deref(a, "a")?.0, &deref(b, "b")?.0);
        let out = out_ptr(out, "out")?;
        *out = if a.genus() == b.genus() {
            siegel_distance(a, b)?
        } else {
            universal_distance(&stabilize(a), &stabilize(b))?
        };
        Ok(())
    })
}

/// Siegel-reduced representative as a new point.
///
/// # Safety
/// `p` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_reduce(p: *const SmPoint, out: *mut *mut SmPoint) -> SmStatus {
    guard(|| {
        let p = &deref(p, "point")?.0;
        let out = out_ptr(out, "out")?;
        *out = boxed(SmPoint(siegel_reduce(p)?.reduced));
        Ok(())
    })
}

/// Point padded to `target_genus`.
///
/// # Safety
/// `p` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_embed(p: *const SmPoint, target_genus: usize, out: *mut *mut SmPoint) -> SmStatus {
    guard(|| {
        let p = &deref(p, "point")?.0;
        let out = out_ptr(out, "out")?;
        *out = boxed(SmPoint(p.padded(target_genus)?));
        Ok(())
    })
}

/// Curve from `n` real branch points.
///
/// # Safety
/// `points` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_curve_new(points: *const f64, n: usize, out: *mut *mut SmCurve) -> SmStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let pts = slice(points, n, "points")?;
        *out = boxed(SmCurve(HyperellipticCurve::new(pts.to_vec())?));
        Ok(())
    })
}

/// Releases a curve. Null is ignored.
///
/// # Safety
/// `c` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sm_curve_free(c: *mut SmCurve) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Normalized period matrix, or its Siegel-reduced form when `reduced` is
/// nonzero.
///
/// # Safety
/// `c` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_period_matrix(c: *const SmCurve, reduced: bool, out: *mut *mut SmPoint) -> SmStatus {
    guard(|| {
        let c = &deref(c, "curve")?.0;
        let out = out_ptr(out, "out")?;
        let z = if reduced {
            reduced_period_point(c)?
        } else {
            period_matrix(c)?
        };
        *out = boxed(SmPoint(z));
        Ok(())
    })
}

/// Volume of `A_g`: nested quadrature when `quadrature` is set (genus 1),
/// otherwise Monte Carlo with `n` proposals.
///
/// # Safety
/// `estimate` and `stderr` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_volume(
    g: usize,
    quadrature: bool,
    n: usize,
    seed: u64,
    workers: usize,
    estimate: *mut f64,
    stderr: *mut f64,
) -> SmStatus {
    guard(|| {
        let estimate = out_ptr(estimate, "estimate")?;
        let stderr = out_ptr(stderr, "stderr")?;
        let method = if quadrature {
            VolumeMethod::Quadrature
        } else {
            VolumeMethod::MonteCarlo { n, seed, workers }
        };
        let r = stratum_volume(g, method)?;
        *estimate = r.estimate;
        *stderr = r.stderr;
        Ok(())
    })
}

/// Boundary strata of genus `g` as a JSON array of descriptors; free with
/// [`sm_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_strata_json(g: usize, include_interior: bool, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let strata = enumerate_boundary_strata(g, include_interior)?;
        *out = owned_string(serde_json::to_string(&strata).expect("descriptors serialize"));
        Ok(())
    })
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
