//! C interface to `finsler-core`.
//!
//! Structures are opaque heap handles. Every call returns an [`FslStatus`];
//! on failure the message is kept per thread and read back with
//! [`fsl_last_error`]. Output arrays are caller-allocated, row-major, with
//! the lengths stated on each function. Strings returned by the library are
//! released with [`fsl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use finsler_core::ad::BasePoint;
use finsler_core::cli::{self, RunConfig};
use finsler_core::metrics::{Family, FinslerStructure};
use finsler_core::{connection, curvature, metrics, Error};

/// Status codes returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FslStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Parse = 4,
    Domain = 5,
    Order = 6,
    Numeric = 7,
    StructureInvalid = 8,
    DegenerateFlag = 9,
    Panic = 10,
}

/// Opaque Finsler structure.
pub struct FslStructure {
    inner: FinslerStructure,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FslStatus {
    match e {
        Error::Domain(_) => FslStatus::Domain,
        Error::Order(_) => FslStatus::Order,
        Error::Config(_) => FslStatus::Config,
        Error::Numeric(_) => FslStatus::Numeric,
        Error::StructureInvalid(_) => FslStatus::StructureInvalid,
        Error::DegenerateFlag(_) => FslStatus::DegenerateFlag,
        Error::Parse { .. } => FslStatus::Parse,
    }
}

struct Fail(FslStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FslStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FslStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FslStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FslStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FslStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(s: *const FslStructure) -> Result<&'a FinslerStructure, Fail> {
    s.as_ref().map(|h| &h.inner).ok_or_else(|| null("structure"))
}

unsafe fn base_point(s: &FinslerStructure, x: *const f64, y: *const f64, n: usize) -> Result<BasePoint, Fail> {
    if x.is_null() || y.is_null() {
        return Err(null("coordinate array"));
    }
    if n != s.dim() {
        return Err(Fail(
            FslStatus::InvalidArgument,
            format!("dimension {n} does not match the structure's {}", s.dim()),
        ));
    }
    let x = std::slice::from_raw_parts(x, n).to_vec();
    let y = std::slice::from_raw_parts(y, n).to_vec();
    Ok(BasePoint::new(x, y)?)
}

unsafe fn emit(out: *mut f64, values: &[f64]) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output array"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn store(out: *mut *mut FslStructure, s: FinslerStructure) -> Result<(), Fail> {
    *out = Box::into_raw(Box::new(FslStructure { inner: s }));
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fsl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fsl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a structure from a TOML table describing the family, e.g.
/// `family = "randers"` with `alpha` and `beta` keys.
///
/// # Safety
/// `family_toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fsl_structure_from_toml(
    dimension: usize,
    family_toml: *const c_char,
    out: *mut *mut FslStructure,
) -> FslStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let src = text(family_toml, "family_toml")?;
        let family: Family =
            toml::from_str(src).map_err(|e| Fail(FslStatus::Config, format!("family: {e}")))?;
        store(out, FinslerStructure::new(dimension, family)?)
    })
}

/// As [`fsl_structure_from_toml`] with a JSON object.
///
/// # Safety
/// `family_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fsl_structure_from_json(
    dimension: usize,
    family_json: *const c_char,
    out: *mut *mut FslStructure,
) -> FslStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let src = text(family_json, "family_json")?;
        let family: Family =
            serde_json::from_str(src).map_err(|e| Fail(FslStatus::Config, format!("family: {e}")))?;
        store(out, FinslerStructure::new(dimension, family)?)
    })
}

/// Releases a structure. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fsl_structure_free(s: *mut FslStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Dimension of the structure, 0 for null.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsl_structure_dimension(s: *const FslStructure) -> usize {
    s.as_ref().map_or(0, |h| h.inner.dim())
}

/// `F(x, y)`.
///
/// # Safety
/// `x` and `y` hold `n` values; `out` points to one value.
#[no_mangle]
pub unsafe extern "C" fn fsl_evaluate_f(
    s: *const FslStructure,
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> FslStatus {
    guard(|| {
        let s = handle(s)?;
        let p = base_point(s, x, y, n)?;
        emit(out, &[metrics::evaluate_f(s, &p)?])
    })
}

/// Fundamental tensor `g_ij`, `n*n` values.
///
/// # Safety
/// `x` and `y` hold `n` values; `out` holds `n*n`.
#[no_mangle]
pub unsafe extern "C" fn fsl_metric(
    s: *const FslStructure,
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> FslStatus {
    guard(|| {
        let s = handle(s)?;
        let p = base_point(s, x, y, n)?;
        let g = metrics::fundamental_tensor(s, &p)?;
        let values: Vec<f64> = (0..n * n).map(|k| g.get(k / n, k % n)).collect();
        emit(out, &values)
    })
}

/// Nonlinear connection `N^i_m`, `n*n` values.
///
/// # Safety
/// `x` and `y` hold `n` values; `out` holds `n*n`.
#[no_mangle]
pub unsafe extern "C" fn fsl_nonlinear_connection(
    s: *const FslStructure,
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> FslStatus {
    guard(|| {
        let s = handle(s)?;
        let p = base_point(s, x, y, n)?;
        emit(out, &connection::nonlinear_connection(s, &p)?.components)
    })
}

/// Chern connection coefficients `Gamma^i_jk`, `n^3` values.
///
/// # Safety
/// `x` and `y` hold `n` values; `out` holds `n^3`.
#[no_mangle]
pub unsafe extern "C" fn fsl_chern_gamma(
    s: *const FslStructure,
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> FslStatus {
    guard(|| {
        let s = handle(s)?;
        let p = base_point(s, x, y, n)?;
        emit(out, &connection::chern_gamma(s, &p)?.gamma.components)
    })
}

/// hh-curvature `R^i_jkl`, `n^4` values.
///
/// # Safety
/// `x` and `y` hold `n` values; `out` holds `n^4`.
#[no_mangle]
pub unsafe extern "C" fn fsl_hh_curvature(
    s: *const FslStructure,
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> FslStatus {
    guard(|| {
        let s = handle(s)?;
        let p = base_point(s, x, y, n)?;
        emit(out, &curvature::hh_curvature(s, &p)?.components)
    })
}

/// hv-curvature `P^i_jkl`, `n^4` values.
///
/// # Safety
/// `x` and `y` hold `n` values; `out` holds `n^4`.
#[no_mangle]
pub unsafe extern "C" fn fsl_hv_curvature(
    s: *const FslStructure,
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> FslStatus {
    guard(|| {
        let s = handle(s)?;
        let p = base_point(s, x, y, n)?;
        emit(out, &curvature::hv_curvature(s, &p)?.components)
    })
}

/// Flag curvature of the flag with pole `y` and transverse edge `u`.
///
/// # Safety
/// `x`, `y` and `u` hold `n` values; `out` points to one value.
#[no_mangle]
pub unsafe extern "C" fn fsl_flag_curvature(
    s: *const FslStructure,
    x: *const f64,
    y: *const f64,
    u: *const f64,
    n: usize,
    out: *mut f64,
) -> FslStatus {
    guard(|| {
        let s = handle(s)?;
        let p = base_point(s, x, y, n)?;
        if u.is_null() {
            return Err(null("u"));
        }
        let u = std::slice::from_raw_parts(u, n);
        emit(out, &[curvature::flag_curvature(s, &p, u)?])
    })
}

/// Runs a full check configuration (the CLI's TOML format) and returns the
/// JSON report in `*report_json` and the CLI exit status in `*exit_code`.
///
/// # Safety
/// `config_toml` must be NUL-terminated; the out pointers must be valid.
/// The report is released with [`fsl_string_free`].
#[no_mangle]
pub unsafe extern "C" fn fsl_run(
    config_toml: *const c_char,
    report_json: *mut *mut c_char,
    exit_code: *mut i32,
) -> FslStatus {
    guard(|| {
        if report_json.is_null() || exit_code.is_null() {
            return Err(null("out"));
        }
        let cfg = RunConfig::from_toml(text(config_toml, "config_toml")?)?;
        let report = cli::run(&cfg)?;
        let json = CString::new(report.to_json()).map_err(|_| Fail(FslStatus::Numeric, "NUL in report".into()))?;
        *exit_code = report.exit_code();
        *report_json = json.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fsl_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}
