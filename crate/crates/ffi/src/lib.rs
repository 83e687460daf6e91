//! C ABI over `hem-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_run`
//! and released by the matching `*_free`. Every fallible call returns a
//! [`HemStatus`]; the message of the most recent failure on the calling
//! thread is available from [`hem_last_error`]. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hem_core::closedform::{hem_constant, residue_j1, selberg22, HemLabel, SelbergArgs};
use hem_core::report::VerificationReport;
use hem_core::suite::{run_suite, SuiteName, SuiteOptions};
use hem_core::{HemError, Params};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HemStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    Usage = 3,
    Phase = 4,
    Domain = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

/// Which HEM constant.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HemConstantLabel {
    Bulk12 = 0,
    Bulk21 = 1,
    Boundary12 = 2,
    Boundary21 = 3,
}

impl From<HemConstantLabel> for HemLabel {
    fn from(l: HemConstantLabel) -> Self {
        match l {
            HemConstantLabel::Bulk12 => HemLabel::Bulk12,
            HemConstantLabel::Bulk21 => HemLabel::Bulk21,
            HemConstantLabel::Boundary12 => HemLabel::Boundary12,
            HemConstantLabel::Boundary21 => HemLabel::Boundary21,
        }
    }
}

/// Opaque model parameters.
pub struct HemParams(Params);

/// Opaque verification report.
pub struct HemReport(VerificationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &HemError) -> HemStatus {
    match e {
        HemError::InvalidParams(_) => HemStatus::InvalidParams,
        HemError::Usage(_) => HemStatus::Usage,
        HemError::Phase { .. } => HemStatus::Phase,
        HemError::Domain(_) => HemStatus::Domain,
        HemError::Io(_) => HemStatus::Io,
        _ => HemStatus::Numerical,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), HemStatusError>) -> HemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HemStatus::Ok,
        Ok(Err(HemStatusError::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            HemStatus::NullPointer
        }
        Ok(Err(HemStatusError::Hem(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            HemStatus::Panic
        }
    }
}

enum HemStatusError {
    Null(&'static str),
    Hem(HemError),
}

impl From<HemError> for HemStatusError {
    fn from(e: HemError) -> Self {
        HemStatusError::Hem(e)
    }
}

fn non_null<T>(p: *mut T, what: &'static str) -> Result<*mut T, HemStatusError> {
    if p.is_null() {
        Err(HemStatusError::Null(what))
    } else {
        Ok(p)
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates parameters; `*out` receives a handle to free with [`hem_params_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hem_params_new(gamma: f64, mu: f64, mu_l: f64, mu_r: f64, out: *mut *mut HemParams) -> HemStatus {
    guard(|| {
        let out = non_null(out, "out")?;
        let p = Params::new(gamma, mu, mu_l, mu_r)?;
        *out = Box::into_raw(Box::new(HemParams(p)));
        Ok(())
    })
}

/// # Safety
/// `params` must be NULL or a handle from [`hem_params_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hem_params_free(params: *mut HemParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Stated and chained values of one HEM constant.
///
/// # Safety
/// `params` must be a live handle; `stated` and `chained` writable.
#[no_mangle]
pub unsafe extern "C" fn hem_constant_eval(
    params: *const HemParams,
    label: HemConstantLabel,
    stated: *mut f64,
    chained: *mut f64,
) -> HemStatus {
    guard(|| {
        let p = &(*non_null(params.cast_mut(), "params")?).0;
        let (s, c) = (non_null(stated, "stated")?, non_null(chained, "chained")?);
        let k = hem_constant(label.into(), p)?;
        *s = k.stated;
        *c = k.chained;
        Ok(())
    })
}

/// Closed-form `S_{2,2}(a, b, c)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hem_selberg22(a: f64, b: f64, c: f64, out: *mut f64) -> HemStatus {
    guard(|| {
        let out = non_null(out, "out")?;
        *out = selberg22(&SelbergArgs::new(a, b, c))?.value.re;
        Ok(())
    })
}

/// Stated residue of `J₁` at `α_{2,1}`.
///
/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hem_residue_j1(params: *const HemParams, out: *mut f64) -> HemStatus {
    guard(|| {
        let p = &(*non_null(params.cast_mut(), "params")?).0;
        let out = non_null(out, "out")?;
        *out = residue_j1(p)?.stated;
        Ok(())
    })
}

/// Runs a named suite (`algebra`, `selberg`, `residues`, `chains`, `gmc`,
/// `all`) with default options and the given seed.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hem_suite_run(name: *const c_char, seed: u64, out: *mut *mut HemReport) -> HemStatus {
    guard(|| {
        let name = CStr::from_ptr(non_null(name.cast_mut(), "name")?);
        let out = non_null(out, "out")?;
        let name = name.to_str().map_err(|_| HemError::Usage("suite name is not UTF-8".into()))?;
        let suite: SuiteName = name.parse()?;
        let opts = SuiteOptions { seed, ..SuiteOptions::default() };
        *out = Box::into_raw(Box::new(HemReport(run_suite(suite, &opts))));
        Ok(())
    })
}

/// 1 when no check failed, 0 otherwise, -1 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hem_report_passed(report: *const HemReport) -> c_int {
    report.as_ref().map_or(-1, |r| r.0.passed() as c_int)
}

/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hem_report_check_count(report: *const HemReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.checks.len())
}

/// Canonical JSON of the report; free with [`hem_string_free`]. NULL on a
/// NULL handle.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hem_report_json(report: *const HemReport) -> *mut c_char {
    match report.as_ref() {
        Some(r) => CString::new(r.0.to_json()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `report` must be NULL or a handle from [`hem_suite_run`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hem_report_free(report: *mut HemReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hem_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
