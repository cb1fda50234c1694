//! C ABI over the zeno simulation library.
//!
//! Every entry point returns a [`ZenoStatus`]; on failure a description is
//! available from [`zeno_last_error_message`] on the same thread. Results are
//! opaque [`ZenoResult`] handles released with [`zeno_result_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use zeno::config::ExperimentConfig;
use zeno::scenarios::ExperimentResult;
use zeno::schedule::{survival_product, zeno_survival_ideal};
use zeno::ZenoError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZenoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    SimulationError = 4,
    InvalidArgument = 5,
    NotFound = 6,
    Panic = 7,
}

/// Opaque handle to a finished run.
pub struct ZenoResult {
    inner: ExperimentResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: ZenoStatus, message: impl Into<String>) -> ZenoStatus {
    set_error(message);
    status
}

fn from_error(err: ZenoError) -> ZenoStatus {
    let status = if err.is_config_error() {
        ZenoStatus::ConfigError
    } else {
        ZenoStatus::SimulationError
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> ZenoStatus) -> ZenoStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| fail(ZenoStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, ZenoStatus> {
    if s.is_null() {
        return Err(fail(ZenoStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(ZenoStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn result_ref<'a>(r: *const ZenoResult) -> Result<&'a ExperimentResult, ZenoStatus> {
    r.as_ref()
        .map(|r| &r.inner)
        .ok_or_else(|| fail(ZenoStatus::NullPointer, "null result handle"))
}

macro_rules! out_ptr {
    ($p:expr) => {
        if $p.is_null() {
            return fail(ZenoStatus::NullPointer, "null output pointer");
        }
    };
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn zeno_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn zeno_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Upper-level population after `n` equally spaced ideal measurements
/// during a pi-pulse.
///
/// # Safety
/// `out` must be a valid pointer to a `double`.
#[no_mangle]
pub unsafe extern "C" fn zeno_ideal_p2(n: usize, out: *mut f64) -> ZenoStatus {
    guard(|| {
        out_ptr!(out);
        match zeno_survival_ideal(n) {
            Ok(v) => {
                *out = v;
                ZenoStatus::Ok
            }
            Err(e) => fail(ZenoStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Short-time survival product `[1 − (ΔH·T/n)²]ⁿ`; `out_valid` reports
/// whether the short-time expansion applies.
///
/// # Safety
/// `out_value` and `out_valid` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn zeno_survival_product(
    n: usize,
    energy_variance: f64,
    total_time: f64,
    out_value: *mut f64,
    out_valid: *mut bool,
) -> ZenoStatus {
    guard(|| {
        out_ptr!(out_value);
        out_ptr!(out_valid);
        match survival_product(n, energy_variance, total_time) {
            Ok(p) => {
                *out_value = p.value;
                *out_valid = p.valid;
                ZenoStatus::Ok
            }
            Err(e) => fail(ZenoStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Parses a TOML experiment document and runs its scenario.
///
/// # Safety
/// `config_toml` must be a NUL-terminated string; `out` a valid pointer that
/// receives a handle to free with [`zeno_result_free`].
#[no_mangle]
pub unsafe extern "C" fn zeno_run_config(
    config_toml: *const c_char,
    out: *mut *mut ZenoResult,
) -> ZenoStatus {
    guard(|| {
        out_ptr!(out);
        *out = ptr::null_mut();
        let text = try_status!(read_str(config_toml));
        let mut cfg = match ExperimentConfig::from_toml_str(text) {
            Ok(cfg) => cfg,
            Err(e) => return from_error(e),
        };
        cfg.apply_overrides(Default::default());
        match cfg.run() {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ZenoResult { inner }));
                ZenoStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Looks up a summary scalar such as `p2_final`.
///
/// # Safety
/// `result` must be a live handle, `key` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zeno_result_summary(
    result: *const ZenoResult,
    key: *const c_char,
    out: *mut f64,
) -> ZenoStatus {
    guard(|| {
        out_ptr!(out);
        let r = try_status!(result_ref(result));
        let key = try_status!(read_str(key));
        match r.summary_value(key) {
            Some(v) => {
                *out = v;
                ZenoStatus::Ok
            }
            None => fail(ZenoStatus::NotFound, format!("no summary value `{key}`")),
        }
    })
}

/// Number of time samples and of population series.
///
/// # Safety
/// `result` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zeno_result_len(
    result: *const ZenoResult,
    out_samples: *mut usize,
    out_series: *mut usize,
) -> ZenoStatus {
    guard(|| {
        out_ptr!(out_samples);
        out_ptr!(out_series);
        let r = try_status!(result_ref(result));
        *out_samples = r.time_grid.len();
        *out_series = r.populations.len();
        ZenoStatus::Ok
    })
}

/// Time and population of series `series` at sample `sample`.
///
/// # Safety
/// `result` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zeno_result_population(
    result: *const ZenoResult,
    series: usize,
    sample: usize,
    out_time: *mut f64,
    out_value: *mut f64,
) -> ZenoStatus {
    guard(|| {
        out_ptr!(out_time);
        out_ptr!(out_value);
        let r = try_status!(result_ref(result));
        let value = r
            .populations
            .get(series)
            .and_then(|s| s.values.get(sample));
        match (value, r.time_grid.get(sample)) {
            (Some(v), Some(t)) => {
                *out_time = *t;
                *out_value = *v;
                ZenoStatus::Ok
            }
            _ => fail(
                ZenoStatus::InvalidArgument,
                format!("series {series} / sample {sample} out of range"),
            ),
        }
    })
}

/// Serializes the whole result as JSON; free the string with
/// [`zeno_string_free`].
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zeno_result_to_json(
    result: *const ZenoResult,
    out: *mut *mut c_char,
) -> ZenoStatus {
    guard(|| {
        out_ptr!(out);
        *out = ptr::null_mut();
        let r = try_status!(result_ref(result));
        let json = serde_json::to_string(r).expect("results serialize");
        match CString::new(json) {
            Ok(s) => {
                *out = s.into_raw();
                ZenoStatus::Ok
            }
            Err(_) => fail(ZenoStatus::InvalidUtf8, "JSON contains NUL"),
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zeno_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `result` must be NULL or a handle from [`zeno_run_config`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zeno_result_free(result: *mut ZenoResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
