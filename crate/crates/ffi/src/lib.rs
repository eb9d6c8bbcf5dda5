//! C ABI over `fraccontact`.
//!
//! Every function returns an [`FcStatus`]; results come back through out
//! pointers. On failure the message is available from [`fc_last_error`] on
//! the same thread. Scenarios and solutions are opaque heap handles that the
//! caller releases with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use fraccontact::bounds::bound_for;
use fraccontact::config::{parse_config, ScenarioConfig};
use fraccontact::hierarchy::{solve_chain_streaming, FractionalParams, NormRow};
use fraccontact::specfun::{gamma, mittag_leffler_two, wright, Alpha};
use fraccontact::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    Domain = 1,
    Overflow = 2,
    Convergence = 3,
    Numerical = 4,
    Config = 5,
    Io = 6,
    NullPointer = 7,
    InvalidUtf8 = 8,
    OutOfRange = 9,
    Panic = 10,
}

/// One row of the chain norm table.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FcNormRow {
    pub n: usize,
    pub t: f64,
    pub max_norm: f64,
    pub probe_value: f64,
}

/// Parsed scenario configuration.
pub struct FcScenario {
    config: ScenarioConfig,
}

/// Norm rows of a chain solve, possibly partial.
pub struct FcSolution {
    rows: Vec<FcNormRow>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> FcStatus {
    match err {
        Error::Domain(_) | Error::Pole(_) | Error::RegimeMismatch { .. } => FcStatus::Domain,
        Error::Overflow(_) => FcStatus::Overflow,
        Error::Convergence(_) => FcStatus::Convergence,
        Error::Config(_) => FcStatus::Config,
        Error::Io { .. } => FcStatus::Io,
        _ => FcStatus::Numerical,
    }
}

fn fail(status: FcStatus, msg: &str) -> FcStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> FcStatus {
    fail(status_of(&err), &err.to_string())
}

/// Runs `body`, turning panics into `FcStatus::Panic` and clearing the last
/// error on success.
fn guard<F: FnOnce() -> FcStatus>(body: F) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(FcStatus::Ok) => {
            set_error("");
            FcStatus::Ok
        }
        Ok(s) => s,
        Err(_) => fail(FcStatus::Panic, "internal panic"),
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> FcStatus {
    if out.is_null() {
        return fail(FcStatus::NullPointer, "null output pointer");
    }
    out.write(value);
    FcStatus::Ok
}

unsafe fn scalar<F: FnOnce() -> fraccontact::Result<f64>>(out: *mut f64, f: F) -> FcStatus {
    if out.is_null() {
        return fail(FcStatus::NullPointer, "null output pointer");
    }
    match f() {
        Ok(v) => write_out(out, v),
        Err(e) => from_error(e),
    }
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, FcStatus> {
    if s.is_null() {
        return Err(fail(FcStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(FcStatus::InvalidUtf8, "string is not valid UTF-8"))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be null or valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn fc_gamma(x: f64, out: *mut f64) -> FcStatus {
    guard(|| scalar(out, || gamma(x)))
}

/// Two-parameter Mittag-Leffler function E_{α,β}(z); α in (0, 1].
///
/// # Safety
/// `out` must be null or valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn fc_mittag_leffler(alpha: f64, beta: f64, z: f64, out: *mut f64) -> FcStatus {
    guard(|| scalar(out, || mittag_leffler_two(Alpha::new(alpha)?, beta, z)))
}

/// Wright function Φ_α(z); α in (0, 1), z ≥ 0.
///
/// # Safety
/// `out` must be null or valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn fc_wright(alpha: f64, z: f64, out: *mut f64) -> FcStatus {
    guard(|| scalar(out, || wright(Alpha::new(alpha)?, z)))
}

/// A priori bound on the order-n correlation norm at time t, chosen by the
/// regime of κ. `a` is the kernel constant (at least 1).
///
/// # Safety
/// `out` must be null or valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn fc_bound(n: usize, t: f64, alpha: f64, kappa: f64, c: f64, a: f64, out: *mut f64) -> FcStatus {
    guard(|| scalar(out, || bound_for(n, t, &FractionalParams::new(alpha, kappa, c)?, a)))
}

unsafe fn store_scenario(config: ScenarioConfig, out: *mut *mut FcScenario) -> FcStatus {
    write_out(out, Box::into_raw(Box::new(FcScenario { config })))
}

/// Parses a scenario from configuration text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_parse(text: *const c_char, out: *mut *mut FcScenario) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::NullPointer, "null output pointer");
        }
        let text = match c_str(text) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match parse_config(text) {
            Ok(c) => store_scenario(c, out),
            Err(e) => from_error(e.into()),
        }
    })
}

/// Loads a scenario from a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_load(path: *const c_char, out: *mut *mut FcScenario) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::NullPointer, "null output pointer");
        }
        let path = match c_str(path) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match ScenarioConfig::load(Path::new(path)) {
            Ok(c) => store_scenario(c, out),
            Err(e) => from_error(e),
        }
    })
}

/// Replaces the scenario's output times.
///
/// # Safety
/// `scenario` must come from `fc_scenario_parse`/`fc_scenario_load`;
/// `times` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_set_times(scenario: *mut FcScenario, times: *const f64, len: usize) -> FcStatus {
    guard(|| {
        if scenario.is_null() || (times.is_null() && len > 0) {
            return fail(FcStatus::NullPointer, "null scenario or times");
        }
        let times = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(times, len).to_vec() };
        let sc = &mut *scenario;
        match sc.config.clone().with_times(times) {
            Ok(c) => {
                sc.config = c;
                FcStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_free(scenario: *mut FcScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Solves the correlation chain of a scenario.
///
/// On a numerical failure part way through (typically overflow), `*out`
/// still receives a solution holding the rows completed before the failure
/// and the failure status is returned. On other failures `*out` is null.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fc_solve(scenario: *const FcScenario, out: *mut *mut FcSolution) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::NullPointer, "null output pointer");
        }
        out.write(ptr::null_mut());
        if scenario.is_null() {
            return fail(FcStatus::NullPointer, "null scenario");
        }
        let chain = match (*scenario).config.chain_config() {
            Ok(c) => c,
            Err(e) => return from_error(e),
        };
        let mut rows = Vec::new();
        let result = solve_chain_streaming(&chain, |r: &NormRow, _| {
            rows.push(FcNormRow { n: r.n, t: r.t, max_norm: r.max_norm, probe_value: r.probe_value });
            Ok(())
        });
        out.write(Box::into_raw(Box::new(FcSolution { rows })));
        match result {
            Ok(_) => FcStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

/// Number of rows in a solution; 0 for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_solution_len(solution: *const FcSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.rows.len())
}

/// Copies row `index` (ordered by n, then t) into `*out`.
///
/// # Safety
/// `solution` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fc_solution_row(solution: *const FcSolution, index: usize, out: *mut FcNormRow) -> FcStatus {
    guard(|| {
        let Some(sol) = solution.as_ref() else {
            return fail(FcStatus::NullPointer, "null solution");
        };
        match sol.rows.get(index) {
            Some(r) => write_out(out, *r),
            None => fail(FcStatus::OutOfRange, &format!("row {index} of {}", sol.rows.len())),
        }
    })
}

/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_solution_free(solution: *mut FcSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}
