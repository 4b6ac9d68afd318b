//! C ABI over the ergomfg solvers.
//!
//! A problem is built once from JSON and passed back by opaque pointer.
//! Every call returns an [`ErgomfgStatus`]; on failure the message is kept
//! per thread and read with [`ergomfg_last_error`]. Results come back through
//! out-pointers, structured ones as JSON strings freed with
//! [`ergomfg_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ergomfg::control::{ergodic_cost, solve_control, ThresholdPair};
use ergomfg::hjb::{solve_fbp, DEFAULT_STEPS};
use ergomfg::mfg::{find_equilibria, stationary_mean};
use ergomfg::models::{CostModel, DiffusionModel, Problem};
use ergomfg::numerics::{Tolerance, Window};
use ergomfg::Error;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErgomfgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    NoBracket = 4,
    SolverFailure = 5,
    Panic = 6,
}

/// Opaque handle to a diffusion, a cost and a quadrature tolerance.
pub struct ErgomfgProblem {
    inner: Problem,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSpec {
    model: DiffusionModel,
    cost: CostModel,
    #[serde(default)]
    quadrature: Tolerance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: ErgomfgStatus, msg: impl Into<String>) -> ErgomfgStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> ErgomfgStatus {
    let status = match e {
        Error::NoBracket(_) => ErgomfgStatus::NoBracket,
        Error::InvalidParameter { .. } | Error::UnknownFamily(_) | Error::DegenerateInterval { .. } => ErgomfgStatus::InvalidConfig,
        _ => ErgomfgStatus::SolverFailure,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> ErgomfgStatus) -> ErgomfgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(ErgomfgStatus::Panic, msg)
        }
    }
}

unsafe fn problem_ref<'a>(p: *const ErgomfgProblem) -> Result<&'a Problem, ErgomfgStatus> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| fail(ErgomfgStatus::NullPointer, "problem handle is null"))
}

fn pair(a: f64, b: f64) -> Result<ThresholdPair, ErgomfgStatus> {
    ThresholdPair::new(a, b).map_err(from_error)
}

fn write_out<T>(out: *mut T, value: T) -> ErgomfgStatus {
    if out.is_null() {
        return fail(ErgomfgStatus::NullPointer, "output pointer is null");
    }
    // SAFETY: checked non-null; the caller provides a writable slot.
    unsafe { out.write(value) };
    ErgomfgStatus::Ok
}

fn write_json<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> ErgomfgStatus {
    match serde_json::to_string(value).map(CString::new) {
        Ok(Ok(s)) => write_out(out, s.into_raw()),
        _ => fail(ErgomfgStatus::SolverFailure, "could not serialise the result"),
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Builds a problem from `{"model": ..., "cost": ..., "quadrature": ...}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn ergomfg_problem_new(json: *const c_char, out: *mut *mut ErgomfgProblem) -> ErgomfgStatus {
    guarded(|| {
        if json.is_null() {
            return fail(ErgomfgStatus::NullPointer, "json is null");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(ErgomfgStatus::InvalidUtf8, e.to_string()),
        };
        let spec: ProblemSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => return fail(ErgomfgStatus::InvalidConfig, e.to_string()),
        };
        let checks = spec.model.validate().and(spec.cost.validate()).and(spec.quadrature.validate());
        if let Err(e) = checks {
            return from_error(e);
        }
        let handle = Box::new(ErgomfgProblem {
            inner: Problem::new(spec.model, spec.cost).with_tolerance(spec.quadrature),
        });
        let raw = Box::into_raw(handle);
        let status = write_out(out, raw);
        if status != ErgomfgStatus::Ok {
            drop(Box::from_raw(raw));
        }
        status
    })
}

/// Releases a handle from [`ergomfg_problem_new`]. Null is ignored.
///
/// # Safety
/// `problem` must come from [`ergomfg_problem_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ergomfg_problem_free(problem: *mut ErgomfgProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Long-run average cost of reflecting on `[a, b]` with the market statistic frozen at `y`.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ergomfg_ergodic_cost(problem: *const ErgomfgProblem, a: f64, b: f64, y: f64, out: *mut f64) -> ErgomfgStatus {
    guarded(|| {
        let p = try_status!(problem_ref(problem));
        let k = try_status!(pair(a, b));
        match ergodic_cost(p, k, y) {
            Ok(v) => write_out(out, v),
            Err(e) => from_error(e),
        }
    })
}

/// Stationary mean of the market statistic under reflection on `[a, b]`.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ergomfg_stationary_mean(problem: *const ErgomfgProblem, a: f64, b: f64, out: *mut f64) -> ErgomfgStatus {
    guarded(|| {
        let p = try_status!(problem_ref(problem));
        let k = try_status!(pair(a, b));
        match stationary_mean(p, k) {
            Ok(v) => write_out(out, v),
            Err(e) => from_error(e),
        }
    })
}

/// Optimal barriers against a frozen `y`, searched on `grid_n` nodes of `[lo, hi]`.
///
/// # Safety
/// `problem` must be a live handle; `a_out`, `b_out` and `value_out` writable.
#[no_mangle]
pub unsafe extern "C" fn ergomfg_solve_control(
    problem: *const ErgomfgProblem,
    y: f64,
    lo: f64,
    hi: f64,
    grid_n: usize,
    a_out: *mut f64,
    b_out: *mut f64,
    value_out: *mut f64,
) -> ErgomfgStatus {
    guarded(|| {
        let p = try_status!(problem_ref(problem));
        if a_out.is_null() || b_out.is_null() || value_out.is_null() {
            return fail(ErgomfgStatus::NullPointer, "output pointer is null");
        }
        let scan = try_status!(Window::new(lo, hi, grid_n).map_err(from_error));
        match solve_control(p, y, &scan) {
            Ok(sol) => {
                write_out(a_out, sol.thresholds.a);
                write_out(b_out, sol.thresholds.b);
                write_out(value_out, sol.value)
            }
            Err(e) => from_error(e),
        }
    })
}

/// Shooting value of the free-boundary problem on `[a, b]` at frozen `y`.
/// `steps == 0` selects the default resolution.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ergomfg_hjb_lambda(problem: *const ErgomfgProblem, a: f64, b: f64, y: f64, steps: usize, out: *mut f64) -> ErgomfgStatus {
    guarded(|| {
        let p = try_status!(problem_ref(problem));
        let k = try_status!(pair(a, b));
        let steps = if steps == 0 { DEFAULT_STEPS } else { steps };
        match solve_fbp(p, k, y, steps) {
            Ok(sol) => write_out(out, sol.lambda),
            Err(e) => from_error(e),
        }
    })
}

/// Equilibrium pairs on `grid_n` nodes of `[lo, hi]`, as a JSON array.
/// The string must be released with [`ergomfg_string_free`].
///
/// # Safety
/// `problem` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ergomfg_find_equilibria(problem: *const ErgomfgProblem, lo: f64, hi: f64, grid_n: usize, out_json: *mut *mut c_char) -> ErgomfgStatus {
    guarded(|| {
        let p = try_status!(problem_ref(problem));
        let scan = try_status!(Window::new(lo, hi, grid_n).map_err(from_error));
        write_json(out_json, &find_equilibria(p, &scan))
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ergomfg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ergomfg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ergomfg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
