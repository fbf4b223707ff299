//! C interface to the `hbcs` library.
//!
//! Every function returns an [`HbcsStatus`]. On failure the message is available from
//! [`hbcs_last_error`] on the same thread until the next call into the library.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hbcs::certify::{self, Outcome};
use hbcs::simulate::{self, InputSignal};
use hbcs::{spectral, system, transfer, Error, ErrorKind, HyperbolicSystem};

/// Opaque handle to a parsed system.
pub struct HbcsSystem {
    inner: HyperbolicSystem,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbcsStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    InvalidInput = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbcsOutcome {
    CertifiedBibo = 0,
    Inconclusive = 1,
    InvalidInput = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn fail(status: HbcsStatus, msg: impl Into<String>) -> HbcsStatus {
    set_error(msg);
    status
}

fn from_error(err: &Error) -> HbcsStatus {
    let status = match (err, err.kind()) {
        (Error::Parse(_) | Error::Format { .. }, _) => HbcsStatus::Parse,
        (_, ErrorKind::InvalidInput) => HbcsStatus::InvalidInput,
        (_, ErrorKind::Numerical) => HbcsStatus::Numerical,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> HbcsStatus) -> HbcsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(HbcsStatus::Panic, "internal panic"))
}

macro_rules! deref {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(v) => v,
            None => return fail(HbcsStatus::NullPointer, concat!(stringify!($ptr), " is null")),
        }
    };
}

macro_rules! deref_mut {
    ($ptr:expr) => {
        match unsafe { $ptr.as_mut() } {
            Some(v) => v,
            None => return fail(HbcsStatus::NullPointer, concat!(stringify!($ptr), " is null")),
        }
    };
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return from_error(&err),
        }
    };
}

/// Message of the last failed call on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn hbcs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parse a JSON system definition. On success `*out` owns a handle for [`hbcs_system_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hbcs_system_from_json(json: *const c_char, out: *mut *mut HbcsSystem) -> HbcsStatus {
    guard(|| {
        let out = deref_mut!(out);
        *out = ptr::null_mut();
        if json.is_null() {
            return fail(HbcsStatus::NullPointer, "json is null");
        }
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(e) => return fail(HbcsStatus::Parse, format!("input is not UTF-8: {e}")),
        };
        let inner = attempt!(hbcs::io::parse_system(text));
        *out = Box::into_raw(Box::new(HbcsSystem { inner }));
        HbcsStatus::Ok
    })
}

/// # Safety
/// `sys` must come from [`hbcs_system_from_json`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hbcs_system_free(sys: *mut HbcsSystem) {
    if !sys.is_null() {
        drop(unsafe { Box::from_raw(sys) });
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hbcs_system_dim(sys: *const HbcsSystem, n: *mut usize) -> HbcsStatus {
    guard(|| {
        let sys = deref!(sys);
        *deref_mut!(n) = sys.inner.n;
        HbcsStatus::Ok
    })
}

/// Run all structural checks; `*ok` is 1 when every check passes.
/// The names of failed checks are reported through [`hbcs_last_error`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hbcs_validate(sys: *const HbcsSystem, tol: f64, ok: *mut i32) -> HbcsStatus {
    guard(|| {
        let sys = deref!(sys);
        let ok = deref_mut!(ok);
        let rep = attempt!(system::validate_system(&sys.inner, tol));
        *ok = i32::from(rep.ok);
        if !rep.ok {
            let names: Vec<&str> = rep.failed_checks().map(|c| c.name).collect();
            set_error(names.join("; "));
        }
        HbcsStatus::Ok
    })
}

/// Evaluate the transfer function at `s = re + i·im`, writing it row-major into
/// `out_re`/`out_im`, each holding `len ≥ n²` doubles.
///
/// # Safety
/// Output buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hbcs_transfer_eval(
    sys: *const HbcsSystem,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    len: usize,
) -> HbcsStatus {
    guard(|| {
        let sys = deref!(sys);
        if out_re.is_null() || out_im.is_null() {
            return fail(HbcsStatus::NullPointer, "output buffer is null");
        }
        let n = sys.inner.n;
        if len < n * n {
            return fail(HbcsStatus::BufferTooSmall, format!("need {} entries, got {len}", n * n));
        }
        let g = attempt!(transfer::transfer_eval(&sys.inner, hbcs::linalg::c(re, im))).g;
        let (re_out, im_out) = unsafe { (std::slice::from_raw_parts_mut(out_re, len), std::slice::from_raw_parts_mut(out_im, len)) };
        for i in 0..n {
            for j in 0..n {
                re_out[i * n + j] = g[(i, j)].re;
                im_out[i * n + j] = g[(i, j)].im;
            }
        }
        HbcsStatus::Ok
    })
}

/// Attempt a BIBO certificate. `*report` receives a JSON string for [`hbcs_string_free`];
/// pass null to skip it.
///
/// # Safety
/// `sys` and `outcome` must be valid; `report` may be null.
#[no_mangle]
pub unsafe extern "C" fn hbcs_certify(
    sys: *const HbcsSystem,
    k_max: usize,
    outcome: *mut HbcsOutcome,
    report: *mut *mut c_char,
) -> HbcsStatus {
    guard(|| {
        let sys = deref!(sys);
        let outcome = deref_mut!(outcome);
        let rep = attempt!(certify::certify(&sys.inner, k_max));
        *outcome = match rep.outcome {
            Outcome::CertifiedBibo => HbcsOutcome::CertifiedBibo,
            Outcome::Inconclusive => HbcsOutcome::Inconclusive,
            Outcome::InvalidInput => HbcsOutcome::InvalidInput,
        };
        if let Some(report) = unsafe { report.as_mut() } {
            let text = hbcs::cli::certificate_json(&rep).to_string();
            *report = CString::new(text).map_or(ptr::null_mut(), CString::into_raw);
        }
        HbcsStatus::Ok
    })
}

/// Simulate the zero-state response to the constant input `u` (length n) on `[0, t_end]`
/// and store `sup_t max_i |y_i(t)|` in `*sup_y`.
///
/// # Safety
/// `u` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn hbcs_simulate_constant(
    sys: *const HbcsSystem,
    u: *const f64,
    n: usize,
    t_end: f64,
    dt: f64,
    sup_y: *mut f64,
) -> HbcsStatus {
    guard(|| {
        let sys = deref!(sys);
        let sup_y = deref_mut!(sup_y);
        if u.is_null() {
            return fail(HbcsStatus::NullPointer, "u is null");
        }
        if n != sys.inner.n {
            return fail(HbcsStatus::InvalidInput, format!("input has {n} channels, system has {}", sys.inner.n));
        }
        let input = InputSignal::Constant(unsafe { std::slice::from_raw_parts(u, n) }.to_vec());
        let diag = attempt!(spectral::diagonalize(&sys.inner, spectral::DEFAULT_GRID_SIZE));
        let dec = attempt!(diag.decompose());
        let trace = attempt!(simulate::simulate(&diag, &dec, &input, t_end, dt));
        *sup_y = trace.sup_y.last().copied().unwrap_or(0.0);
        HbcsStatus::Ok
    })
}

/// # Safety
/// `s` must come from this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hbcs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
