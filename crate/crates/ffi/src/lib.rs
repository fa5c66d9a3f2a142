//! C ABI for `uicrit`.
//!
//! Models are opaque handles created by [`uic_model_load`] or
//! [`uic_model_plugin`] and released with [`uic_model_free`]. Every fallible
//! call returns a [`UicStatus`]; on failure the message is kept per thread
//! and can be copied out with [`uic_last_error_message`]. Panics are caught
//! at the boundary and reported as `UIC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use uicrit::modelspec::{eval_expr, load_model, parse_expr, plugin_model, ModelError, ModelFile};
use uicrit::poussin::find_thresholds;
use uicrit::{Criterion, Error, Horizons, PhiFunction};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Model = 4,
    Expr = 5,
    Eval = 6,
    SearchCap = 7,
    InvalidArgument = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// A loaded, validated model.
pub struct UicModel {
    inner: ModelFile,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(UicStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::SearchCapExceeded { .. } => UicStatus::SearchCap,
            Error::InvalidArgument(_) | Error::InvalidLevel(_) | Error::InvalidPhi(_) => UicStatus::InvalidArgument,
            _ => UicStatus::Eval,
        };
        Failure(status, e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let status = match e {
            ModelError::Io { .. } => UicStatus::Io,
            _ => UicStatus::Model,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: UicStatus, message: impl Into<String>) -> Failure {
    Failure(status, message.into())
}

/// Runs `f`, records any failure for [`uic_last_error_message`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UicStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".to_string());
        Err(fail(UicStatus::Panic, msg))
    });
    match outcome {
        Ok(()) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            UicStatus::Ok
        }
        Err(Failure(status, msg)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = msg);
            status
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(UicStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(UicStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        c_str(p, what).map(Some)
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(UicStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(fail(UicStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(p)
    }
}

unsafe fn model_ref<'a>(m: *const UicModel) -> Result<&'a ModelFile, Failure> {
    if m.is_null() {
        return Err(fail(UicStatus::NullPointer, "model is null"));
    }
    Ok(&(*m).inner)
}

fn horizons(atoms: u64, series: u64) -> Horizons {
    let d = Horizons::default();
    Horizons {
        atoms: if atoms == 0 { d.atoms } else { atoms },
        series: if series == 0 { d.series } else { series },
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn uic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf`, truncated
/// and NUL-terminated. Returns the full message length in bytes, without
/// the terminator; 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be null or valid for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn uic_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && capacity > 0 {
            let n = msg.len().min(capacity - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Loads and validates a model file; `*out` receives the handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uic_model_load(path: *const c_char, out: *mut *mut UicModel) -> UicStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let path = c_str(path, "path")?;
        let inner = load_model(path)?;
        *out = Box::into_raw(Box::new(UicModel { inner }));
        Ok(())
    })
}

/// Builds the one-family model around a built-in plugin.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uic_model_plugin(name: *const c_char, n_max: u64, out: *mut *mut UicModel) -> UicStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let name = c_str(name, "name")?;
        let inner = plugin_model(name, n_max)?;
        *out = Box::into_raw(Box::new(UicModel { inner }));
        Ok(())
    })
}

/// Releases a model handle. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn uic_model_free(model: *mut UicModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Profile of `criterion` (`ui`, `wui`, `wsui`, `uni`, `wuni`, `wsuni`,
/// `sui`) at `n_levels` levels. `values` receives the reported values;
/// `lo` and `hi`, when not null, the certificate interval. A null `family`
/// selects the first family by name; zero horizons select the defaults.
///
/// # Safety
/// Strings must be NUL-terminated; `levels` and each non-null output must
/// be valid for `n_levels` elements.
#[no_mangle]
pub unsafe extern "C" fn uic_profile(
    model: *const UicModel,
    family: *const c_char,
    criterion: *const c_char,
    levels: *const f64,
    n_levels: usize,
    atom_horizon: u64,
    series_horizon: u64,
    values: *mut f64,
    lo: *mut f64,
    hi: *mut f64,
) -> UicStatus {
    guard(|| {
        let m = model_ref(model)?;
        let family = optional_text(family, "family")?;
        let criterion: Criterion = c_str(criterion, "criterion")?.parse()?;
        let levels = slice(levels, n_levels, "levels")?;
        let values = out_ptr(values, "values")?;
        let f = m.family(family)?;
        let p = f.profile(criterion, levels, &horizons(atom_horizon, series_horizon))?;
        for (i, pt) in p.points.iter().enumerate() {
            *values.add(i) = pt.result.value;
            if !lo.is_null() {
                *lo.add(i) = pt.result.lo();
            }
            if !hi.is_null() {
                *hi.add(i) = pt.result.hi();
            }
        }
        Ok(())
    })
}

/// Searches the `k` thresholds of φ for a family. `*written` receives `k`
/// on success; `UIC_STATUS_BUFFER_TOO_SMALL` is returned, with `*written`
/// set to `k`, when `capacity < k`.
///
/// # Safety
/// `thresholds` must be valid for `capacity` elements and `written` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uic_phi_find(
    model: *const UicModel,
    family: *const c_char,
    k: u32,
    search_cap: u64,
    thresholds: *mut u64,
    capacity: usize,
    written: *mut usize,
) -> UicStatus {
    guard(|| {
        let written = out_ptr(written, "written")?;
        *written = 0;
        let m = model_ref(model)?;
        let family = optional_text(family, "family")?;
        let k = k as usize;
        if capacity < k {
            *written = k;
            return Err(fail(
                UicStatus::BufferTooSmall,
                format!("capacity {capacity} < k = {k}"),
            ));
        }
        let out = out_ptr(thresholds, "thresholds")?;
        let f = m.family(family)?;
        let phi = find_thresholds(f, k, search_cap, &Horizons::default())?;
        for (i, &n) in phi.thresholds().iter().enumerate() {
            *out.add(i) = n;
        }
        *written = phi.len();
        Ok(())
    })
}

/// `φ(t)` for the given strictly increasing positive thresholds.
///
/// # Safety
/// `thresholds` must be valid for `len` elements and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uic_phi_eval(thresholds: *const u64, len: usize, t: f64, out: *mut f64) -> UicStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let ts = slice(thresholds, len, "thresholds")?;
        let phi = PhiFunction::new(ts.to_vec())?;
        *out = phi.eval(t);
        Ok(())
    })
}

/// Parses and evaluates a formula at index `n`.
///
/// # Safety
/// `text` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uic_expr_eval(text: *const c_char, n: u64, out: *mut f64) -> UicStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let src = c_str(text, "text")?;
        let e = parse_expr(src).map_err(|e| fail(UicStatus::Expr, e.to_string()))?;
        *out = eval_expr(&e, n).map_err(|e| fail(UicStatus::Eval, e.to_string()))?;
        Ok(())
    })
}
