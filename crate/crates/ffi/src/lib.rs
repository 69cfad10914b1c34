//! C ABI over the core library: opaque handles, integer status codes, and
//! JSON strings for structured results.
//!
//! Conventions: functions return [`ZrStatus`] (`ZR_STATUS_OK` is zero);
//! output parameters are written only on success. Strings returned through
//! `char**` are NUL-terminated, owned by the library, and must be released
//! with `zr_string_free`. `zr_last_error` exposes a thread-local message for
//! the most recent failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use zippered::counting::{count_grid, CountOptions, EnumQuery, OrbitMode, SectorQuery};
use zippered::induction::{zorich_step, IETPoint};
use zippered::perm::{Op, Permutation, RauzyClass};
use zippered::symbolic::Word;
use zippered::Error;

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZrStatus {
    Ok = 0,
    InvalidArgument = -1,
    Reducible = -2,
    Degenerate = -3,
    NotPrimitive = -4,
    NotAdmissible = -5,
    BudgetExceeded = -6,
    ParseError = -7,
    Stall = -8,
    NullPointer = -9,
    InvalidUtf8 = -10,
    Internal = -99,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> ZrStatus {
    match err {
        Error::Reducible | Error::TooShort | Error::NotAPermutation(_) => ZrStatus::Reducible,
        Error::DegenerateTie => ZrStatus::Degenerate,
        Error::NotPrimitive => ZrStatus::NotPrimitive,
        Error::NotAdmissible => ZrStatus::NotAdmissible,
        Error::BudgetExceeded { .. } => ZrStatus::BudgetExceeded,
        Error::Parse(_) => ZrStatus::ParseError,
        Error::Stall(_) => ZrStatus::Stall,
        Error::InvalidInput(_) | Error::InvalidWord(_) | Error::DimensionMismatch(_) => {
            ZrStatus::InvalidArgument
        }
        _ => ZrStatus::Internal,
    }
}

fn fail(err: Error) -> ZrStatus {
    set_error(&err.to_string());
    status_of(&err)
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, ZrStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(ZrStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        ZrStatus::InvalidUtf8
    })
}

fn give_string(out: *mut *mut c_char, text: String) -> ZrStatus {
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            ZrStatus::Ok
        }
        Err(_) => {
            set_error("interior NUL in output");
            ZrStatus::Internal
        }
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn zr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Thread-local message for the most recent error; empty until a failure.
#[no_mangle]
pub extern "C" fn zr_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(c"".as_ptr())
    })
}

/// Releases a string returned through a `char**` output.
///
/// # Safety
/// `s` must come from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn zr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opaque Rauzy class handle.
pub struct ZrClass {
    inner: RauzyClass,
}

/// Builds the Rauzy class of a 1-indexed image list such as `"3,2,1"`.
///
/// # Safety
/// `pi_csv` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zr_class_new(pi_csv: *const c_char, out: *mut *mut ZrClass) -> ZrStatus {
    if out.is_null() {
        set_error("null output pointer");
        return ZrStatus::NullPointer;
    }
    let text = match read_str(pi_csv) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let pi = match Permutation::parse(text) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    match RauzyClass::new(&pi) {
        Ok(class) => {
            *out = Box::into_raw(Box::new(ZrClass { inner: class }));
            ZrStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `class` must come from `zr_class_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zr_class_free(class: *mut ZrClass) {
    if !class.is_null() {
        drop(Box::from_raw(class));
    }
}

/// Number of permutations in the class.
///
/// # Safety
/// `class` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn zr_class_size(class: *const ZrClass, out: *mut usize) -> ZrStatus {
    if class.is_null() || out.is_null() {
        set_error("null pointer");
        return ZrStatus::NullPointer;
    }
    *out = (*class).inner.len();
    ZrStatus::Ok
}

/// Symbol count `m` of the class.
///
/// # Safety
/// `class` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn zr_class_m(class: *const ZrClass, out: *mut usize) -> ZrStatus {
    if class.is_null() || out.is_null() {
        set_error("null pointer");
        return ZrStatus::NullPointer;
    }
    *out = (*class).inner.m();
    ZrStatus::Ok
}

/// Serializes the class (members in canonical order plus labeled edges).
///
/// # Safety
/// `class` and `out` must be valid pointers; release the string with
/// `zr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn zr_class_to_json(
    class: *const ZrClass,
    out: *mut *mut c_char,
) -> ZrStatus {
    if class.is_null() || out.is_null() {
        set_error("null pointer");
        return ZrStatus::NullPointer;
    }
    give_string(out, (*class).inner.to_json().to_string())
}

/// Word report (letters, matrix, norm, admissibility, cylinder volume) for
/// `word_tokens` like `"a1,b2"` chained from the base permutation.
///
/// # Safety
/// Inputs must be NUL-terminated strings; `out` must be valid. Release the
/// string with `zr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn zr_word_info_json(
    pi_csv: *const c_char,
    word_tokens: *const c_char,
    out: *mut *mut c_char,
) -> ZrStatus {
    if out.is_null() {
        set_error("null output pointer");
        return ZrStatus::NullPointer;
    }
    let pi_text = match read_str(pi_csv) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let word_text = match read_str(word_tokens) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let info = (|| -> Result<serde_json::Value, Error> {
        let base = Permutation::parse(pi_text)?;
        let tokens = Word::parse_tokens(word_text)?;
        let word = Word::from_tokens(&base, &tokens)?;
        let mat = word.matrix();
        let mut value = serde_json::json!({
            "letters": word.letters().iter().map(|l| serde_json::json!({
                "c": l.op.to_string(), "n": l.n, "pi": l.pi.images_one_indexed(),
            })).collect::<Vec<_>>(),
            "matrix": mat.to_json(),
            "col_norm": mat.col_norm().to_string(),
            "log_col_norm": mat.log_col_norm(),
            "primitive": mat.is_primitive(),
            "admissible": word.is_admissible(),
            "cylinder_leb": zippered::cylinder_leb(&word).to_string(),
        });
        if word.is_admissible() {
            let (point, log_rho) = zippered::periodic_point(&word)?;
            value["log_rho"] = serde_json::json!(log_rho);
            value["periodic_lambda"] = serde_json::json!(point.lambda());
        }
        Ok(value)
    })();
    match info {
        Ok(value) => give_string(out, value.to_string()),
        Err(e) => fail(e),
    }
}

/// Orbit deduplication mode for `zr_count_grid_json`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZrOrbitMode {
    Canonical = 0,
    AnyRotation = 1,
}

/// Sector restriction for `zr_count_grid_json`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZrSector {
    None = 0,
    FirstOpA = 1,
    FirstOpB = 2,
}

/// Runs a grid count and returns the JSON report (rows, slopes, abort flag).
/// A budget abort still writes the partial report and returns
/// `ZR_STATUS_BUDGET_EXCEEDED`; `budget` zero means the library default.
///
/// # Safety
/// `pi_csv` must be NUL-terminated; `prefix_tokens` may be NULL; `out` must
/// be valid. Release the string with `zr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn zr_count_grid_json(
    pi_csv: *const c_char,
    t_min: f64,
    t_max: f64,
    step: f64,
    prefix_tokens: *const c_char,
    sector: ZrSector,
    orbit_mode: ZrOrbitMode,
    budget: u64,
    threads: u32,
    out: *mut *mut c_char,
) -> ZrStatus {
    if out.is_null() {
        set_error("null output pointer");
        return ZrStatus::NullPointer;
    }
    let pi_text = match read_str(pi_csv) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let prefix_text = if prefix_tokens.is_null() {
        None
    } else {
        match read_str(prefix_tokens) {
            Ok(t) => Some(t),
            Err(s) => return s,
        }
    };
    let run = (|| -> Result<(String, bool), Error> {
        let base = Permutation::parse(pi_text)?;
        let class = RauzyClass::new(&base)?;
        if !(step > 0.0) {
            return Err(Error::InvalidInput("step must be positive".into()));
        }
        let mut grid = Vec::new();
        let mut t = t_min;
        while t <= t_max + 1e-9 {
            grid.push(t);
            t += step;
        }
        let prefix = match prefix_text {
            Some(tokens) => Some(Word::from_tokens(&base, &Word::parse_tokens(tokens)?)?),
            None => None,
        };
        let sector = match sector {
            ZrSector::None => None,
            ZrSector::FirstOpA => Some(SectorQuery { base: base.clone(), first: Op::A }),
            ZrSector::FirstOpB => Some(SectorQuery { base: base.clone(), first: Op::B }),
        };
        let query = EnumQuery { class, t_bound: *grid.first().unwrap_or(&1.0), prefix, sector };
        let opts = CountOptions {
            budget,
            threads: threads.max(1) as usize,
            orbit_mode: match orbit_mode {
                ZrOrbitMode::Canonical => OrbitMode::CanonicalWithinBound,
                ZrOrbitMode::AnyRotation => OrbitMode::AnyRotationWithinBound,
            },
        };
        let report = count_grid(&query, &grid, &opts)?;
        let aborted = report.aborted;
        Ok((serde_json::to_string(&report).expect("serializable report"), aborted))
    })();
    match run {
        Ok((json, aborted)) => {
            let status = give_string(out, json);
            if status == ZrStatus::Ok && aborted {
                set_error("node budget exhausted; report holds the completed grid prefix");
                ZrStatus::BudgetExceeded
            } else {
                status
            }
        }
        Err(e) => fail(e),
    }
}

/// Opaque accelerated-induction iterator.
pub struct ZrIet {
    point: IETPoint<f64>,
}

/// Creates an induction iterator from lengths (normalized to unit sum).
///
/// # Safety
/// `lambda` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn zr_iet_new(
    pi_csv: *const c_char,
    lambda: *const f64,
    len: usize,
    out: *mut *mut ZrIet,
) -> ZrStatus {
    if out.is_null() || lambda.is_null() {
        set_error("null pointer");
        return ZrStatus::NullPointer;
    }
    let pi_text = match read_str(pi_csv) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let made = (|| -> Result<IETPoint<f64>, Error> {
        let pi = Permutation::parse(pi_text)?;
        let values = std::slice::from_raw_parts(lambda, len).to_vec();
        IETPoint::new_normalized(values, pi)
    })();
    match made {
        Ok(point) => {
            *out = Box::into_raw(Box::new(ZrIet { point }));
            ZrStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `iet` must come from `zr_iet_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zr_iet_free(iet: *mut ZrIet) {
    if !iet.is_null() {
        drop(Box::from_raw(iet));
    }
}

/// Advances one accelerated step; writes the consumed letter as `(op, n)`
/// with `op` 0 for `a`, 1 for `b`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zr_iet_zorich_step(
    iet: *mut ZrIet,
    op_out: *mut u8,
    n_out: *mut u64,
) -> ZrStatus {
    if iet.is_null() || op_out.is_null() || n_out.is_null() {
        set_error("null pointer");
        return ZrStatus::NullPointer;
    }
    let handle = &mut *iet;
    match zorich_step(&handle.point) {
        Ok((next, letter)) => {
            handle.point = next;
            *op_out = match letter.op {
                Op::A => 0,
                Op::B => 1,
            };
            *n_out = letter.n;
            ZrStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Copies the current normalized lengths into `out[0..len]`.
///
/// # Safety
/// `out` must point to at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn zr_iet_lambda(
    iet: *const ZrIet,
    out: *mut f64,
    len: usize,
) -> ZrStatus {
    if iet.is_null() || out.is_null() {
        set_error("null pointer");
        return ZrStatus::NullPointer;
    }
    let lambda = (*iet).point.lambda();
    if len != lambda.len() {
        set_error("length mismatch");
        return ZrStatus::InvalidArgument;
    }
    ptr::copy_nonoverlapping(lambda.as_ptr(), out, len);
    ZrStatus::Ok
}
