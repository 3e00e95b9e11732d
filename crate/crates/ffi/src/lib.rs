//! C ABI for the witness library: opaque handles, integer status codes, and
//! JSON strings for everything structured. Strings returned by this library
//! must be released with `cgw_string_free`, handles with `cgw_witness_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use cgw::field_tower::make_field;
use cgw::groups::GroupFamily;
use cgw::matrixlab::elementary_divisors;
use cgw::report;
use cgw::witnesses::{
    construct_witness, verify_witness, ConstructOptions, VerifiedWitness, VerifyOptions,
    WitnessError,
};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum CgwStatus {
    /// The operation succeeded; for witness runs, the pair refutes
    /// acceptability (element-conjugate, no global conjugator).
    Ok = 0,
    /// The pair failed verification (an element pair is certified
    /// non-conjugate, or a global conjugator exists).
    VerificationFailed = 1,
    /// A search ran out of budget before deciding.
    Undecided = 2,
    /// No construction covers the requested family and size.
    OutOfCoverage = 3,
    /// Malformed input (bad family name, field parameters, or text format).
    InvalidArgument = 4,
    /// Unexpected internal failure; see `cgw_last_error`.
    InternalError = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg).ok();
    });
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Opaque verified-witness handle.
pub struct CgwWitness {
    verified: VerifiedWitness,
    budget: u64,
    seed: u64,
}

/// The last error message on this thread, or NULL. Free with
/// `cgw_string_free`.
#[no_mangle]
pub extern "C" fn cgw_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string allocated by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a `cgw_*` function and not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn cgw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn parse_utf8(ptr: *const c_char, what: &str) -> Result<String, CgwStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is NULL"));
        return Err(CgwStatus::InvalidArgument);
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map(|s| s.to_string())
        .map_err(|_| {
            set_error(format!("{what} is not valid UTF-8"));
            CgwStatus::InvalidArgument
        })
}

/// Construct a witness pair and run both deciders.
///
/// `family` is one of "GL", "SL", "U", "Sp", "Oodd", "Oeven"; `base_q` is
/// used by the unitary family only (pass 0 for the default p^(k/2));
/// `budget` of 0 selects the default of 10^7 candidates.
///
/// On success writes a handle to `out` and returns the verification
/// verdict: Ok (refutes), VerificationFailed, or Undecided. The handle is
/// valid (and carries the full report) in all three cases.
///
/// # Safety
/// `family` must be a valid NUL-terminated string and `out` a valid
/// pointer; the handle must be released with `cgw_witness_free`.
#[no_mangle]
pub unsafe extern "C" fn cgw_witness_run(
    family: *const c_char,
    n: u32,
    p: u64,
    k: u32,
    base_q: u64,
    budget: u64,
    seed: u64,
    exhaustive: bool,
    stability: bool,
    out: *mut *mut CgwWitness,
) -> CgwStatus {
    if out.is_null() {
        set_error("out handle pointer is NULL");
        return CgwStatus::InvalidArgument;
    }
    *out = ptr::null_mut();
    let family_str = match parse_utf8(family, "family") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let Some(family) = GroupFamily::parse(&family_str) else {
        set_error(format!("unknown family '{family_str}'"));
        return CgwStatus::InvalidArgument;
    };
    let field = match make_field(p, k as usize) {
        Ok(f) => f,
        Err(e) => {
            set_error(e.to_string());
            return CgwStatus::InvalidArgument;
        }
    };
    let base_q = match family {
        GroupFamily::U => {
            if base_q != 0 {
                Some(base_q)
            } else if k.is_multiple_of(2) {
                Some(p.pow(k / 2))
            } else {
                set_error("unitary witnesses need an even field degree");
                return CgwStatus::InvalidArgument;
            }
        }
        _ => None,
    };
    let pair = match construct_witness(
        family,
        n as usize,
        &field,
        base_q,
        &ConstructOptions::default(),
    ) {
        Ok(pair) => pair,
        Err(WitnessError::OutOfCoverage(msg)) => {
            set_error(msg);
            return CgwStatus::OutOfCoverage;
        }
        Err(e) => {
            set_error(e.to_string());
            return CgwStatus::InvalidArgument;
        }
    };
    let opts = VerifyOptions {
        budget: if budget == 0 { 10_000_000 } else { budget },
        seed,
        use_stored: true,
        exhaustive,
        stability,
    };
    let verified = match verify_witness(&pair, &opts) {
        Ok(v) => v,
        Err(e) => {
            set_error(e.to_string());
            return CgwStatus::InternalError;
        }
    };
    let verdict = if verified.refutes() {
        CgwStatus::Ok
    } else if verified.undecided() {
        CgwStatus::Undecided
    } else {
        CgwStatus::VerificationFailed
    };
    *out = Box::into_raw(Box::new(CgwWitness {
        verified,
        budget: opts.budget,
        seed,
    }));
    verdict
}

/// The full JSON report for a witness handle. Free with `cgw_string_free`.
///
/// # Safety
/// `w` must be a live handle from `cgw_witness_run`.
#[no_mangle]
pub unsafe extern "C" fn cgw_witness_json(w: *const CgwWitness) -> *mut c_char {
    if w.is_null() {
        set_error("witness handle is NULL");
        return ptr::null_mut();
    }
    let w = &*w;
    let json = report::witness_report(&w.verified, w.budget, w.seed);
    to_c_string(report::to_pretty_string(&json))
}

/// True when the handle certifies an element-conjugate pair with no global
/// conjugator.
///
/// # Safety
/// `w` must be a live handle from `cgw_witness_run`.
#[no_mangle]
pub unsafe extern "C" fn cgw_witness_refutes(w: *const CgwWitness) -> bool {
    !w.is_null() && (*w).verified.refutes()
}

/// Release a witness handle.
///
/// # Safety
/// `w` must come from `cgw_witness_run` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cgw_witness_free(w: *mut CgwWitness) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Similarity-invariant class data of a square invertible matrix in the
/// text format (first line `rows cols <fieldspec>`, then one row per line).
/// Writes a JSON string to `json_out`.
///
/// # Safety
/// `matrix_text` must be a valid NUL-terminated string, `json_out` a valid
/// pointer; the string must be released with `cgw_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cgw_invariant_json(
    matrix_text: *const c_char,
    json_out: *mut *mut c_char,
) -> CgwStatus {
    if json_out.is_null() {
        set_error("json_out is NULL");
        return CgwStatus::InvalidArgument;
    }
    *json_out = ptr::null_mut();
    let text = match parse_utf8(matrix_text, "matrix_text") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let matrix = match cgw::matrixlab::Matrix::parse(&text) {
        Ok(m) => m,
        Err(e) => {
            set_error(e.to_string());
            return CgwStatus::InvalidArgument;
        }
    };
    match elementary_divisors(&matrix) {
        Ok(invariant) => {
            *json_out = to_c_string(report::to_pretty_string(&invariant.data.to_json()));
            CgwStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CgwStatus::InvalidArgument
        }
    }
}

/// Enumerate valid class functions for a family ("GL", "U", "Sp", "O") and
/// size over F_{p^k}; `base_q` as in `cgw_witness_run`. Writes a JSON
/// string to `json_out`.
///
/// # Safety
/// `kind` must be a valid NUL-terminated string, `json_out` a valid
/// pointer; the string must be released with `cgw_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cgw_classes_json(
    kind: *const c_char,
    n: u32,
    p: u64,
    k: u32,
    base_q: u64,
    budget: u64,
    json_out: *mut *mut c_char,
) -> CgwStatus {
    use cgw::class_data::{enumerate_class_functions, GroupKind};
    if json_out.is_null() {
        set_error("json_out is NULL");
        return CgwStatus::InvalidArgument;
    }
    *json_out = ptr::null_mut();
    let kind_str = match parse_utf8(kind, "kind") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let kind = match kind_str.as_str() {
        "GL" | "gl" => GroupKind::Gl,
        "U" | "u" => GroupKind::U,
        "Sp" | "sp" => GroupKind::Sp,
        "O" | "o" => GroupKind::O,
        other => {
            set_error(format!("unknown kind '{other}'"));
            return CgwStatus::InvalidArgument;
        }
    };
    let field = match make_field(p, k as usize) {
        Ok(f) => f,
        Err(e) => {
            set_error(e.to_string());
            return CgwStatus::InvalidArgument;
        }
    };
    let base_q = match kind {
        GroupKind::U => {
            if base_q != 0 {
                Some(base_q)
            } else if k.is_multiple_of(2) {
                Some(p.pow(k / 2))
            } else {
                set_error("unitary class data needs an even field degree");
                return CgwStatus::InvalidArgument;
            }
        }
        _ => None,
    };
    let budget = if budget == 0 { 10_000_000 } else { budget };
    match enumerate_class_functions(kind, n, &field, base_q, budget) {
        Ok(functions) => {
            let json = serde_json::json!({
                "kind": kind_str,
                "n": n,
                "field": field.to_string(),
                "count": functions.len(),
                "classes": functions.iter().map(|cf| cf.to_json()).collect::<Vec<_>>(),
            });
            *json_out = to_c_string(report::to_pretty_string(&json));
            CgwStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CgwStatus::InvalidArgument
        }
    }
}
