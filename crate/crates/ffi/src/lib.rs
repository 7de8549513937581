//! C ABI over `vi-core`.
//!
//! Queries and results are opaque heap handles. Every fallible call returns a
//! [`ViStatus`]; on failure the message is available from
//! [`vi_last_error_message`] on the same thread. Strings handed out by the
//! library must be released with [`vi_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vi_core::qh_oracle::{oracle_compare, OracleError};
use vi_core::{
    count_maximal, Convention, EngineError, EvalOptions, InvariantQuery, InvariantResult,
};

pub const VI_CONVENTION_PAPER: u32 = 0;
pub const VI_CONVENTION_DUAL: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Inadmissible = 3,
    Internal = 4,
    Panic = 5,
}

/// Opaque query handle.
pub struct ViQuery {
    inner: InvariantQuery,
}

/// Opaque result handle.
pub struct ViResult {
    inner: InvariantResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn engine_status(e: &EngineError) -> ViStatus {
    set_error(e.to_string());
    match e {
        EngineError::DegreeConditionViolated { .. } => ViStatus::Inadmissible,
        EngineError::InvalidQuery(_) | EngineError::UnreducedDegree(_) => ViStatus::InvalidArgument,
        _ => ViStatus::Internal,
    }
}

fn convention(code: u32) -> Option<Convention> {
    match code {
        VI_CONVENTION_PAPER => Some(Convention::Paper),
        VI_CONVENTION_DUAL => Some(Convention::Dual),
        _ => None,
    }
}

fn guarded(f: impl FnOnce() -> ViStatus) -> ViStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic inside vi-ffi");
            ViStatus::Panic
        }
    }
}

/// Creates a query with an empty monomial. Returns null for an unknown
/// convention code.
#[no_mangle]
pub extern "C" fn vi_query_new(
    n: u32,
    k: u32,
    g: u32,
    e_prime: i64,
    d: i64,
    convention_code: u32,
) -> *mut ViQuery {
    let Some(conv) = convention(convention_code) else {
        set_error(format!("unknown convention code {convention_code}"));
        return ptr::null_mut();
    };
    let inner = InvariantQuery::new(n, k, g, e_prime, vec![])
        .with_degree(d)
        .with_convention(conv);
    Box::into_raw(Box::new(ViQuery { inner }))
}

/// Appends one exponent `a` to the monomial.
///
/// # Safety
/// `query` must be null or a live handle from [`vi_query_new`].
#[no_mangle]
pub unsafe extern "C" fn vi_query_push_exponent(query: *mut ViQuery, a: u32) -> ViStatus {
    guarded(|| match unsafe { query.as_mut() } {
        Some(q) => {
            q.inner.monomial.push(a);
            ViStatus::Ok
        }
        None => {
            set_error("null query");
            ViStatus::NullPointer
        }
    })
}

/// # Safety
/// `query` must be null or a handle from [`vi_query_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vi_query_free(query: *mut ViQuery) {
    if !query.is_null() {
        drop(unsafe { Box::from_raw(query) });
    }
}

/// Evaluates the invariant (degree-reducing first when `d != 0`).
/// `workers == 0` picks the worker count automatically.
///
/// # Safety
/// `query` must be a live query handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn vi_invariant(
    query: *const ViQuery,
    workers: usize,
    out: *mut *mut ViResult,
) -> ViStatus {
    guarded(|| {
        let (Some(q), false) = (unsafe { query.as_ref() }, out.is_null()) else {
            set_error("null argument");
            return ViStatus::NullPointer;
        };
        match vi_core::vi_engine::evaluate(&q.inner, &EvalOptions::with_workers(workers)) {
            Ok(r) => {
                unsafe { *out = Box::into_raw(Box::new(ViResult { inner: r })) };
                ViStatus::Ok
            }
            Err(e) => engine_status(&e),
        }
    })
}

/// Number of maximal rank-k subbundles.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn vi_count_maximal(
    n: u32,
    d: i64,
    k: u32,
    g: u32,
    convention_code: u32,
    workers: usize,
    out: *mut *mut ViResult,
) -> ViStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null argument");
            return ViStatus::NullPointer;
        }
        let Some(conv) = convention(convention_code) else {
            set_error(format!("unknown convention code {convention_code}"));
            return ViStatus::InvalidArgument;
        };
        match count_maximal(n, d, k, g, conv, &EvalOptions::with_workers(workers)) {
            Ok(r) => {
                unsafe { *out = Box::into_raw(Box::new(ViResult { inner: r })) };
                ViStatus::Ok
            }
            Err(e) => engine_status(&e),
        }
    })
}

/// Compares the root-of-unity sum with the quantum cohomology oracle.
///
/// # Safety
/// `query` must be a live query handle and `agrees` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn vi_oracle_compare(query: *const ViQuery, agrees: *mut bool) -> ViStatus {
    guarded(|| {
        let (Some(q), false) = (unsafe { query.as_ref() }, agrees.is_null()) else {
            set_error("null argument");
            return ViStatus::NullPointer;
        };
        match oracle_compare(&q.inner) {
            Ok(b) => {
                unsafe { *agrees = b };
                ViStatus::Ok
            }
            Err(OracleError::Engine(e)) => engine_status(&e),
            Err(e @ OracleError::Symfunc(_)) => {
                set_error(e.to_string());
                ViStatus::InvalidArgument
            }
            Err(e) => {
                set_error(e.to_string());
                ViStatus::Internal
            }
        }
    })
}

/// Exact value as a decimal string such as `"6"` or `"-7/3"`. Free with
/// [`vi_string_free`].
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn vi_result_value(result: *const ViResult) -> *mut c_char {
    match unsafe { result.as_ref() } {
        Some(r) => CString::new(r.inner.value.to_string())
            .map(CString::into_raw)
            .unwrap_or(ptr::null_mut()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn vi_result_is_integral(result: *const ViResult) -> bool {
    unsafe { result.as_ref() }.is_some_and(|r| r.inner.integrality)
}

/// Number of subsets summed.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn vi_result_terms(result: *const ViResult) -> u64 {
    unsafe { result.as_ref() }.map_or(0, |r| r.inner.terms_summed)
}

/// # Safety
/// `result` must be null or a result handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vi_result_free(result: *mut ViResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn vi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Copies a library string into an owned Rust string. Test helper.
///
/// # Safety
/// `s` must be null or a valid NUL-terminated string.
pub unsafe fn to_owned_string(s: *const c_char) -> Option<String> {
    if s.is_null() {
        None
    } else {
        Some(unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned())
    }
}
