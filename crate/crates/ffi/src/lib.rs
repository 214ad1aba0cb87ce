//! C ABI for the selection library.
//!
//! Opaque array handles, status codes, and a flat report struct. Every
//! function is safe to call from C; errors come back as a status code
//! and the message of the most recent failure is retrievable per
//! thread via [`rosel_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use roselect::constants::{GENERAL_BUDGET_HEADROOM, LINEAR_BITS_PEAK_FACTOR};
use roselect::error::Error;
use roselect::input::{self, Distribution, GeneratorSpec, ReadOnlyArray};
use roselect::oracle::oracle_select;
use roselect::selection::{
    baseline_select, select_general, select_linear_bits, select_log_squared, SelectionResult,
};
use roselect::workspace::WorkspaceMeter;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> RoselStatus {
    match err {
        Error::EmptyInput | Error::Parse { .. } | Error::Io(_) => RoselStatus::IoError,
        Error::BudgetExceeded { .. } => RoselStatus::BudgetExceeded,
        Error::Parameter(_) => RoselStatus::ParameterError,
        _ => RoselStatus::InternalError,
    }
}

/// Status code of every fallible call.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq)]
pub enum RoselStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParameterError = 3,
    BudgetExceeded = 4,
    IoError = 5,
    InternalError = 6,
}

/// Algorithm selector.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq)]
pub enum RoselAlgorithm {
    /// Linear-time in Θ(N) bits, or the budgeted algorithm when a
    /// budget below the linear-bits peak is given.
    Auto = 0,
    LinearBits = 1,
    General = 2,
    LogSquared = 3,
    Baseline = 4,
}

/// Input distribution for generated arrays.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq)]
pub enum RoselDistribution {
    UniformPermutation = 0,
    Sorted = 1,
    ReverseSorted = 2,
    FewDistinct = 3,
}

/// Counters and answer of one selection run.
#[repr(C)]
#[derive(Copy, Clone)]
pub struct RoselReport {
    /// 1-based input index of the k-th smallest element.
    pub answer_index: u64,
    pub answer_value: i64,
    pub comparisons: u64,
    pub reads: u64,
    pub passes: u64,
    pub peak_workspace_bits: u64,
    pub elapsed_ms: f64,
}

/// Opaque handle to a loaded input array.
pub struct RoselArray {
    inner: ReadOnlyArray,
}

/// Message of this thread's most recent error, or NULL. Valid until
/// the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn rosel_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

/// Builds an array from `len` values copied out of `values`.
///
/// # Safety
/// `values` must point to at least `len` readable i64 values, and `out`
/// must be a valid location for the handle.
#[no_mangle]
pub unsafe extern "C" fn rosel_array_from_values(
    values: *const i64,
    len: usize,
    out: *mut *mut RoselArray,
) -> RoselStatus {
    if values.is_null() || out.is_null() {
        return RoselStatus::NullPointer;
    }
    let slice = std::slice::from_raw_parts(values, len);
    match ReadOnlyArray::from_values(slice.to_vec()) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(RoselArray { inner }));
            RoselStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

unsafe fn load_path(
    path: *const c_char,
    out: *mut *mut RoselArray,
    loader: fn(&Path) -> Result<ReadOnlyArray, Error>,
) -> RoselStatus {
    if path.is_null() || out.is_null() {
        return RoselStatus::NullPointer;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s,
        Err(_) => return RoselStatus::InvalidArgument,
    };
    match loader(Path::new(path)) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(RoselArray { inner }));
            RoselStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Loads a text file of newline-separated decimal integers.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid
/// location for the handle.
#[no_mangle]
pub unsafe extern "C" fn rosel_array_load_text(
    path: *const c_char,
    out: *mut *mut RoselArray,
) -> RoselStatus {
    load_path(path, out, input::load_text)
}

/// Loads a binary file of little-endian 64-bit integers.
///
/// # Safety
/// As [`rosel_array_load_text`].
#[no_mangle]
pub unsafe extern "C" fn rosel_array_load_binary(
    path: *const c_char,
    out: *mut *mut RoselArray,
) -> RoselStatus {
    load_path(path, out, input::load_binary)
}

/// Generates an input of `count` elements.
///
/// # Safety
/// `out` must be a valid location for the handle.
#[no_mangle]
pub unsafe extern "C" fn rosel_array_generate(
    count: usize,
    seed: u64,
    distribution: RoselDistribution,
    out: *mut *mut RoselArray,
) -> RoselStatus {
    if out.is_null() {
        return RoselStatus::NullPointer;
    }
    let dist = match distribution {
        RoselDistribution::UniformPermutation => Distribution::UniformPermutation,
        RoselDistribution::Sorted => Distribution::Sorted,
        RoselDistribution::ReverseSorted => Distribution::ReverseSorted,
        RoselDistribution::FewDistinct => Distribution::FewDistinct,
    };
    match input::generate(&GeneratorSpec::new(count, seed, dist)) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(RoselArray { inner }));
            RoselStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Number of elements, or 0 for a NULL handle.
///
/// # Safety
/// `array` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn rosel_array_len(array: *const RoselArray) -> usize {
    if array.is_null() {
        return 0;
    }
    (*array).inner.len()
}

/// Frees a handle. NULL is ignored.
///
/// # Safety
/// `array` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rosel_array_free(array: *mut RoselArray) {
    if !array.is_null() {
        drop(Box::from_raw(array));
    }
}

fn dispatch(
    a: &ReadOnlyArray,
    k: usize,
    algorithm: RoselAlgorithm,
    budget_bits: u64,
    meter: &WorkspaceMeter,
) -> Result<SelectionResult, Error> {
    let n = a.len() as u64;
    let budget = (budget_bits > 0).then_some(budget_bits);
    let sizing = budget.map_or(n, |b| b / GENERAL_BUDGET_HEADROOM);
    match algorithm {
        RoselAlgorithm::Auto => match budget {
            None => select_linear_bits(a, k, meter),
            Some(b) if b >= LINEAR_BITS_PEAK_FACTOR * n => select_linear_bits(a, k, meter),
            Some(_) => select_general(a, k, sizing, meter),
        },
        RoselAlgorithm::LinearBits => select_linear_bits(a, k, meter),
        RoselAlgorithm::General => select_general(a, k, sizing, meter),
        RoselAlgorithm::LogSquared => select_log_squared(a, k, meter),
        RoselAlgorithm::Baseline => baseline_select(a, k, meter),
    }
}

/// Runs a selection. `budget_bits = 0` means unlimited; a nonzero
/// budget is enforced bit for bit by the workspace meter.
///
/// # Safety
/// `array` must be a live handle and `report` a valid location.
#[no_mangle]
pub unsafe extern "C" fn rosel_select(
    array: *const RoselArray,
    k: u64,
    algorithm: RoselAlgorithm,
    budget_bits: u64,
    report: *mut RoselReport,
) -> RoselStatus {
    if array.is_null() || report.is_null() {
        return RoselStatus::NullPointer;
    }
    let a = &(*array).inner;
    if k < 1 || k > a.len() as u64 {
        set_error(format!("k={k} outside [1, {}]", a.len()));
        return RoselStatus::InvalidArgument;
    }
    let meter = if budget_bits > 0 {
        WorkspaceMeter::with_budget(budget_bits)
    } else {
        WorkspaceMeter::unlimited()
    };
    let run = catch_unwind(AssertUnwindSafe(|| {
        dispatch(a, k as usize, algorithm, budget_bits, &meter)
    }));
    match run {
        Ok(Ok(r)) => {
            *report = RoselReport {
                answer_index: r.answer_index as u64,
                answer_value: r.answer_value,
                comparisons: r.stats.comparisons,
                reads: r.stats.reads,
                passes: r.stats.passes,
                peak_workspace_bits: r.stats.peak_workspace_bits,
                elapsed_ms: r.stats.elapsed.as_secs_f64() * 1e3,
            };
            RoselStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside selection".to_string());
            RoselStatus::InternalError
        }
    }
}

/// 1-based index of the k-th smallest per the sorting oracle, or 0 on
/// error. Verification helper; uses unrestricted memory.
///
/// # Safety
/// `array` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn rosel_oracle_select(array: *const RoselArray, k: u64) -> u64 {
    if array.is_null() {
        return 0;
    }
    let a = &(*array).inner;
    if k < 1 || k > a.len() as u64 {
        return 0;
    }
    oracle_select(a.values(), k as usize) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn generated(n: usize, seed: u64) -> *mut RoselArray {
        let mut arr: *mut RoselArray = ptr::null_mut();
        let st = rosel_array_generate(n, seed, RoselDistribution::UniformPermutation, &mut arr);
        assert!(st == RoselStatus::Ok);
        arr
    }

    #[test]
    fn select_through_the_c_surface() {
        unsafe {
            let arr = generated(5000, 11);
            assert_eq!(rosel_array_len(arr), 5000);
            let mut report = RoselReport {
                answer_index: 0,
                answer_value: 0,
                comparisons: 0,
                reads: 0,
                passes: 0,
                peak_workspace_bits: 0,
                elapsed_ms: 0.0,
            };
            for alg in [
                RoselAlgorithm::Auto,
                RoselAlgorithm::LinearBits,
                RoselAlgorithm::LogSquared,
                RoselAlgorithm::Baseline,
            ] {
                let st = rosel_select(arr, 2500, alg, 0, &mut report);
                assert!(st == RoselStatus::Ok);
                assert_eq!(report.answer_value, 2500);
                assert_eq!(report.answer_index, rosel_oracle_select(arr, 2500));
                assert!(report.comparisons > 0);
            }
            rosel_array_free(arr);
        }
    }

    #[test]
    fn budgeted_general_run() {
        unsafe {
            let arr = generated(1 << 14, 3);
            let mut report = RoselReport {
                answer_index: 0,
                answer_value: 0,
                comparisons: 0,
                reads: 0,
                passes: 0,
                peak_workspace_bits: 0,
                elapsed_ms: 0.0,
            };
            let budget = 1u64 << 21;
            let st = rosel_select(arr, 1234, RoselAlgorithm::General, budget, &mut report);
            assert!(st == RoselStatus::Ok);
            assert!(report.peak_workspace_bits <= budget);
            assert_eq!(report.answer_index, rosel_oracle_select(arr, 1234));
            rosel_array_free(arr);
        }
    }

    #[test]
    fn error_paths_set_status_and_message() {
        unsafe {
            let arr = generated(1 << 16, 1);
            let mut report = RoselReport {
                answer_index: 0,
                answer_value: 0,
                comparisons: 0,
                reads: 0,
                passes: 0,
                peak_workspace_bits: 0,
                elapsed_ms: 0.0,
            };
            // Budget far below lg³N after headroom: parameter error.
            let st = rosel_select(arr, 5, RoselAlgorithm::General, 100, &mut report);
            assert!(st == RoselStatus::ParameterError);
            let msg = rosel_last_error();
            assert!(!msg.is_null());
            let text = CStr::from_ptr(msg).to_string_lossy();
            assert!(text.contains("supported range"), "message: {text}");

            // Out-of-range k.
            let st = rosel_select(arr, 0, RoselAlgorithm::Auto, 0, &mut report);
            assert!(st == RoselStatus::InvalidArgument);
            rosel_array_free(arr);
        }
    }

    #[test]
    fn from_values_round_trip() {
        unsafe {
            let values = [5i64, -3, 5, 0];
            let mut arr: *mut RoselArray = ptr::null_mut();
            let st = rosel_array_from_values(values.as_ptr(), values.len(), &mut arr);
            assert!(st == RoselStatus::Ok);
            let mut report = RoselReport {
                answer_index: 0,
                answer_value: 0,
                comparisons: 0,
                reads: 0,
                passes: 0,
                peak_workspace_bits: 0,
                elapsed_ms: 0.0,
            };
            let st = rosel_select(arr, 1, RoselAlgorithm::Baseline, 0, &mut report);
            assert!(st == RoselStatus::Ok);
            assert_eq!(report.answer_index, 2);
            assert_eq!(report.answer_value, -3);
            // Duplicates tie-break by position.
            rosel_select(arr, 3, RoselAlgorithm::Baseline, 0, &mut report);
            assert_eq!(report.answer_index, 1);
            rosel_array_free(arr);
            rosel_array_free(ptr::null_mut()); // NULL is fine
        }
    }

    #[test]
    fn empty_input_rejected() {
        unsafe {
            let mut arr: *mut RoselArray = ptr::null_mut();
            let st = rosel_array_generate(
                0,
                1,
                RoselDistribution::Sorted,
                &mut arr,
            );
            assert!(st == RoselStatus::IoError);
        }
    }
}
