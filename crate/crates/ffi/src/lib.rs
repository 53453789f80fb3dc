//! C ABI over the tdpareto solver.
//!
//! Fronts are returned as opaque `TdpFront` handles that the caller releases
//! with `tdp_front_free`. Every fallible call returns a `TdpStatus`; the
//! message of the last failure on the calling thread is available from
//! `tdp_last_error_message`. Costs cross the boundary either as fixed-point
//! tenths (`int64_t`) or as `double`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tdpareto::fixed;
use tdpareto::pareto::{parse_front_text, reduce_front, ParetoFront};
use tdpareto::solve::{input_dim, solve_text, ProblemKind, SolveOptions};
use tdpareto::store::Store;
use tdpareto::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    OutOfRange = 5,
    BufferTooSmall = 6,
    NoSolution = 7,
    Internal = 8,
    Panic = 9,
}

/// Pareto front with optional element sets per entry.
pub struct TdpFront {
    front: ParetoFront<usize>,
    solutions: Option<Vec<Vec<u64>>>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> TdpStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) => TdpStatus::Parse,
        Error::NoSpanningTree => TdpStatus::NoSolution,
        Error::Store(_) | Error::NeedsRecovery(_) | Error::Io { .. } => TdpStatus::Internal,
        _ => TdpStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (TdpStatus, String)>) -> TdpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TdpStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            TdpStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (TdpStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (TdpStatus, String)> {
    if p.is_null() {
        return Err((TdpStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (TdpStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn front_ref<'a>(f: *const TdpFront) -> Result<&'a TdpFront, (TdpStatus, String)> {
    f.as_ref().ok_or((TdpStatus::NullPointer, "front is null".into()))
}

fn entry_check(f: &TdpFront, index: usize) -> Result<(), (TdpStatus, String)> {
    if index >= f.front.len() {
        return Err((
            TdpStatus::OutOfRange,
            format!("index {index} beyond front of {}", f.front.len()),
        ));
    }
    Ok(())
}

fn publish(front: TdpFront, out: *mut *mut TdpFront) -> Result<(), (TdpStatus, String)> {
    if out.is_null() {
        return Err((TdpStatus::NullPointer, "out is null".into()));
    }
    unsafe { *out = Box::into_raw(Box::new(front)) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tdp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tdp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parse front text (one entry per line, `#` comments allowed) and reduce it
/// to its nondominated entries. Payloads are the input line order.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdp_front_parse(text: *const c_char, out: *mut *mut TdpFront) -> TdpStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let costs = parse_front_text(text).map_err(lib_err)?;
        let dim = costs.first().map_or(0, |c| c.len());
        let front = reduce_front(dim, costs.into_iter().enumerate().map(|(i, c)| (c, i)).collect()).map_err(lib_err)?;
        publish(TdpFront { front, solutions: None }, out)
    })
}

/// Solve an instance held in memory.
///
/// `problem` is one of `stcut`, `mst`, `tsp`, `aggregation`. `input` is a
/// `p mo` graph, or instance JSON for aggregation. `td` may be NULL, in which
/// case a min-degree decomposition is built. `threads` of 0 uses all cores.
/// Element sets of every entry are reconstructed.
///
/// # Safety
/// String arguments must be NUL-terminated or NULL where allowed; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn tdp_solve(
    problem: *const c_char,
    input: *const c_char,
    td: *const c_char,
    heuristic: bool,
    threads: u32,
    out: *mut *mut TdpFront,
) -> TdpStatus {
    guard(|| {
        let kind: ProblemKind = str_arg(problem, "problem")?.parse().map_err(lib_err)?;
        let input = str_arg(input, "input")?;
        let td = if td.is_null() { None } else { Some(str_arg(td, "td")?) };
        let mut opts = SolveOptions::default();
        opts.engine.heuristic.enabled = heuristic;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads as usize)
            .build()
            .map_err(|e| (TdpStatus::Internal, e.to_string()))?;
        let (front, solutions) = pool
            .install(|| -> tdpareto::Result<_> {
                let mut store = Store::in_memory(input_dim(kind, input)?);
                let solved = solve_text(kind, input, td, &opts, &mut store)?;
                let sols = store.reconstruct_all(&solved.front)?;
                Ok((solved.front, sols))
            })
            .map_err(lib_err)?;
        let front = front.map_payload(|id| id as usize);
        publish(
            TdpFront {
                front,
                solutions: Some(solutions),
            },
            out,
        )
    })
}

/// Release a front. NULL is ignored.
///
/// # Safety
/// `front` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tdp_front_free(front: *mut TdpFront) {
    if !front.is_null() {
        drop(Box::from_raw(front));
    }
}

/// Number of entries, or 0 for NULL.
///
/// # Safety
/// `front` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdp_front_len(front: *const TdpFront) -> usize {
    front.as_ref().map_or(0, |f| f.front.len())
}

/// Objective count, or 0 for NULL.
///
/// # Safety
/// `front` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdp_front_dim(front: *const TdpFront) -> usize {
    front.as_ref().map_or(0, |f| f.front.dim())
}

/// Copy entry `index` as fixed-point tenths into `out[0..cap]`.
///
/// # Safety
/// `out` must hold `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn tdp_front_cost_fixed(
    front: *const TdpFront,
    index: usize,
    out: *mut i64,
    cap: usize,
) -> TdpStatus {
    guard(|| {
        let f = front_ref(front)?;
        entry_check(f, index)?;
        let c = &f.front.entries()[index].0;
        if out.is_null() {
            return Err((TdpStatus::NullPointer, "out is null".into()));
        }
        if cap < c.len() {
            return Err((TdpStatus::BufferTooSmall, format!("need {} values", c.len())));
        }
        ptr::copy_nonoverlapping(c.as_ptr(), out, c.len());
        Ok(())
    })
}

/// Copy entry `index` as doubles into `out[0..cap]`.
///
/// # Safety
/// `out` must hold `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn tdp_front_cost(front: *const TdpFront, index: usize, out: *mut f64, cap: usize) -> TdpStatus {
    guard(|| {
        let f = front_ref(front)?;
        entry_check(f, index)?;
        let c = &f.front.entries()[index].0;
        if out.is_null() {
            return Err((TdpStatus::NullPointer, "out is null".into()));
        }
        if cap < c.len() {
            return Err((TdpStatus::BufferTooSmall, format!("need {} values", c.len())));
        }
        for (k, &v) in c.iter().enumerate() {
            *out.add(k) = fixed::to_f64(v);
        }
        Ok(())
    })
}

/// Element count of entry `index` of a solved front.
///
/// # Safety
/// `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdp_front_solution_len(front: *const TdpFront, index: usize, len: *mut usize) -> TdpStatus {
    guard(|| {
        let f = front_ref(front)?;
        entry_check(f, index)?;
        let s = f
            .solutions
            .as_ref()
            .ok_or((TdpStatus::InvalidInput, "front carries no solutions".into()))?;
        if len.is_null() {
            return Err((TdpStatus::NullPointer, "len is null".into()));
        }
        *len = s[index].len();
        Ok(())
    })
}

/// Copy the element ids of entry `index` into `out[0..cap]`: vertex ids for
/// s-t cut, triangle vertex ids for aggregation, input edge positions for
/// spanning trees and tours.
///
/// # Safety
/// `out` must hold `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn tdp_front_solution(
    front: *const TdpFront,
    index: usize,
    out: *mut u64,
    cap: usize,
) -> TdpStatus {
    guard(|| {
        let f = front_ref(front)?;
        entry_check(f, index)?;
        let s = &f
            .solutions
            .as_ref()
            .ok_or((TdpStatus::InvalidInput, "front carries no solutions".into()))?[index];
        if s.is_empty() {
            return Ok(());
        }
        if out.is_null() {
            return Err((TdpStatus::NullPointer, "out is null".into()));
        }
        if cap < s.len() {
            return Err((TdpStatus::BufferTooSmall, format!("need {} values", s.len())));
        }
        ptr::copy_nonoverlapping(s.as_ptr(), out, s.len());
        Ok(())
    })
}

/// Front in text form; release with `tdp_string_free`.
///
/// # Safety
/// `front` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdp_front_to_text(front: *const TdpFront, out: *mut *mut c_char) -> TdpStatus {
    guard(|| {
        let f = front_ref(front)?;
        if out.is_null() {
            return Err((TdpStatus::NullPointer, "out is null".into()));
        }
        let s = CString::new(f.front.to_text()).map_err(|e| (TdpStatus::Internal, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// Release a string from `tdp_front_to_text`. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tdp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
