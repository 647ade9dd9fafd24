//! C interface to `balance-lens`.
//!
//! Graphs and profiles are opaque heap handles released with their `_free`
//! function. Fallible calls return a [`BlStatus`] and write results through
//! out-pointers; the message of the most recent failure on the calling
//! thread is available from [`bl_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use balance_lens::generator::{generate, GeneratorConfig, Model};
use balance_lens::ingest::{read_edge_list, ReadOptions};
use balance_lens::report::ProfileDocument;
use balance_lens::{balance_profile, build_graph, Alpha, BalanceProfile, DirectedGraph, Error, VertexId};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Malformed = 4,
    Undefined = 5,
    Singular = 6,
    OutOfRange = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlModel {
    Deterministic = 0,
    TypeI = 1,
    TypeII = 2,
    TypeIII = 3,
}

/// Opaque directed graph.
pub struct BlGraph(DirectedGraph);

/// Opaque balance profile.
pub struct BlProfile(BalanceProfile);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: BlStatus, msg: impl Into<String>) -> BlStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> BlStatus {
    match e {
        Error::Io { .. } => BlStatus::Io,
        Error::Format { .. } | Error::Document { .. } => BlStatus::Malformed,
        Error::Singular(_) => BlStatus::Singular,
        Error::UndefinedPositivity(_) => BlStatus::Undefined,
        _ => BlStatus::InvalidArgument,
    }
}

fn from_error(e: Error) -> BlStatus {
    fail(status_of(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> BlStatus) -> BlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == BlStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(BlStatus::Internal, "internal panic"),
    }
}

fn emit<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null before computing `value`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn bl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn bl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a graph from parallel arrays of endpoint ids. Self-loops and
/// repeated pairs are dropped; ids are renumbered densely in order of first
/// appearance.
///
/// # Safety
/// `sources` and `targets` must each point to `n_edges` readable values
/// (or may be null when `n_edges` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_graph_from_edges(
    sources: *const u64,
    targets: *const u64,
    n_edges: usize,
    out: *mut *mut BlGraph,
) -> BlStatus {
    guard(|| {
        if out.is_null() || (n_edges > 0 && (sources.is_null() || targets.is_null())) {
            return fail(BlStatus::NullPointer, "null pointer argument");
        }
        let (s, t): (&[u64], &[u64]) = if n_edges == 0 {
            (&[], &[])
        } else {
            // SAFETY: non-null and `n_edges` long per the contract above.
            unsafe {
                (
                    std::slice::from_raw_parts(sources, n_edges),
                    std::slice::from_raw_parts(targets, n_edges),
                )
            }
        };
        let (g, _) = build_graph(s.iter().copied().zip(t.iter().copied()));
        emit(out, BlGraph(g));
        BlStatus::Ok
    })
}

/// Reads an edge list file.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_graph_read(path: *const c_char, strict: bool, out: *mut *mut BlGraph) -> BlStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(BlStatus::NullPointer, "null pointer argument");
        }
        // SAFETY: NUL-terminated per the contract above.
        let Ok(path) = unsafe { CStr::from_ptr(path) }.to_str() else {
            return fail(BlStatus::InvalidArgument, "path is not valid UTF-8");
        };
        let opts = ReadOptions {
            strict,
            ..Default::default()
        };
        match read_edge_list(Path::new(path), opts) {
            Ok(list) => {
                emit(out, BlGraph(build_graph(list.edges).0));
                BlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Generates a power-law network.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_graph_generate(
    model: BlModel,
    n_vertices: usize,
    gamma: f64,
    seed: u64,
    out: *mut *mut BlGraph,
) -> BlStatus {
    guard(|| {
        if out.is_null() {
            return fail(BlStatus::NullPointer, "null pointer argument");
        }
        let model = match model {
            BlModel::Deterministic => Model::Deterministic,
            BlModel::TypeI => Model::TypeI,
            BlModel::TypeII => Model::TypeII,
            BlModel::TypeIII => Model::TypeIII,
        };
        match generate(&GeneratorConfig::new(model, n_vertices, gamma, seed)) {
            Ok(g) => {
                emit(out, BlGraph(g.graph));
                BlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `graph` must come from a `bl_graph_*` constructor and not be freed yet,
/// or be null.
#[no_mangle]
pub unsafe extern "C" fn bl_graph_free(graph: *mut BlGraph) {
    if !graph.is_null() {
        // SAFETY: allocated by `emit` and owned by the caller.
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// # Safety
/// `graph` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn bl_graph_vertex_count(graph: *const BlGraph) -> usize {
    // SAFETY: live handle or null per the contract above.
    unsafe { graph.as_ref() }.map_or(0, |g| g.0.vertex_count())
}

/// # Safety
/// `graph` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn bl_graph_edge_count(graph: *const BlGraph) -> usize {
    // SAFETY: live handle or null per the contract above.
    unsafe { graph.as_ref() }.map_or(0, |g| g.0.edge_count())
}

/// In-degree of dense vertex `v`.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_graph_in_degree(graph: *const BlGraph, v: u64, out: *mut u64) -> BlStatus {
    guard(|| {
        // SAFETY: live handle or null per the contract above.
        let Some(g) = (unsafe { graph.as_ref() }) else {
            return fail(BlStatus::NullPointer, "null graph");
        };
        if out.is_null() {
            return fail(BlStatus::NullPointer, "null out pointer");
        }
        if v >= g.0.vertex_count() as u64 {
            return fail(BlStatus::OutOfRange, format!("vertex {v} out of range"));
        }
        // SAFETY: checked non-null above.
        unsafe { *out = g.0.in_degree(VertexId(v)) };
        BlStatus::Ok
    })
}

/// Balance profile with interval parameter `alpha` (> 1).
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_profile_compute(graph: *const BlGraph, alpha: f64, out: *mut *mut BlProfile) -> BlStatus {
    guard(|| {
        // SAFETY: live handle or null per the contract above.
        let Some(g) = (unsafe { graph.as_ref() }) else {
            return fail(BlStatus::NullPointer, "null graph");
        };
        if out.is_null() {
            return fail(BlStatus::NullPointer, "null out pointer");
        }
        match Alpha::new(alpha) {
            Ok(a) => {
                emit(out, BlProfile(balance_profile(&g.0, a)));
                BlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `profile` must come from [`bl_profile_compute`] and not be freed yet, or
/// be null.
#[no_mangle]
pub unsafe extern "C" fn bl_profile_free(profile: *mut BlProfile) {
    if !profile.is_null() {
        // SAFETY: allocated by `emit` and owned by the caller.
        drop(unsafe { Box::from_raw(profile) });
    }
}

/// Number of non-empty bins.
///
/// # Safety
/// `profile` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn bl_profile_bin_count(profile: *const BlProfile) -> usize {
    // SAFETY: live handle or null per the contract above.
    unsafe { profile.as_ref() }.map_or(0, |p| p.0.bins.len())
}

/// Bin `index` (ascending interval order): its interval index and count.
///
/// # Safety
/// `profile` must be a live handle; `s` and `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_profile_bin(
    profile: *const BlProfile,
    index: usize,
    s: *mut i32,
    count: *mut u64,
) -> BlStatus {
    guard(|| {
        // SAFETY: live handle or null per the contract above.
        let Some(p) = (unsafe { profile.as_ref() }) else {
            return fail(BlStatus::NullPointer, "null profile");
        };
        if s.is_null() || count.is_null() {
            return fail(BlStatus::NullPointer, "null out pointer");
        }
        let Some(bin) = p.0.bins.get(index) else {
            return fail(BlStatus::OutOfRange, format!("bin {index} out of range"));
        };
        // SAFETY: checked non-null above.
        unsafe {
            *s = bin.s;
            *count = bin.count;
        }
        BlStatus::Ok
    })
}

/// Edges whose source has in-degree zero.
///
/// # Safety
/// `profile` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn bl_profile_infinite_count(profile: *const BlProfile) -> u64 {
    // SAFETY: live handle or null per the contract above.
    unsafe { profile.as_ref() }.map_or(0, |p| p.0.infinite_count)
}

/// Positivity of the profiled graph; `BL_STATUS_UNDEFINED` when it is not
/// defined.
///
/// # Safety
/// `profile` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_profile_positivity(profile: *const BlProfile, out: *mut f64) -> BlStatus {
    guard(|| {
        // SAFETY: live handle or null per the contract above.
        let Some(p) = (unsafe { profile.as_ref() }) else {
            return fail(BlStatus::NullPointer, "null profile");
        };
        if out.is_null() {
            return fail(BlStatus::NullPointer, "null out pointer");
        }
        match p.0.positivity {
            Some(v) => {
                // SAFETY: checked non-null above.
                unsafe { *out = v };
                BlStatus::Ok
            }
            None => fail(
                BlStatus::Undefined,
                "positivity undefined: needs N > 2 and a finite-ratio edge",
            ),
        }
    })
}

/// Profile as a JSON document. Release the string with [`bl_string_free`].
///
/// # Safety
/// `profile` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_profile_to_json(profile: *const BlProfile, out: *mut *mut c_char) -> BlStatus {
    guard(|| {
        // SAFETY: live handle or null per the contract above.
        let Some(p) = (unsafe { profile.as_ref() }) else {
            return fail(BlStatus::NullPointer, "null profile");
        };
        if out.is_null() {
            return fail(BlStatus::NullPointer, "null out pointer");
        }
        let doc = ProfileDocument::new(&p.0, None);
        let text = match serde_json::to_string(&doc) {
            Ok(t) => t,
            Err(e) => return fail(BlStatus::Internal, e.to_string()),
        };
        let c = CString::new(text).expect("JSON has no NUL bytes");
        // SAFETY: checked non-null above.
        unsafe { *out = c.into_raw() };
        BlStatus::Ok
    })
}

/// # Safety
/// `s` must come from this library and not be freed yet, or be null.
#[no_mangle]
pub unsafe extern "C" fn bl_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by `CString::into_raw` above.
        drop(unsafe { CString::from_raw(s) });
    }
}
