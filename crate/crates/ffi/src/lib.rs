//! C ABI over `arbor-ftp`: parse a graph, build or load its fault-tolerant
//! subgraph, and answer fault queries.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Every fallible call returns an
//! [`ArborStatus`]; on failure [`arbor_last_error`] describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use arbor_ftp::eft::{build_eft_subgraph, build_perturbed, load_subgraph, BuildOptions, EftSubgraph};
use arbor_ftp::fault::{certify, query_fault, FaultError};
use arbor_ftp::Graph;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArborStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    Infeasible = 4,
    UnknownEdge = 5,
    CertificationFailed = 6,
    Panic = 7,
}

/// A parsed directed graph.
pub struct ArborGraph {
    inner: Graph,
}

/// A fault-tolerant subgraph tied to the graph it was built or loaded from.
pub struct ArborSubgraph {
    inner: EftSubgraph,
}

/// Answer to one fault query. Costs are fixed-point with six fractional
/// digits (`1.5` is `1500000`).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ArborQueryResult {
    /// The failed edge lies on the base tree.
    pub tree_edge: bool,
    pub interim_feasible: bool,
    pub interim_cost: i64,
    /// The exact fields are filled only for certified queries.
    pub certified: bool,
    pub exact_feasible: bool,
    pub exact_cost: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: ArborStatus, msg: impl Into<String>) -> ArborStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> ArborStatus) -> ArborStatus {
    set_error("");
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(ArborStatus::Panic, "internal panic"))
}

/// # Safety
/// `text` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, ArborStatus> {
    if text.is_null() {
        return Err(fail(ArborStatus::NullPointer, "null string"));
    }
    // SAFETY: non-null and NUL-terminated per the caller contract.
    unsafe { CStr::from_ptr(text) }
        .to_str()
        .map_err(|e| fail(ArborStatus::InvalidUtf8, e.to_string()))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn arbor_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses an edge list (`n m root` header, then `tail head cost` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn arbor_graph_parse(text: *const c_char, out: *mut *mut ArborGraph) -> ArborStatus {
    guard(|| {
        if out.is_null() {
            return fail(ArborStatus::NullPointer, "null output pointer");
        }
        // SAFETY: forwarded caller contract.
        let text = match unsafe { read_str(text) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Graph::parse(text) {
            Ok(g) => {
                // SAFETY: `out` is non-null and writable.
                unsafe { *out = Box::into_raw(Box::new(ArborGraph { inner: g })) };
                ArborStatus::Ok
            }
            Err(e) => fail(ArborStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `g` must be null or a handle from [`arbor_graph_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn arbor_graph_free(g: *mut ArborGraph) {
    if !g.is_null() {
        // SAFETY: uniquely owned handle per the caller contract.
        drop(unsafe { Box::from_raw(g) });
    }
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn arbor_graph_vertex_count(g: *const ArborGraph) -> usize {
    // SAFETY: caller contract.
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.vertex_count())
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn arbor_graph_edge_count(g: *const ArborGraph) -> usize {
    // SAFETY: caller contract.
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.edge_count())
}

/// Builds the subgraph of `g`, on seeded perturbed costs when `perturb`.
///
/// # Safety
/// `g` must be a live graph handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn arbor_subgraph_build(
    g: *const ArborGraph,
    perturb: bool,
    seed: u64,
    out: *mut *mut ArborSubgraph,
) -> ArborStatus {
    guard(|| {
        // SAFETY: caller contract.
        let Some(g) = (unsafe { g.as_ref() }) else {
            return fail(ArborStatus::NullPointer, "null graph");
        };
        if out.is_null() {
            return fail(ArborStatus::NullPointer, "null output pointer");
        }
        let built = if perturb {
            build_perturbed(&g.inner, seed, 8, BuildOptions::default()).map(|b| b.subgraph).map_err(|e| e.to_string())
        } else {
            build_eft_subgraph(&g.inner).map_err(|e| e.to_string())
        };
        match built {
            Ok(h) => {
                // SAFETY: `out` is non-null and writable.
                unsafe { *out = Box::into_raw(Box::new(ArborSubgraph { inner: h })) };
                ArborStatus::Ok
            }
            Err(msg) => fail(ArborStatus::Infeasible, msg),
        }
    })
}

/// Loads a subgraph file previously written for `g`.
///
/// # Safety
/// `g` must be a live graph handle, `text` a NUL-terminated string and `out`
/// a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn arbor_subgraph_load(
    g: *const ArborGraph,
    text: *const c_char,
    out: *mut *mut ArborSubgraph,
) -> ArborStatus {
    guard(|| {
        // SAFETY: caller contract.
        let Some(g) = (unsafe { g.as_ref() }) else {
            return fail(ArborStatus::NullPointer, "null graph");
        };
        if out.is_null() {
            return fail(ArborStatus::NullPointer, "null output pointer");
        }
        // SAFETY: forwarded caller contract.
        let text = match unsafe { read_str(text) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_subgraph(&g.inner, text) {
            Ok(h) => {
                // SAFETY: `out` is non-null and writable.
                unsafe { *out = Box::into_raw(Box::new(ArborSubgraph { inner: h })) };
                ArborStatus::Ok
            }
            Err(e) => fail(ArborStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `h` must be null or a subgraph handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn arbor_subgraph_free(h: *mut ArborSubgraph) {
    if !h.is_null() {
        // SAFETY: uniquely owned handle per the caller contract.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// # Safety
/// `h` must be null or a live subgraph handle.
#[no_mangle]
pub unsafe extern "C" fn arbor_subgraph_edge_count(h: *const ArborSubgraph) -> usize {
    // SAFETY: caller contract.
    unsafe { h.as_ref() }.map_or(0, |h| h.inner.edge_set.len())
}

/// Writes the subgraph as an edge list; free the result with
/// [`arbor_string_free`].
///
/// # Safety
/// `g` and `h` must be live handles with `h` belonging to `g`; `out` must be
/// a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn arbor_subgraph_serialize(
    g: *const ArborGraph,
    h: *const ArborSubgraph,
    out: *mut *mut c_char,
) -> ArborStatus {
    guard(|| {
        // SAFETY: caller contract.
        let (Some(g), Some(h)) = (unsafe { g.as_ref() }, unsafe { h.as_ref() }) else {
            return fail(ArborStatus::NullPointer, "null handle");
        };
        if out.is_null() {
            return fail(ArborStatus::NullPointer, "null output pointer");
        }
        let text = h.inner.serialize(&g.inner, &[]);
        let c = CString::new(text).expect("edge lists contain no NUL bytes");
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = c.into_raw() };
        ArborStatus::Ok
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn arbor_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by `CString::into_raw` in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Min-cost arborescence of `H - fault`; with `certify`, also of `G - fault`
/// and a check that the two costs lie within a factor of two.
///
/// # Safety
/// `g` and `h` must be live handles with `h` belonging to `g`; `out` must be
/// a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn arbor_query_fault(
    g: *const ArborGraph,
    h: *const ArborSubgraph,
    fault: usize,
    certify_result: bool,
    out: *mut ArborQueryResult,
) -> ArborStatus {
    guard(|| {
        // SAFETY: caller contract.
        let (Some(g), Some(h)) = (unsafe { g.as_ref() }, unsafe { h.as_ref() }) else {
            return fail(ArborStatus::NullPointer, "null handle");
        };
        if out.is_null() {
            return fail(ArborStatus::NullPointer, "null output pointer");
        }
        let outcome = if certify_result { certify(&g.inner, &h.inner, fault) } else { query_fault(&g.inner, &h.inner, fault) };
        let (r, status) = match outcome {
            Ok(r) => (r, ArborStatus::Ok),
            Err(FaultError::UnknownEdge(e)) => return fail(ArborStatus::UnknownEdge, format!("edge {e} is not an edge of the graph")),
            Err(FaultError::CertificationFailure { reason, result }) => (*result, fail(ArborStatus::CertificationFailed, reason)),
        };
        let res = ArborQueryResult {
            tree_edge: !r.reused_base_tree,
            interim_feasible: r.feasible(),
            interim_cost: r.interim_cost().map_or(0, |c| c.0),
            certified: r.exact.is_some(),
            exact_feasible: r.exact_cost().is_some(),
            exact_cost: r.exact_cost().map_or(0, |c| c.0),
        };
        // SAFETY: `out` is non-null and writable.
        unsafe { ptr::write(out, res) };
        status
    })
}
