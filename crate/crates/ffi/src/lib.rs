//! C ABI for the clsched toolkit.
//!
//! Networks and colorings cross the boundary as opaque handles created by
//! `clsched_*_new`-style functions and released with the matching `_free`.
//! Every fallible function returns a [`ClschedStatus`]; on failure a
//! description is available from [`clsched_last_error`] until the next call
//! on the same thread. Strings returned to C are NUL-terminated, owned by the
//! caller and released with [`clsched_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use clsched::capacity_bounds::{construct_for, upper_bound};
use clsched::channel_sim::{run_trials, symbolic_verify};
use clsched::coloring::{
    check_coloring, parse_coloring, search_end_to_end, search_mcl, search_mil, tdma, write_coloring, ColorAssignment,
    SearchError, MAX_COLORS,
};
use clsched::network_model::{parse_descriptor, write_descriptor, ChannelMode, LayeredNetwork};
use clsched::route_expansion::{expand, RouteExpandedGraph};
use clsched::topology_gen::{gen_folded_single, gen_folded_two_layer, gen_nested};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClschedStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A descriptor or coloring text was rejected.
    ParseError = 3,
    /// A numeric argument was out of range.
    InvalidArgument = 4,
    /// No coloring was found within the limits.
    SearchFailed = 5,
    /// A panic was caught at the boundary.
    Internal = 6,
}

/// Coloring strategy for [`clsched_color`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClschedStrategy {
    Mcl = 0,
    Mil = 1,
    EndToEnd = 2,
    Tdma = 3,
    Constructive = 4,
}

/// A layered network together with its route-expanded graph.
pub struct ClschedNetwork {
    graph: RouteExpandedGraph,
}

/// A coloring of the route-expanded graph of one network.
pub struct ClschedColoring {
    assignment: ColorAssignment,
}

/// Outcome of [`clsched_verify`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClschedVerification {
    /// The coloring satisfies every Coded Layer condition.
    pub checker_valid: bool,
    /// Number of condition violations found by the checker.
    pub violations: usize,
    /// Symbolic cancellation holds in the linear deterministic model.
    pub deterministic_ok: bool,
    /// Symbolic cancellation holds in the Gaussian model.
    pub gaussian_ok: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl ToString) {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("NUL bytes were replaced"));
}

fn fail(status: ClschedStatus, message: impl ToString) -> ClschedStatus {
    set_error(message);
    status
}

/// Runs `body`, converting a panic into [`ClschedStatus::Internal`].
fn guard(body: impl FnOnce() -> ClschedStatus) -> ClschedStatus {
    set_error("");
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(ClschedStatus::Internal, "panic in clsched"))
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, ClschedStatus> {
    if text.is_null() {
        return Err(fail(ClschedStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(text).to_str().map_err(|e| fail(ClschedStatus::InvalidUtf8, e))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

fn to_c_string(text: String) -> *mut c_char {
    CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
}

fn network_handle(net: LayeredNetwork) -> ClschedNetwork {
    ClschedNetwork { graph: expand(&net) }
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next clsched call on this thread.
#[no_mangle]
pub extern "C" fn clsched_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a network descriptor.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clsched_network_parse(text: *const c_char, out: *mut *mut ClschedNetwork) -> ClschedStatus {
    guard(|| {
        if out.is_null() {
            return fail(ClschedStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_descriptor(text) {
            Ok(net) => {
                write_out(out, network_handle(net));
                ClschedStatus::Ok
            }
            Err(e) => fail(ClschedStatus::ParseError, e),
        }
    })
}

/// Family of generated network for [`clsched_network_generate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClschedFamily {
    /// Single-layer `(a, b)` folded chain.
    FoldedSingle = 0,
    /// Two-layer `(a, b)` folded chain.
    FoldedTwoLayer = 1,
    /// `a`-nested folded chain; `b` is ignored.
    Nested = 2,
}

/// Generates a network of `family` with parameters `a` and `b`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clsched_network_generate(
    family: ClschedFamily,
    a: u32,
    b: u32,
    out: *mut *mut ClschedNetwork,
) -> ClschedStatus {
    guard(|| {
        if out.is_null() {
            return fail(ClschedStatus::NullPointer, "null output pointer");
        }
        let net = match family {
            ClschedFamily::FoldedSingle => gen_folded_single(a, b),
            ClschedFamily::FoldedTwoLayer => gen_folded_two_layer(a, b),
            ClschedFamily::Nested => gen_nested(a),
        };
        match net {
            Ok(net) => {
                write_out(out, network_handle(net));
                ClschedStatus::Ok
            }
            Err(e) => fail(ClschedStatus::InvalidArgument, e),
        }
    })
}

/// Releases a network. Null is ignored.
///
/// # Safety
/// `net` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn clsched_network_free(net: *mut ClschedNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of source-destination pairs, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live network handle.
#[no_mangle]
pub unsafe extern "C" fn clsched_network_num_pairs(net: *const ClschedNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.graph.network().num_pairs())
}

/// Writes the descriptor text of `net` to `*out`.
///
/// # Safety
/// `net` must be a live network handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clsched_network_descriptor(
    net: *const ClschedNetwork,
    out: *mut *mut c_char,
) -> ClschedStatus {
    guard(|| {
        let (Some(net), false) = (net.as_ref(), out.is_null()) else {
            return fail(ClschedStatus::NullPointer, "null argument");
        };
        *out = to_c_string(write_descriptor(net.graph.network()));
        ClschedStatus::Ok
    })
}

/// Upper bound on the normalized sum-capacity as the fraction `num / den`.
///
/// # Safety
/// `net` must be a live network handle; `num` and `den` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn clsched_upper_bound(
    net: *const ClschedNetwork,
    num: *mut u64,
    den: *mut u64,
) -> ClschedStatus {
    guard(|| {
        let Some(net) = net.as_ref() else {
            return fail(ClschedStatus::NullPointer, "null network");
        };
        if num.is_null() || den.is_null() {
            return fail(ClschedStatus::NullPointer, "null output pointer");
        }
        let bound = upper_bound(net.graph.network()).alpha_upper;
        *num = *bound.numer();
        *den = *bound.denom();
        ClschedStatus::Ok
    })
}

/// Computes a coloring of `net`. `max_colors` of 0 means the number of
/// pairs; `budget` limits the Coded Layer search.
///
/// # Safety
/// `net` must be a live network handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clsched_color(
    net: *const ClschedNetwork,
    strategy: ClschedStrategy,
    max_colors: usize,
    budget: u64,
    out: *mut *mut ClschedColoring,
) -> ClschedStatus {
    guard(|| {
        let (Some(net), false) = (net.as_ref(), out.is_null()) else {
            return fail(ClschedStatus::NullPointer, "null argument");
        };
        let g = &net.graph;
        let t_max = if max_colors == 0 { g.network().num_pairs().min(MAX_COLORS) } else { max_colors };
        if t_max > MAX_COLORS {
            return fail(ClschedStatus::InvalidArgument, format!("max_colors above {MAX_COLORS}"));
        }
        let result = match strategy {
            ClschedStrategy::Mcl => search_mcl(g, t_max, budget).map(|o| o.assignment).or_else(|e| match e {
                SearchError::BudgetExhausted { fallback, .. } => Ok(*fallback),
                e => Err(e.to_string()),
            }),
            ClschedStrategy::Mil => search_mil(g).map_err(|e| e.to_string()),
            ClschedStrategy::EndToEnd => search_end_to_end(g).map_err(|e| e.to_string()),
            ClschedStrategy::Tdma => tdma(g).map_err(|e| e.to_string()),
            ClschedStrategy::Constructive => match construct_for(g.network()) {
                Some(c) => c.map(|c| c.assignment).map_err(|e| e.to_string()),
                None => Err("no constructive coloring for this network".to_string()),
            },
        };
        match result {
            Ok(a) if a.num_colors <= t_max => {
                write_out(out, ClschedColoring { assignment: a });
                ClschedStatus::Ok
            }
            Ok(a) => fail(ClschedStatus::SearchFailed, format!("needs {} colors", a.num_colors)),
            Err(e) => fail(ClschedStatus::SearchFailed, e),
        }
    })
}

/// Parses a coloring file for `net`.
///
/// # Safety
/// `net` must be a live network handle, `text` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clsched_coloring_parse(
    net: *const ClschedNetwork,
    text: *const c_char,
    out: *mut *mut ClschedColoring,
) -> ClschedStatus {
    guard(|| {
        let (Some(net), false) = (net.as_ref(), out.is_null()) else {
            return fail(ClschedStatus::NullPointer, "null argument");
        };
        let text = match read_str(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_coloring(&net.graph, text) {
            Ok(a) => {
                write_out(out, ClschedColoring { assignment: a });
                ClschedStatus::Ok
            }
            Err(e) => fail(ClschedStatus::ParseError, e),
        }
    })
}

/// Writes the coloring file text of `coloring` to `*out`.
///
/// # Safety
/// Both handles must be live, `coloring` must belong to `net`, and `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clsched_coloring_text(
    net: *const ClschedNetwork,
    coloring: *const ClschedColoring,
    out: *mut *mut c_char,
) -> ClschedStatus {
    guard(|| {
        let (Some(net), Some(c), false) = (net.as_ref(), coloring.as_ref(), out.is_null()) else {
            return fail(ClschedStatus::NullPointer, "null argument");
        };
        *out = to_c_string(write_coloring(&net.graph, &c.assignment));
        ClschedStatus::Ok
    })
}

/// Number of colors of `coloring`, or 0 for a null handle.
///
/// # Safety
/// `coloring` must be null or a live coloring handle.
#[no_mangle]
pub unsafe extern "C" fn clsched_coloring_num_colors(coloring: *const ClschedColoring) -> usize {
    coloring.as_ref().map_or(0, |c| c.assignment.num_colors)
}

/// Releases a coloring. Null is ignored.
///
/// # Safety
/// `coloring` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn clsched_coloring_free(coloring: *mut ClschedColoring) {
    if !coloring.is_null() {
        drop(Box::from_raw(coloring));
    }
}

fn belongs(net: &ClschedNetwork, c: &ClschedColoring) -> bool {
    c.assignment.nodes == net.graph.nodes()
}

/// Runs the condition checker and the symbolic verifier in both channel
/// models.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clsched_verify(
    net: *const ClschedNetwork,
    coloring: *const ClschedColoring,
    out: *mut ClschedVerification,
) -> ClschedStatus {
    guard(|| {
        let (Some(net), Some(c), Some(out)) = (net.as_ref(), coloring.as_ref(), out.as_mut()) else {
            return fail(ClschedStatus::NullPointer, "null argument");
        };
        if !belongs(net, c) {
            return fail(ClschedStatus::InvalidArgument, "coloring belongs to another network");
        }
        let (g, a) = (&net.graph, &c.assignment);
        let checked = check_coloring(g, a).and_then(|report| {
            let det = symbolic_verify(g, a, ChannelMode::Deterministic)?;
            let gauss = symbolic_verify(g, a, ChannelMode::Gaussian)?;
            Ok(ClschedVerification {
                checker_valid: report.valid,
                violations: report.violations.len(),
                deterministic_ok: det.passed(),
                gaussian_ok: gauss.passed(),
            })
        });
        match checked {
            Ok(v) => {
                *out = v;
                ClschedStatus::Ok
            }
            Err(e) => fail(ClschedStatus::InvalidArgument, e),
        }
    })
}

/// Runs `trials` seeded random-gain simulations with `q`-bit signals and
/// stores how many matched the isolated runs bit for bit.
///
/// # Safety
/// Both handles must be live and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clsched_simulate(
    net: *const ClschedNetwork,
    coloring: *const ClschedColoring,
    q: u32,
    trials: usize,
    seed: u64,
    passed: *mut usize,
) -> ClschedStatus {
    guard(|| {
        let (Some(net), Some(c), Some(passed)) = (net.as_ref(), coloring.as_ref(), passed.as_mut()) else {
            return fail(ClschedStatus::NullPointer, "null argument");
        };
        if !belongs(net, c) {
            return fail(ClschedStatus::InvalidArgument, "coloring belongs to another network");
        }
        match run_trials(&net.graph, &c.assignment, q, trials, seed) {
            Ok(summary) => {
                *passed = summary.passed;
                ClschedStatus::Ok
            }
            Err(e) => fail(ClschedStatus::InvalidArgument, e),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn clsched_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
