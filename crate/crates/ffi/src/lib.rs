//! C ABI for `weakseq`.
//!
//! Every fallible function returns a [`WsStatus`] and writes its result
//! through an out-pointer. On failure the out-pointer is left untouched and
//! [`ws_last_error_message`] describes the problem. Objects handed out as
//! pointers are opaque and must be released with the matching `*_free`
//! function; strings returned by the library are released with
//! [`ws_string_free`].
//!
//! Panics never cross the boundary: they are caught and reported as
//! [`WsStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use weakseq::poly::{coefficient, Algorithm, ExtractOptions, FactorSystem, FamilyKind, Monomial};
use weakseq::search::{
    backtracking_search, construct_t3, greedy_prefix, GreedyOptions, SearchBudget,
    SearchOutcome, Variant,
};
use weakseq::zn::{classify_ordering, partial_sums, Modulus, Ordering, OrderingClass, SubsetSpec};
use weakseq::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Arguments out of range or inconsistent (bad modulus, duplicate
    /// element, window larger than the set, unknown family, ...).
    InvalidArgument = 3,
    /// A caller-supplied buffer is too small.
    BufferTooSmall = 4,
    /// The computation would exceed its memory cap.
    ResourceLimit = 5,
    /// A greedy prefix ran out of candidates.
    Exhausted = 6,
    /// A bug in the library, including caught panics.
    Internal = 7,
}

/// Outcome of [`ws_search`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WsSearchResult {
    Found = 0,
    NoneExists = 1,
    BudgetExhausted = 2,
}

/// Classification of an ordering by its partial sums.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WsOrderingClass {
    /// All partial sums distinct.
    Sequencing = 0,
    /// `s_1..s_{k-1}` distinct and nonzero, `s_k = 0`.
    RSequencing = 1,
    Neither = 2,
}

/// A set of distinct nonzero residues modulo n.
pub struct WsSubset(SubsetSpec);

/// A sequence of distinct nonzero residues modulo n.
pub struct WsOrdering(Ordering);

/// A product of linear factors.
pub struct WsSystem(FactorSystem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> WsStatus {
    match err {
        Error::ResourceLimit { .. } => WsStatus::ResourceLimit,
        Error::GreedyExhausted { .. } => WsStatus::Exhausted,
        Error::InternalInvariant { .. } | Error::Io(_) | Error::Json(_) => WsStatus::Internal,
        _ => WsStatus::InvalidArgument,
    }
}

fn fail(status: WsStatus, msg: impl Into<String>) -> WsStatus {
    set_error(msg);
    status
}

/// Run `f`, turning errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), WsStatus>) -> WsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WsStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(WsStatus::Internal, "panic inside weakseq"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, WsStatus>;
}

impl<T> OrStatus<T> for weakseq::Result<T> {
    fn or_status(self) -> Result<T, WsStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, WsStatus> {
    // SAFETY: the caller guarantees `p` is null or valid for reads.
    unsafe { p.as_ref() }.ok_or_else(|| fail(WsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn check_out<T>(p: *mut T, what: &str) -> Result<(), WsStatus> {
    if p.is_null() {
        Err(fail(WsStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, WsStatus> {
    if p.is_null() {
        return Err(fail(WsStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: the caller guarantees a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| fail(WsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], WsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(WsStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: the caller guarantees `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn write_slice(src: &[u32], buf: *mut u32, cap: usize) -> Result<(), WsStatus> {
    if cap < src.len() {
        return Err(fail(
            WsStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(fail(WsStatus::NullPointer, "buffer is null"));
        }
        // SAFETY: checked capacity; the caller guarantees `cap` writable slots.
        unsafe { ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
    }
    Ok(())
}

fn modulus(n: u64) -> Result<Modulus, WsStatus> {
    Modulus::new(n).or_status()
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ws_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ws_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ws_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by `CString::into_raw` in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

// ---- subsets ---------------------------------------------------------------

/// Subset of Z_n from residues in `0..n`. Elements must be distinct and
/// nonzero; they are stored sorted.
///
/// # Safety
/// `elements` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_subset_new(
    n: u64,
    elements: *const u32,
    len: usize,
    out: *mut *mut WsSubset,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(out, "out") }?;
        let elems = unsafe { read_slice(elements, len, "elements") }?;
        let set = SubsetSpec::new(modulus(n)?, elems.to_vec()).or_status()?;
        unsafe { *out = boxed(WsSubset(set)) };
        Ok(())
    })
}

/// Subset of Z_n from a comma separated list such as `"1,2,-3"`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_subset_parse(
    n: u64,
    text: *const c_char,
    out: *mut *mut WsSubset,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(out, "out") }?;
        let text = unsafe { read_str(text, "text") }?;
        let set = SubsetSpec::parse(modulus(n)?, text).or_status()?;
        unsafe { *out = boxed(WsSubset(set)) };
        Ok(())
    })
}

/// Number of elements, or 0 for null.
///
/// # Safety
/// `set` must be null or a live subset.
#[no_mangle]
pub unsafe extern "C" fn ws_subset_len(set: *const WsSubset) -> usize {
    unsafe { set.as_ref() }.map_or(0, |s| s.0.len())
}

/// Copy the sorted elements into `buf`, which must hold `ws_subset_len`
/// values.
///
/// # Safety
/// `set` must be a live subset; `buf` must have `cap` writable slots.
#[no_mangle]
pub unsafe extern "C" fn ws_subset_elements(
    set: *const WsSubset,
    buf: *mut u32,
    cap: usize,
) -> WsStatus {
    guard(|| {
        let set = unsafe { non_null(set, "set") }?;
        unsafe { write_slice(set.0.elements(), buf, cap) }
    })
}

/// # Safety
/// `set` must be null or a live subset, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ws_subset_free(set: *mut WsSubset) {
    if !set.is_null() {
        drop(unsafe { Box::from_raw(set) });
    }
}

// ---- orderings -------------------------------------------------------------

/// Ordering of distinct nonzero residues in `0..n`.
///
/// # Safety
/// `sequence` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_ordering_new(
    n: u64,
    sequence: *const u32,
    len: usize,
    out: *mut *mut WsOrdering,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(out, "out") }?;
        let seq = unsafe { read_slice(sequence, len, "sequence") }?;
        let ordering = Ordering::new(modulus(n)?, seq.to_vec()).or_status()?;
        unsafe { *out = boxed(WsOrdering(ordering)) };
        Ok(())
    })
}

/// Ordering from a comma separated list such as `"1,-2,5"`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_ordering_parse(
    n: u64,
    text: *const c_char,
    out: *mut *mut WsOrdering,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(out, "out") }?;
        let text = unsafe { read_str(text, "text") }?;
        let ordering = Ordering::parse(modulus(n)?, text).or_status()?;
        unsafe { *out = boxed(WsOrdering(ordering)) };
        Ok(())
    })
}

/// Number of elements, or 0 for null.
///
/// # Safety
/// `ordering` must be null or a live ordering.
#[no_mangle]
pub unsafe extern "C" fn ws_ordering_len(ordering: *const WsOrdering) -> usize {
    unsafe { ordering.as_ref() }.map_or(0, |o| o.0.len())
}

/// Copy the sequence into `buf`.
///
/// # Safety
/// `ordering` must be live; `buf` must have `cap` writable slots.
#[no_mangle]
pub unsafe extern "C" fn ws_ordering_elements(
    ordering: *const WsOrdering,
    buf: *mut u32,
    cap: usize,
) -> WsStatus {
    guard(|| {
        let o = unsafe { non_null(ordering, "ordering") }?;
        unsafe { write_slice(o.0.sequence(), buf, cap) }
    })
}

/// Copy the partial sums `s_0 = 0, s_1, ..., s_k` into `buf`, which must
/// hold `len + 1` values.
///
/// # Safety
/// `ordering` must be live; `buf` must have `cap` writable slots.
#[no_mangle]
pub unsafe extern "C" fn ws_ordering_partial_sums(
    ordering: *const WsOrdering,
    buf: *mut u32,
    cap: usize,
) -> WsStatus {
    guard(|| {
        let o = unsafe { non_null(ordering, "ordering") }?;
        unsafe { write_slice(partial_sums(&o.0).as_slice(), buf, cap) }
    })
}

/// # Safety
/// `ordering` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_ordering_classify(
    ordering: *const WsOrdering,
    out: *mut WsOrderingClass,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(out, "out") }?;
        let o = unsafe { non_null(ordering, "ordering") }?;
        let class = match classify_ordering(&o.0) {
            OrderingClass::Sequencing => WsOrderingClass::Sequencing,
            OrderingClass::RSequencing => WsOrderingClass::RSequencing,
            OrderingClass::Neither => WsOrderingClass::Neither,
        };
        unsafe { *out = class };
        Ok(())
    })
}

/// Number of pairs `i < j` with `j - i <= t` and `s_i = s_j`. Zero means the
/// ordering is a t-weak sequencing.
///
/// # Safety
/// `ordering` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_ordering_violation_count(
    ordering: *const WsOrdering,
    t: usize,
    out: *mut usize,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(out, "out") }?;
        let o = unsafe { non_null(ordering, "ordering") }?;
        let v = weakseq::zn::t_weak_violations(&o.0, t).or_status()?;
        unsafe { *out = v.len() };
        Ok(())
    })
}

/// # Safety
/// `ordering` must be null or live, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ws_ordering_free(ordering: *mut WsOrdering) {
    if !ordering.is_null() {
        drop(unsafe { Box::from_raw(ordering) });
    }
}

// ---- search ----------------------------------------------------------------

/// Depth-first search for a t-weak sequencing visiting at most `max_nodes`
/// nodes (0 for the library default). `*ordering` receives a new ordering
/// when the result is `Found` and null otherwise; `nodes` may be null.
///
/// # Safety
/// `set` must be live; `result` and `ordering` must be writable; `nodes`
/// must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ws_search(
    set: *const WsSubset,
    t: usize,
    max_nodes: u64,
    result: *mut WsSearchResult,
    ordering: *mut *mut WsOrdering,
    nodes: *mut u64,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(result, "result") }?;
        unsafe { check_out(ordering, "ordering") }?;
        let set = unsafe { non_null(set, "set") }?;
        let budget = if max_nodes == 0 {
            SearchBudget::default()
        } else {
            SearchBudget::nodes(max_nodes)
        };
        let outcome = backtracking_search(&set.0, t, budget).or_status()?;
        if !nodes.is_null() {
            unsafe { *nodes = outcome.nodes() };
        }
        let (res, found) = match outcome {
            SearchOutcome::Found { ordering, .. } => (WsSearchResult::Found, boxed(WsOrdering(ordering))),
            SearchOutcome::NoneExists { .. } => (WsSearchResult::NoneExists, ptr::null_mut()),
            SearchOutcome::BudgetExhausted { .. } => {
                (WsSearchResult::BudgetExhausted, ptr::null_mut())
            }
        };
        unsafe {
            *result = res;
            *ordering = found;
        }
        Ok(())
    })
}

/// 3-weak sequencing of a set with at least four elements.
///
/// # Safety
/// `set` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_construct_t3(
    set: *const WsSubset,
    out: *mut *mut WsOrdering,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(out, "out") }?;
        let set = unsafe { non_null(set, "set") }?;
        let ordering = construct_t3(&set.0).or_status()?;
        unsafe { *out = boxed(WsOrdering(ordering)) };
        Ok(())
    })
}

/// Greedy t-weak prefix of length `h`. `cmpp` selects the variant that
/// ignores the single-element window; `involution_first` starts with n/2
/// when the set contains it.
///
/// # Safety
/// `set` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_greedy_prefix(
    set: *const WsSubset,
    t: usize,
    h: usize,
    cmpp: bool,
    involution_first: bool,
    out: *mut *mut WsOrdering,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(out, "out") }?;
        let set = unsafe { non_null(set, "set") }?;
        let opts = GreedyOptions {
            variant: if cmpp { Variant::Cmpp } else { Variant::Main },
            involution_first,
        };
        let prefix = greedy_prefix(&set.0, t, h, opts).or_status()?;
        unsafe { *out = boxed(WsOrdering(prefix)) };
        Ok(())
    })
}

// ---- polynomial systems ----------------------------------------------------

/// Build a polynomial family by name (`F`, `P`, `Pbar`, `Q`, `Qbar`, `Htop`,
/// `Hbartop`). Pass 0 for parameters the family does not take.
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_system_build(
    family: *const c_char,
    k: usize,
    t: usize,
    ell: usize,
    out: *mut *mut WsSystem,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(out, "out") }?;
        let name = unsafe { read_str(family, "family") }?;
        let kind: FamilyKind = name.parse().or_status()?;
        let opt = |v: usize| (v != 0).then_some(v);
        let fam = kind.with_params(opt(k), opt(t), opt(ell)).or_status()?;
        let sys = FactorSystem::build(fam).or_status()?;
        unsafe { *out = boxed(WsSystem(sys)) };
        Ok(())
    })
}

/// Number of linear factors, i.e. the total degree; 0 for null.
///
/// # Safety
/// `sys` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn ws_system_degree(sys: *const WsSystem) -> usize {
    unsafe { sys.as_ref() }.map_or(0, |s| s.0.degree())
}

/// Number of variables; 0 for null.
///
/// # Safety
/// `sys` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn ws_system_num_vars(sys: *const WsSystem) -> usize {
    unsafe { sys.as_ref() }.map_or(0, |s| s.0.num_vars())
}

/// Exact coefficient of the monomial with exponents `exponents[0..len]`, as
/// a decimal string to be released with [`ws_string_free`]. `memory_cap`
/// bounds the working set in bytes (0 for the library default).
///
/// # Safety
/// `sys` must be live; `exponents` must point to `len` values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ws_coefficient(
    sys: *const WsSystem,
    exponents: *const u32,
    len: usize,
    memory_cap: u64,
    out: *mut *mut c_char,
) -> WsStatus {
    guard(|| {
        unsafe { check_out(out, "out") }?;
        let sys = unsafe { non_null(sys, "sys") }?;
        let exps = unsafe { read_slice(exponents, len, "exponents") }?;
        let mut opts = ExtractOptions {
            algorithm: Algorithm::Auto,
            ..ExtractOptions::default()
        };
        if memory_cap != 0 {
            opts.memory_cap = memory_cap;
        }
        let value = coefficient(&sys.0, &Monomial(exps.to_vec()), opts).or_status()?;
        let s = CString::new(value.to_string()).expect("digits contain no NUL");
        unsafe { *out = s.into_raw() };
        Ok(())
    })
}

/// # Safety
/// `sys` must be null or live, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ws_system_free(sys: *mut WsSystem) {
    if !sys.is_null() {
        drop(unsafe { Box::from_raw(sys) });
    }
}
