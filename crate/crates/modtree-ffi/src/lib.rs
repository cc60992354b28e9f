//! C ABI for the modtree library.
//!
//! Conventions:
//! - Trees are passed around as opaque handles (`MtSpec`, `MtFiniteTree`)
//!   created from the JSON document formats and released with the matching
//!   `*_free` function.
//! - Every fallible call returns an `MtStatus`; output values go through out
//!   pointers that are written only on `MT_STATUS_OK`.
//! - The message for the most recent failure on the current thread is
//!   available via `mt_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use modtree::analytic::{mod_p_infinite, mod_p_truncated, Classification};
use modtree::critical::{classify_walk, estimate_pc, WalkClass};
use modtree::schema::parse_tree_file;
use modtree::solver::{solve_finite_modulus, SolveOptions};
use modtree::tree::{ChildrenRule, FiniteTree, RadialTreeSpec};
use modtree::ModtreeError;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtStatus {
    /// Success.
    MtStatusOk = 0,
    /// A pointer argument was null.
    MtStatusNullArgument = 1,
    /// The input document or parameter was invalid.
    MtStatusInvalidInput = 2,
    /// The computation could not certify a result.
    MtStatusInconclusive = 3,
    /// An internal error (panic) occurred.
    MtStatusInternal = 4,
}

/// Classification of an infinite-tree modulus.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtModulusKind {
    MtModulusPositive = 0,
    MtModulusZero = 1,
    MtModulusInconclusive = 2,
}

/// Transience classification of the conductance-weighted random walk.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtWalkClass {
    MtWalkTransient = 0,
    MtWalkRecurrent = 1,
    MtWalkUndetermined = 2,
}

/// Critical-exponent bracket for a skip-sequence tree.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MtPcEstimate {
    /// Lower end of the bracket; meaningless when an endpoint flag is set.
    pub p_lo: f64,
    /// Upper end of the bracket; meaningless when an endpoint flag is set.
    pub p_hi: f64,
    /// Point estimate; meaningless when an endpoint flag is set.
    pub estimate: f64,
    /// Nonzero when the series is summable for every exponent.
    pub pc_is_one: u8,
    /// Nonzero when the series diverges for every exponent.
    pub pc_is_infinite: u8,
}

/// Opaque handle for a radially symmetric tree specification.
pub struct MtSpec(RadialTreeSpec);

/// Opaque handle for an explicit finite tree.
pub struct MtFiniteTree(FiniteTree);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("invalid error message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &ModtreeError) -> MtStatus {
    match err {
        ModtreeError::InconclusiveModulus | ModtreeError::UndecidableGrowth => {
            MtStatus::MtStatusInconclusive
        }
        _ => MtStatus::MtStatusInvalidInput,
    }
}

fn fail(err: ModtreeError) -> MtStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Run `body` with panics converted to `MT_STATUS_INTERNAL`.
fn guarded(body: impl FnOnce() -> MtStatus) -> MtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".into());
            MtStatus::MtStatusInternal
        }
    }
}

unsafe fn parse_utf8<'a>(ptr: *const c_char) -> Result<&'a str, MtStatus> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return Err(MtStatus::MtStatusNullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8".into());
        MtStatus::MtStatusInvalidInput
    })
}

macro_rules! require_nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_error(format!("null argument: {}", stringify!($ptr)));
            return MtStatus::MtStatusNullArgument;
        }
    };
}

/// Returns the message for the most recent failure on this thread, or null if
/// no failure has occurred. The pointer stays valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn mt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |c| c.as_ptr())
    })
}

/// Parses a radially symmetric tree document (JSON, kind "radial" or "skip")
/// into a new handle. The handle must be released with `mt_spec_free`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mt_spec_parse(json: *const c_char, out: *mut *mut MtSpec) -> MtStatus {
    guarded(|| {
        require_nonnull!(out);
        let text = match parse_utf8(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_tree_file(text).and_then(|doc| doc.to_spec()) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(MtSpec(spec)));
                MtStatus::MtStatusOk
            }
            Err(err) => fail(err),
        }
    })
}

/// Releases a handle created by `mt_spec_parse`. Passing null is a no-op.
///
/// # Safety
/// `spec` must be null or a pointer previously returned by `mt_spec_parse`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn mt_spec_free(spec: *mut MtSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Parses an explicit finite tree document (JSON, kind "finite") into a new
/// handle. The handle must be released with `mt_finite_tree_free`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mt_finite_tree_parse(
    json: *const c_char,
    out: *mut *mut MtFiniteTree,
) -> MtStatus {
    guarded(|| {
        require_nonnull!(out);
        let text = match parse_utf8(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_tree_file(text).and_then(|doc| doc.to_finite()) {
            Ok(tree) => {
                *out = Box::into_raw(Box::new(MtFiniteTree(tree)));
                MtStatus::MtStatusOk
            }
            Err(err) => fail(err),
        }
    })
}

/// Releases a handle created by `mt_finite_tree_parse`. Passing null is a
/// no-op.
///
/// # Safety
/// `tree` must be null or a pointer previously returned by
/// `mt_finite_tree_parse` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn mt_finite_tree_free(tree: *mut MtFiniteTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Classifies the p-modulus of the full infinite family. `out_value` receives
/// the modulus when the classification is positive, 0 when it is zero, and is
/// not written otherwise.
///
/// # Safety
/// All pointers must be valid; `spec` must be a live `mt_spec_parse` handle.
#[no_mangle]
pub unsafe extern "C" fn mt_mod_p_infinite(
    spec: *const MtSpec,
    p: f64,
    out_kind: *mut MtModulusKind,
    out_value: *mut f64,
) -> MtStatus {
    guarded(|| {
        require_nonnull!(spec);
        require_nonnull!(out_kind);
        require_nonnull!(out_value);
        match mod_p_infinite(&(*spec).0, p) {
            Ok(outcome) => {
                match outcome.classification {
                    Classification::Positive { value } => {
                        *out_kind = MtModulusKind::MtModulusPositive;
                        *out_value = value;
                    }
                    Classification::Zero { .. } => {
                        *out_kind = MtModulusKind::MtModulusZero;
                        *out_value = 0.0;
                    }
                    Classification::Inconclusive { .. } => {
                        *out_kind = MtModulusKind::MtModulusInconclusive;
                    }
                }
                MtStatus::MtStatusOk
            }
            Err(err) => fail(err),
        }
    })
}

/// Exact modulus of the depth-`n` truncation.
///
/// # Safety
/// All pointers must be valid; `spec` must be a live `mt_spec_parse` handle.
#[no_mangle]
pub unsafe extern "C" fn mt_mod_p_truncated(
    spec: *const MtSpec,
    p: f64,
    n: usize,
    out_value: *mut f64,
) -> MtStatus {
    guarded(|| {
        require_nonnull!(spec);
        require_nonnull!(out_value);
        match mod_p_truncated(&(*spec).0, p, n) {
            Ok((value, _)) => {
                *out_value = value;
                MtStatus::MtStatusOk
            }
            Err(err) => fail(err),
        }
    })
}

/// Brackets the critical exponent of a skip-sequence tree to within
/// `resolution`.
///
/// # Safety
/// All pointers must be valid; `spec` must be a live `mt_spec_parse` handle
/// whose children rule is a skip sequence.
#[no_mangle]
pub unsafe extern "C" fn mt_estimate_pc(
    spec: *const MtSpec,
    resolution: f64,
    out: *mut MtPcEstimate,
) -> MtStatus {
    guarded(|| {
        require_nonnull!(spec);
        require_nonnull!(out);
        let skip = match &(*spec).0.children {
            ChildrenRule::Skip { skip } => skip.clone(),
            _ => {
                return fail(ModtreeError::Schema(
                    "critical exponent estimation requires a skip-sequence tree".into(),
                ))
            }
        };
        match estimate_pc(&skip, resolution) {
            Ok(est) => {
                *out = MtPcEstimate {
                    p_lo: est.p_lo,
                    p_hi: est.p_hi,
                    estimate: est.estimate,
                    pc_is_one: est.pc_is_one as u8,
                    pc_is_infinite: est.pc_is_infinite as u8,
                };
                MtStatus::MtStatusOk
            }
            Err(err) => fail(err),
        }
    })
}

/// Classifies the conductance-weighted random walk on the tree as transient
/// or recurrent via the 2-modulus.
///
/// # Safety
/// All pointers must be valid; `spec` must be a live `mt_spec_parse` handle.
#[no_mangle]
pub unsafe extern "C" fn mt_classify_walk(
    spec: *const MtSpec,
    out_class: *mut MtWalkClass,
) -> MtStatus {
    guarded(|| {
        require_nonnull!(spec);
        require_nonnull!(out_class);
        match classify_walk(&(*spec).0) {
            Ok(class) => {
                *out_class = match class {
                    WalkClass::Transient => MtWalkClass::MtWalkTransient,
                    WalkClass::Recurrent => MtWalkClass::MtWalkRecurrent,
                    WalkClass::Undetermined => MtWalkClass::MtWalkUndetermined,
                };
                MtStatus::MtStatusOk
            }
            Err(err) => fail(err),
        }
    })
}

/// Numerically solves the modulus problem on an explicit finite tree.
/// `out_density` (optional, may be null) must point to at least
/// `mt_finite_tree_edge_count` doubles and receives the optimal density in
/// edge-index order.
///
/// # Safety
/// `tree` must be a live `mt_finite_tree_parse` handle; `out_value` must be
/// valid; `out_density` must be null or a buffer of at least edge-count
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn mt_solve(
    tree: *const MtFiniteTree,
    p: f64,
    out_value: *mut f64,
    out_density: *mut f64,
) -> MtStatus {
    guarded(|| {
        require_nonnull!(tree);
        require_nonnull!(out_value);
        match solve_finite_modulus(&(*tree).0, &SolveOptions::new(p)) {
            Ok(report) => {
                *out_value = report.value;
                if !out_density.is_null() {
                    ptr::copy_nonoverlapping(
                        report.density.0.as_ptr(),
                        out_density,
                        report.density.0.len(),
                    );
                }
                MtStatus::MtStatusOk
            }
            Err(err) => fail(err),
        }
    })
}

/// Number of edges of a finite-tree handle.
///
/// # Safety
/// `tree` must be a live `mt_finite_tree_parse` handle.
#[no_mangle]
pub unsafe extern "C" fn mt_finite_tree_edge_count(tree: *const MtFiniteTree) -> usize {
    if tree.is_null() {
        return 0;
    }
    (*tree).0.edge_count()
}
