//! C ABI over `nilpotwist`.
//!
//! Groups and strings cross the boundary as opaque handles owned by the
//! caller and released with the matching `*_free` function. Every fallible
//! call returns an [`NwStatus`] and writes its result through an out
//! pointer; on failure `nw_last_error_message` describes the error for the
//! current thread. Strings returned through `char **` out pointers are
//! released with `nw_free_cstring`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nilpotwist::catalog::CatalogSpec;
use nilpotwist::group::{build_pc_group, verify_class_at_most_2, PcPresentation};
use nilpotwist::invariants::{center, fingerprint, is_isomorphic_with, IsoOptions};
use nilpotwist::twist::{iterate_twist, string_of, string_report, twist, GroupString};
use nilpotwist::{Error, Group};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidPresentation = 3,
    Inconsistent = 4,
    NotClass2 = 5,
    NotNilpotent = 6,
    EvenOrder = 7,
    BudgetExceeded = 8,
    Internal = 9,
}

/// Opaque group handle.
pub struct NwGroup {
    inner: Group,
}

/// Opaque handle for the string of groups built from an input group.
pub struct NwString {
    inner: GroupString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> NwStatus {
    match e {
        Error::InvalidPresentation(_) | Error::InvalidTable { .. } => NwStatus::InvalidPresentation,
        Error::InconsistentPresentation { .. } => NwStatus::Inconsistent,
        Error::NotClass2 { .. } => NwStatus::NotClass2,
        Error::NotNilpotent { .. } => NwStatus::NotNilpotent,
        Error::EvenOrder(_) => NwStatus::EvenOrder,
        Error::SearchBudgetExceeded { .. } => NwStatus::BudgetExceeded,
        Error::InvalidElement { .. }
        | Error::NotAbelianRealizable(_)
        | Error::BadSpec { .. }
        | Error::Config(_)
        | Error::Io(_) => NwStatus::InvalidArgument,
    }
}

enum Failure {
    Status(NwStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(NwStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            NwStatus::Ok
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_last_error(msg);
            s
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal error: {msg}"));
            NwStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Status(NwStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn group_ref<'a>(g: *const NwGroup) -> Result<&'a Group, Failure> {
    g.as_ref().map(|g| &g.inner).ok_or_else(|| null("group handle"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out pointer"));
    }
    out.write(value);
    Ok(())
}

fn new_group(g: Group) -> *mut NwGroup {
    Box::into_raw(Box::new(NwGroup { inner: g }))
}

fn new_cstring(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::Status(NwStatus::Internal, "string contains NUL".into()))
}

/// Builds a group from a catalog spec such as `burnside:A:p=3`,
/// `heisenberg:p=3:k=2`, `abelian:3^3x3` or `product(a,b)`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_group_from_spec(spec: *const c_char, out: *mut *mut NwGroup) -> NwStatus {
    guard(|| {
        let spec: CatalogSpec = read_str(spec, "spec")?.parse()?;
        let g = spec.build()?;
        write(out, new_group(g))
    })
}

/// Builds a group from a JSON polycyclic presentation.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_group_from_json(json: *const c_char, out: *mut *mut NwGroup) -> NwStatus {
    guard(|| {
        let pres = PcPresentation::from_json(read_str(json, "json")?)?;
        write(out, new_group(build_pc_group(&pres)?))
    })
}

/// Releases a group handle. Null is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nw_group_free(g: *mut NwGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_group_order(g: *const NwGroup, out: *mut u64) -> NwStatus {
    guard(|| write(out, group_ref(g)?.order()))
}

/// Writes a newly allocated copy of the group's label.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_group_label(g: *const NwGroup, out: *mut *mut c_char) -> NwStatus {
    guard(|| {
        let label = new_cstring(group_ref(g)?.label().to_string())?;
        write(out, label)
    })
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_group_is_class2(g: *const NwGroup, out: *mut bool) -> NwStatus {
    guard(|| write(out, verify_class_at_most_2(group_ref(g)?)))
}

/// Multiplies elements given by their indices in `0..order`.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_group_multiply_index(g: *const NwGroup, a: u64, b: u64, out: *mut u64) -> NwStatus {
    guard(|| {
        let g = group_ref(g)?;
        if a >= g.order() || b >= g.order() {
            return Err(Failure::Status(
                NwStatus::InvalidArgument,
                format!("element index out of range for order {}", g.order()),
            ));
        }
        let c = g.multiply(&g.element_at(a as usize), &g.element_at(b as usize));
        write(out, g.index_of(&c) as u64)
    })
}

/// Twists the group by `x∘y = [x,y]^n xy`. The result is a new handle.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_group_twist(g: *const NwGroup, n: i64, out: *mut *mut NwGroup) -> NwStatus {
    guard(|| {
        let t = twist(group_ref(g)?, n)?;
        write(out, new_group(t.into_group()))
    })
}

/// Applies the twist by `n` to the group `i` times.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_group_iterate_twist(g: *const NwGroup, n: i64, i: u32, out: *mut *mut NwGroup) -> NwStatus {
    guard(|| {
        let t = iterate_twist(group_ref(g)?, n, i)?;
        write(out, new_group(t.into_group()))
    })
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_group_center_order(g: *const NwGroup, out: *mut u64) -> NwStatus {
    guard(|| write(out, center(group_ref(g)?).order()))
}

/// Writes the group's isomorphism invariants as a JSON object.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_group_fingerprint_json(g: *const NwGroup, out: *mut *mut c_char) -> NwStatus {
    guard(|| {
        let json = serde_json::to_string(&fingerprint(group_ref(g)?))
            .map_err(|e| Failure::Status(NwStatus::Internal, e.to_string()))?;
        write(out, new_cstring(json)?)
    })
}

/// Decides whether two groups are isomorphic. A `budget` of 0 uses the
/// default search budget.
///
/// # Safety
/// `g` and `h` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_is_isomorphic(
    g: *const NwGroup,
    h: *const NwGroup,
    budget: u64,
    out: *mut bool,
) -> NwStatus {
    guard(|| {
        let mut opts = IsoOptions::default();
        if budget > 0 {
            opts.budget = budget;
        }
        let v = is_isomorphic_with(group_ref(g)?, group_ref(h)?, opts)?;
        write(out, v.isomorphic)
    })
}

/// Builds the string of groups starting at `g`. The input must have odd
/// order and class at most 2.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_string_of(g: *const NwGroup, out: *mut *mut NwString) -> NwStatus {
    guard(|| {
        let s = string_of(group_ref(g)?)?;
        write(out, Box::into_raw(Box::new(NwString { inner: s })))
    })
}

unsafe fn string_ref<'a>(s: *const NwString) -> Result<&'a GroupString, Failure> {
    s.as_ref().map(|s| &s.inner).ok_or_else(|| null("string handle"))
}

/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_string_len(s: *const NwString, out: *mut usize) -> NwStatus {
    guard(|| write(out, string_ref(s)?.len()))
}

/// Writes a new handle for term `index` of the string.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_string_term(s: *const NwString, index: usize, out: *mut *mut NwGroup) -> NwStatus {
    guard(|| {
        let s = string_ref(s)?;
        let term = s.terms().get(index).ok_or_else(|| {
            Failure::Status(NwStatus::InvalidArgument, format!("term {index} out of range for length {}", s.len()))
        })?;
        write(out, new_group(term.clone()))
    })
}

/// Writes a JSON report of the string: per-term invariants and whether the
/// terms are pairwise non-isomorphic.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_string_report_json(s: *const NwString, out: *mut *mut c_char) -> NwStatus {
    guard(|| {
        let report = string_report(string_ref(s)?, IsoOptions::default())?;
        let json = serde_json::to_string(&report).map_err(|e| Failure::Status(NwStatus::Internal, e.to_string()))?;
        write(out, new_cstring(json)?)
    })
}

/// Releases a string handle. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nw_string_free(s: *mut NwString) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null after a
/// successful call. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn nw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned through a `char **` out pointer. Null is
/// ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nw_free_cstring(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
