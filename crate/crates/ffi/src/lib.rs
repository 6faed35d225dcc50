//! C ABI over `multiorder`.
//!
//! Orders are opaque `MoOrder` handles owned by the caller and released with
//! [`mo_order_free`]. Every fallible call returns a [`MoStatus`]; on failure
//! the message is available from [`mo_last_error`] on the same thread.
//! Strings returned by the library are released with [`mo_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::c_char;
use multiorder::error::Error;
use multiorder::group::{GroupElement, GroupKind};
use multiorder::multiorder::{Family, MultiorderSampler};
use multiorder::order::{order_metric, reindex_check, Order, OrderWindow};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoStatus {
    Ok = 0,
    Usage = 1,
    Horizon = 2,
    Parse = 3,
    Precondition = 4,
    Contradiction = 5,
    NullPointer = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoGroup {
    Z = 0,
    Z2 = 1,
    Z3 = 2,
    H3 = 3,
}

/// A group element; coordinates past the group's rank are ignored on input
/// and zero on output.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoElement {
    pub group: MoGroup,
    pub coords: [i64; 3],
}

/// Opaque order handle.
pub struct MoOrder {
    inner: Order,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MoStatus {
    match e {
        Error::Usage(_) => MoStatus::Usage,
        Error::Horizon(_) => MoStatus::Horizon,
        Error::Parse(_) => MoStatus::Parse,
        Error::Precondition(_) => MoStatus::Precondition,
        Error::Contradiction(_) => MoStatus::Contradiction,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            MoStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer: {what}"));
            MoStatus::NullPointer
        }
        Err(_) => {
            set_last_error("internal panic");
            MoStatus::Panic
        }
    }
}

fn kind(g: MoGroup) -> GroupKind {
    match g {
        MoGroup::Z => GroupKind::Z,
        MoGroup::Z2 => GroupKind::Z2,
        MoGroup::Z3 => GroupKind::Z3,
        MoGroup::H3 => GroupKind::H3,
    }
}

fn mo_group(g: GroupKind) -> MoGroup {
    match g {
        GroupKind::Z => MoGroup::Z,
        GroupKind::Z2 => MoGroup::Z2,
        GroupKind::Z3 => MoGroup::Z3,
        GroupKind::H3 => MoGroup::H3,
    }
}

fn to_element(e: &MoElement) -> Result<GroupElement, Failure> {
    let k = kind(e.group);
    Ok(k.element(&e.coords[..k.dim()])?)
}

fn from_element(g: &GroupElement) -> MoElement {
    let mut coords = [0i64; 3];
    coords[..g.coords().len()].copy_from_slice(g.coords());
    MoElement { group: mo_group(g.kind()), coords }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::parse(format!("{what} is not valid UTF-8"))))
}

unsafe fn order_arg<'a>(p: *const MoOrder, what: &'static str) -> Result<&'a Order, Failure> {
    p.as_ref().map(|o| &o.inner).ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(v);
    Ok(())
}

fn boxed(order: Order) -> *mut MoOrder {
    Box::into_raw(Box::new(MoOrder { inner: order }))
}

fn c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::Lib(Error::usage("string contains NUL")))
}

/// Message of the last failed call on this thread (empty after a success).
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn mo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The standard order on ℤ.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_order_standard(out: *mut *mut MoOrder) -> MoStatus {
    guard(|| put(out, boxed(Order::standard()), "out"))
}

/// Sample an order. `family` is `dirac-standard-Z`, `pair-swap-Z` or `hierarchical`.
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_order_sample(
    group: MoGroup,
    family: *const c_char,
    sampler_seed: u64,
    seed: u64,
    out: *mut *mut MoOrder,
) -> MoStatus {
    guard(|| {
        let family: Family = str_arg(family, "family")?.parse()?;
        let sampler = MultiorderSampler::new(kind(group), family, sampler_seed)?;
        put(out, boxed(Order::Lazy(sampler.sample(seed))), "out")
    })
}

/// Parse an order window file (`k<TAB>element` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_order_parse_window(group: MoGroup, text: *const c_char, out: *mut *mut MoOrder) -> MoStatus {
    guard(|| {
        let w = OrderWindow::parse(kind(group), str_arg(text, "text")?)?;
        put(out, boxed(Order::Window(w)), "out")
    })
}

/// # Safety
/// `order` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mo_order_free(order: *mut MoOrder) {
    if !order.is_null() {
        drop(Box::from_raw(order));
    }
}

/// # Safety
/// `order` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_order_group(order: *const MoOrder, out: *mut MoGroup) -> MoStatus {
    guard(|| put(out, mo_group(order_arg(order, "order")?.group()), "out"))
}

/// `k^≺`.
///
/// # Safety
/// `order` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_order_element_at(order: *const MoOrder, k: i64, out: *mut MoElement) -> MoStatus {
    guard(|| {
        let g = order_arg(order, "order")?.element_at(k)?;
        put(out, from_element(&g), "out")
    })
}

/// The index `k` with `k^≺ = g`.
///
/// # Safety
/// `order` must be a live handle; `g` must be readable; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_order_index_of(order: *const MoOrder, g: *const MoElement, out: *mut i64) -> MoStatus {
    guard(|| {
        let g = to_element(g.as_ref().ok_or(Failure::Null("g"))?)?;
        put(out, order_arg(order, "order")?.index_of(&g)?, "out")
    })
}

/// `g(≺)` as a new handle.
///
/// # Safety
/// `order` must be a live handle; `g` must be readable; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_order_act(order: *const MoOrder, g: *const MoElement, out: *mut *mut MoOrder) -> MoStatus {
    guard(|| {
        let g = to_element(g.as_ref().ok_or(Failure::Null("g"))?)?;
        let acted = order_arg(order, "order")?.act(&g)?;
        put(out, boxed(acted), "out")
    })
}

/// The window `[lo, hi]` in order-file format; free with [`mo_string_free`].
///
/// # Safety
/// `order` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_order_window_text(order: *const MoOrder, lo: i64, hi: i64, out: *mut *mut c_char) -> MoStatus {
    guard(|| {
        let text = order_arg(order, "order")?.window(lo, hi)?.to_text();
        put(out, c_string(text)?, "out")
    })
}

/// Truncated order distance at depth `depth` as an exact `"p/q"` string
/// (error bound `2^-depth`); free with [`mo_string_free`].
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_order_metric(
    a: *const MoOrder,
    b: *const MoOrder,
    depth: u32,
    out: *mut *mut c_char,
) -> MoStatus {
    guard(|| {
        let m = order_metric(order_arg(a, "a")?, order_arg(b, "b")?, depth)?;
        put(out, c_string(m.value.to_ratio_string())?, "out")
    })
}

/// The reindexing identities at `(order, g, i)`.
///
/// # Safety
/// `order` must be a live handle; `g` must be readable; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_reindex_check(order: *const MoOrder, g: *const MoElement, i: i64, out: *mut bool) -> MoStatus {
    guard(|| {
        let g = to_element(g.as_ref().ok_or(Failure::Null("g"))?)?;
        put(out, reindex_check(order_arg(order, "order")?, &g, i)?, "out")
    })
}

/// Parse `"3"`, `"1,-2"` or `"1,0,2"` as an element of `group`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_element_parse(group: MoGroup, text: *const c_char, out: *mut MoElement) -> MoStatus {
    guard(|| {
        let g = kind(group).parse_element(str_arg(text, "text")?)?;
        put(out, from_element(&g), "out")
    })
}

/// Write `a·b` to `out`.
///
/// # Safety
/// `a`, `b` must be readable; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mo_element_mul(a: *const MoElement, b: *const MoElement, out: *mut MoElement) -> MoStatus {
    guard(|| {
        let a = to_element(a.as_ref().ok_or(Failure::Null("a"))?)?;
        let b = to_element(b.as_ref().ok_or(Failure::Null("b"))?)?;
        let p = a.kind().op(&a, &b)?;
        put(out, from_element(&p), "out")
    })
}
