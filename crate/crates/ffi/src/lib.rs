//! C ABI over the exact core: surds, orbit indices, Hopf-link forcing and
//! monodromy counts.
//!
//! Every fallible function returns an [`RfStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be read with [`rf_last_error_message`]. Handles are created by the
//! library and released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use reeb_forcing::open_book::{self, MonodromyMatrix};
use reeb_forcing::star;
use reeb_forcing::{Error, Fraction, OrbitSpec, Surd};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Resonant = 4,
    InvalidInput = 5,
    Hypothesis = 6,
    EmptyInterval = 7,
    Overflow = 8,
    Numerical = 9,
    BufferTooSmall = 10,
    OutOfRange = 11,
    Internal = 12,
}

/// A number `(a + b sqrt(d))/c`.
pub struct RfSurd(Surd);

/// A closed orbit with its rotation data.
pub struct RfOrbit(OrbitSpec);

/// A hyperbolic matrix in `SL(2, Z)`.
pub struct RfMonodromy(MonodromyMatrix);

/// An owned list of classes `(p, q)`.
pub struct RfFractionList(Vec<Fraction>);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RfFraction {
    pub p: i64,
    pub q: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> RfStatus {
    match e {
        Error::Parse { .. } => RfStatus::Parse,
        Error::Resonant(_) => RfStatus::Resonant,
        Error::Hypothesis(_) => RfStatus::Hypothesis,
        Error::EmptyInterval(_) => RfStatus::EmptyInterval,
        Error::Overflow(_) => RfStatus::Overflow,
        Error::Numerical(_) => RfStatus::Numerical,
        _ => RfStatus::InvalidInput,
    }
}

fn fail(status: RfStatus, msg: impl Into<String>) -> RfStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> Result<(), RfStatus>) -> RfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RfStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(RfStatus::Internal, "internal panic"),
    }
}

fn check<T>(r: reeb_forcing::Result<T>) -> Result<T, RfStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, RfStatus> {
    p.as_ref().ok_or_else(|| fail(RfStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), RfStatus> {
    if out.is_null() {
        return Err(fail(RfStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, RfStatus> {
    if s.is_null() {
        return Err(fail(RfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(RfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// Copies `s` with a terminating NUL into `buf` of `len` bytes and stores the
/// full length (without NUL) in `written`. With a short or null buffer only
/// the length is stored and `BufferTooSmall` is returned.
unsafe fn copy_out(s: &str, buf: *mut c_char, len: usize, written: *mut usize) -> Result<(), RfStatus> {
    if !written.is_null() {
        written.write(s.len());
    }
    if buf.is_null() || len < s.len() + 1 {
        return Err(fail(RfStatus::BufferTooSmall, format!("need {} bytes", s.len() + 1)));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    buf.add(s.len()).write(0);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes; `written` must be
/// null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_last_error_message(buf: *mut c_char, len: usize, written: *mut usize) -> RfStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match copy_out(&msg, buf, len, written) {
        Ok(()) => RfStatus::Ok,
        Err(s) => s,
    }
}

/// Parses `(a+b*sqrt(d))/c`, `p/q`, integers and `sqrt(d)`.
///
/// # Safety
/// `input` must be a NUL-terminated string; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_surd_parse(input: *const c_char, out: *mut *mut RfSurd) -> RfStatus {
    guard(|| {
        let s: Surd = check(text(input, "input")?.parse())?;
        write(out, Box::into_raw(Box::new(RfSurd(s))))
    })
}

/// `(a + b sqrt(d))/c`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_surd_new(a: i64, b: i64, c: i64, d: u64, out: *mut *mut RfSurd) -> RfStatus {
    guard(|| {
        let s = check(Surd::new(a, b, c, d))?;
        write(out, Box::into_raw(Box::new(RfSurd(s))))
    })
}

/// # Safety
/// `s` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rf_surd_free(s: *mut RfSurd) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Canonical text form, see [`copy_out`] for the buffer protocol.
///
/// # Safety
/// `s` must be a live handle; `buf`/`written` as for [`rf_last_error_message`].
#[no_mangle]
pub unsafe extern "C" fn rf_surd_to_string(s: *const RfSurd, buf: *mut c_char, len: usize, written: *mut usize) -> RfStatus {
    guard(|| copy_out(&deref(s, "surd")?.0.to_string(), buf, len, written))
}

/// Exact comparison; writes -1, 0 or 1.
///
/// # Safety
/// `a`, `b` must be live handles; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_surd_cmp(a: *const RfSurd, b: *const RfSurd, out: *mut i32) -> RfStatus {
    guard(|| {
        let o = deref(a, "a")?.0.cmp_exact(&deref(b, "b")?.0);
        write(out, o as i32)
    })
}

/// Exact floor.
///
/// # Safety
/// `s` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_surd_floor(s: *const RfSurd, out: *mut i64) -> RfStatus {
    guard(|| {
        let f = deref(s, "surd")?.0.floor();
        let v = i64::try_from(f).map_err(|_| fail(RfStatus::Overflow, "floor does not fit in 64 bits"))?;
        write(out, v)
    })
}

/// # Safety
/// `s` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_surd_to_f64(s: *const RfSurd, out: *mut f64) -> RfStatus {
    guard(|| write(out, deref(s, "surd")?.0.to_f64()))
}

/// Elliptic orbit with rotation number `theta` (copied).
///
/// # Safety
/// `name` must be a NUL-terminated string, `theta` a live handle, `out`
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_orbit_elliptic(name: *const c_char, theta: *const RfSurd, out: *mut *mut RfOrbit) -> RfStatus {
    guard(|| {
        let o = OrbitSpec::elliptic(text(name, "name")?, deref(theta, "theta")?.0.clone());
        check(o.validate())?;
        write(out, Box::into_raw(Box::new(RfOrbit(o))))
    })
}

/// Hyperbolic orbit of index `n`.
///
/// # Safety
/// `name` must be a NUL-terminated string, `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_orbit_hyperbolic(name: *const c_char, n: i64, out: *mut *mut RfOrbit) -> RfStatus {
    guard(|| {
        let o = OrbitSpec::hyperbolic(text(name, "name")?, n);
        write(out, Box::into_raw(Box::new(RfOrbit(o))))
    })
}

/// # Safety
/// `o` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rf_orbit_free(o: *mut RfOrbit) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Conley-Zehnder index of the `k`-fold cover.
///
/// # Safety
/// `o` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_orbit_cz(o: *const RfOrbit, k: u64, out: *mut i64) -> RfStatus {
    guard(|| write(out, check(deref(o, "orbit")?.0.cz(k))?))
}

/// # Safety
/// `o` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_orbit_alpha_minus(o: *const RfOrbit, k: u64, out: *mut i64) -> RfStatus {
    guard(|| write(out, check(deref(o, "orbit")?.0.alpha_minus(k))?))
}

/// # Safety
/// `o` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_orbit_alpha_plus(o: *const RfOrbit, k: u64, out: *mut i64) -> RfStatus {
    guard(|| write(out, check(deref(o, "orbit")?.0.alpha_plus(k))?))
}

/// # Safety
/// `o` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_orbit_parity(o: *const RfOrbit, k: u64, out: *mut u8) -> RfStatus {
    guard(|| write(out, check(deref(o, "orbit")?.0.parity(k))?))
}

/// Classes of closed orbits forced by a Hopf link with rotation numbers
/// `theta1`, `theta2`, sorted by `(p, q)`.
///
/// # Safety
/// `theta1`, `theta2` must be live handles; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_forcing_hopf(
    theta1: *const RfSurd,
    theta2: *const RfSurd,
    max_p: u64,
    out: *mut *mut RfFractionList,
) -> RfStatus {
    guard(|| {
        let orbits = check(star::forcing_hopf(&deref(theta1, "theta1")?.0, &deref(theta2, "theta2")?.0, max_p))?;
        let list = RfFractionList(orbits.into_iter().map(|o| o.cls).collect());
        write(out, Box::into_raw(Box::new(list)))
    })
}

/// Number of entries; 0 for a null list.
///
/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_fraction_list_len(list: *const RfFractionList) -> usize {
    list.as_ref().map_or(0, |l| l.0.len())
}

/// # Safety
/// `list` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_fraction_list_get(list: *const RfFractionList, index: usize, out: *mut RfFraction) -> RfStatus {
    guard(|| {
        let l = deref(list, "list")?;
        let f = l
            .0
            .get(index)
            .ok_or_else(|| fail(RfStatus::OutOfRange, format!("index {index} of {}", l.0.len())))?;
        write(out, RfFraction { p: f.p, q: f.q })
    })
}

/// # Safety
/// `list` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rf_fraction_list_free(list: *mut RfFractionList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Matrix `[[a, b], [c, d]]`; needs determinant 1 and `|a + d| > 2`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_monodromy_new(a: i64, b: i64, c: i64, d: i64, out: *mut *mut RfMonodromy) -> RfStatus {
    guard(|| {
        let m = check(MonodromyMatrix::new(a, b, c, d))?;
        write(out, Box::into_raw(Box::new(RfMonodromy(m))))
    })
}

/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rf_monodromy_free(m: *mut RfMonodromy) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Fixed points of `A^k` on the torus as a decimal string.
///
/// # Safety
/// `m` must be a live handle; `buf`/`written` as for [`rf_last_error_message`].
#[no_mangle]
pub unsafe extern "C" fn rf_monodromy_count(m: *const RfMonodromy, k: u64, buf: *mut c_char, len: usize, written: *mut usize) -> RfStatus {
    guard(|| {
        let n = check(open_book::periodic_point_count(&deref(m, "matrix")?.0, k))?;
        copy_out(&n.to_string(), buf, len, written)
    })
}

/// As [`rf_monodromy_count`], failing with `Overflow` above `u64::MAX`.
///
/// # Safety
/// `m` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rf_monodromy_count_u64(m: *const RfMonodromy, k: u64, out: *mut u64) -> RfStatus {
    guard(|| {
        let n = check(open_book::periodic_point_count(&deref(m, "matrix")?.0, k))?;
        let v = u64::try_from(n).map_err(|_| fail(RfStatus::Overflow, "count does not fit in 64 bits"))?;
        write(out, v)
    })
}
