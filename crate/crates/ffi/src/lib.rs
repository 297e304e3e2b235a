//! C interface to helixlab.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns an [`HlStatus`]
//! and, on failure, leaves a message for [`hl_last_error`] on the calling
//! thread. Numbers cross the boundary as decimal strings so no precision is
//! lost. String outputs go into caller buffers: the call reports the length
//! it needs (without the NUL) and fails with `HL_STATUS_BUFFER_TOO_SMALL`
//! when `cap` is not larger than that.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use helixlab::engine::{tm_letter, System, Trajectory, WindowPolicy};
use helixlab::helix::{detect_stable_helix, verify_helix};
use helixlab::mapexpr::{parse_lsystem, MapSpec};
use helixlab::numerics::{Precision, Real};
use helixlab::scan::{classify, ClassifyConfig, Tag};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    /// The computation stopped (pole, overflow, domain error).
    Eval = 5,
    NotFound = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HlClass {
    Helix = 0,
    PseudoHelix = 1,
    Chaotic = 2,
    Unclassified = 3,
}

/// A map or an L-system.
pub struct HlSystem(System);

/// A computed trajectory with its retained tail.
pub struct HlTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: HlStatus, msg: impl std::fmt::Display) -> HlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.to_string());
    status
}

fn guard(f: impl FnOnce() -> Result<(), HlStatus>) -> HlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(HlStatus::Panic, "internal panic"),
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, HlStatus> {
    if p.is_null() {
        return Err(fail(HlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(HlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn precision(digits: u32) -> Result<Precision, HlStatus> {
    Precision::new(digits).map_err(|e| fail(HlStatus::InvalidArgument, e))
}

fn real(s: &str, d: Precision, what: &str) -> Result<Real, HlStatus> {
    Real::parse(s.trim(), d).map_err(|e| fail(HlStatus::Parse, format!("{what}: {e}")))
}

/// "b=0.8,k=2" into a parameter map; empty or null means none.
unsafe fn params(p: *const c_char, d: Precision) -> Result<BTreeMap<String, Real>, HlStatus> {
    let mut out = BTreeMap::new();
    if p.is_null() {
        return Ok(out);
    }
    for kv in text(p, "params")?.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| fail(HlStatus::Parse, format!("parameter '{kv}' is not NAME=VALUE")))?;
        out.insert(k.trim().to_string(), real(v, d, k.trim())?);
    }
    Ok(out)
}

unsafe fn write_str(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Result<(), HlStatus> {
    if !needed.is_null() {
        *needed = s.len();
    }
    if buf.is_null() || cap <= s.len() {
        return Err(fail(HlStatus::BufferTooSmall, format!("need {} bytes", s.len() + 1)));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), HlStatus> {
    if out.is_null() {
        return Err(fail(HlStatus::NullPointer, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, HlStatus> {
    p.as_ref().ok_or_else(|| fail(HlStatus::NullPointer, format!("{what} is null")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf`.
///
/// # Safety
/// `buf` must point to `cap` writable bytes (or be null with `cap` 0);
/// `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn hl_last_error(buf: *mut c_char, cap: usize, needed: *mut usize) -> HlStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match write_str(&msg, buf, cap, needed) {
        Ok(()) => HlStatus::Ok,
        Err(s) => s,
    }
}

/// Looks up a built-in map or L-system (`sine-drift`, `identity`,
/// `lfam-gamma-cos`, `lfam-gamma-sin`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_system_builtin(name: *const c_char, out: *mut *mut HlSystem) -> HlStatus {
    guard(|| {
        let name = text(name, "name")?;
        let sys = System::builtin(name).map_err(|e| fail(HlStatus::NotFound, e))?;
        put(out, HlSystem(sys))
    })
}

/// Parses a map expression in `x` and named parameters.
///
/// # Safety
/// `expr` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_system_parse_map(expr: *const c_char, out: *mut *mut HlSystem) -> HlStatus {
    guard(|| {
        let spec = MapSpec::parse("map", text(expr, "expr")?).map_err(|e| fail(HlStatus::Parse, e))?;
        put(out, HlSystem(System::Map(spec)))
    })
}

/// Parses an L-system definition (axiom, rules, one map per letter).
///
/// # Safety
/// `def` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_system_parse_lsystem(def: *const c_char, out: *mut *mut HlSystem) -> HlStatus {
    guard(|| {
        let spec = parse_lsystem(text(def, "definition")?).map_err(|e| fail(HlStatus::Parse, e))?;
        put(out, HlSystem(System::LSystem(spec)))
    })
}

/// # Safety
/// `sys` must come from an `hl_system_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn hl_system_free(sys: *mut HlSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Computes terms 1..=n (maps) or 0..=n (L-systems) from start value `a`,
/// keeping the last `tail` terms. A run that stops early still returns a
/// trajectory; check [`hl_trajectory_failure`].
///
/// # Safety
/// `sys` must be a live handle; `a` and `params` NUL-terminated (`params`
/// may be null); `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_run(
    sys: *const HlSystem,
    a: *const c_char,
    params_text: *const c_char,
    n: u64,
    digits: u32,
    tail: u64,
    out: *mut *mut HlTrajectory,
) -> HlStatus {
    guard(|| {
        let sys = borrow(sys, "system")?;
        let d = precision(digits)?;
        let a = real(text(a, "a")?, d, "a")?;
        let p = params(params_text, d)?;
        let t = sys.0.run(&a, &p, n, d, WindowPolicy::tail(tail)).map_err(|e| fail(HlStatus::InvalidArgument, e))?;
        put(out, HlTrajectory(t))
    })
}

/// # Safety
/// `traj` must come from [`hl_run`], or be null.
#[no_mangle]
pub unsafe extern "C" fn hl_trajectory_free(traj: *mut HlTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Index of the last computed term.
///
/// # Safety
/// `traj` must be a live handle; `index` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_trajectory_last_index(traj: *const HlTrajectory, index: *mut u64) -> HlStatus {
    guard(|| {
        let t = borrow(traj, "trajectory")?;
        *index.as_mut().ok_or_else(|| fail(HlStatus::NullPointer, "index is null"))? = t.0.last_index();
        Ok(())
    })
}

/// `HL_STATUS_OK` if the run completed; otherwise `HL_STATUS_EVAL` with the
/// index of the term that could not be computed.
///
/// # Safety
/// `traj` must be a live handle; `index` may be null.
#[no_mangle]
pub unsafe extern "C" fn hl_trajectory_failure(traj: *const HlTrajectory, index: *mut u64) -> HlStatus {
    guard(|| {
        let t = borrow(traj, "trajectory")?;
        match t.0.failure() {
            None => Ok(()),
            Some(f) => {
                if let Some(i) = index.as_mut() {
                    *i = f.index;
                }
                Err(fail(HlStatus::Eval, format!("term {}: {}", f.index, f.error)))
            }
        }
    })
}

/// Decimal string of term `index`, if it was retained.
///
/// # Safety
/// `traj` must be a live handle; `buf` must hold `cap` bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn hl_trajectory_value(
    traj: *const HlTrajectory,
    index: u64,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> HlStatus {
    guard(|| {
        let t = borrow(traj, "trajectory")?;
        let v = t.0.value_at(index).ok_or_else(|| fail(HlStatus::NotFound, format!("term {index} not retained")))?;
        write_str(&v.to_string(), buf, cap, needed)
    })
}

/// Smallest period j ≤ j_max with a constant per-period increment c over the
/// retained tail past `transient`. `HL_STATUS_NOT_FOUND` when none exists.
///
/// # Safety
/// `traj` must be a live handle; `j` writable; `c_buf` holds `cap` bytes;
/// `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn hl_detect_helix(
    traj: *const HlTrajectory,
    j_max: usize,
    tol: f64,
    transient: u64,
    j: *mut usize,
    c_buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> HlStatus {
    guard(|| {
        let t = borrow(traj, "trajectory")?;
        let j = j.as_mut().ok_or_else(|| fail(HlStatus::NullPointer, "j is null"))?;
        let found = detect_stable_helix(&t.0, j_max, tol, transient).map_err(|e| fail(HlStatus::InvalidArgument, e))?;
        let h = found.ok_or_else(|| fail(HlStatus::NotFound, "no helix with period up to j_max"))?;
        *j = h.j;
        write_str(&h.c.to_string(), c_buf, cap, needed)
    })
}

/// Whether `seq` (comma-separated decimals) is a helix of period `j`
/// modulo `r`.
///
/// # Safety
/// `seq` and `r` must be NUL-terminated; `result` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_verify_helix(
    seq: *const c_char,
    j: usize,
    r: *const c_char,
    digits: u32,
    result: *mut bool,
) -> HlStatus {
    guard(|| {
        let d = precision(digits)?;
        let values = text(seq, "seq")?
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| real(s, d, "seq"))
            .collect::<Result<Vec<_>, _>>()?;
        let r = real(text(r, "r")?, d, "r")?;
        let ok = verify_helix(&values, j, &r).map_err(|e| fail(HlStatus::InvalidArgument, e))?;
        *result.as_mut().ok_or_else(|| fail(HlStatus::NullPointer, "result is null"))? = ok;
        Ok(())
    })
}

/// Classifies the map at parameter `b` with the default configuration.
/// `period` is set for helix and pseudo-helix classes, 0 otherwise.
///
/// # Safety
/// `sys` must be a live map handle; `b` NUL-terminated; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn hl_classify(
    sys: *const HlSystem,
    b: *const c_char,
    class: *mut HlClass,
    period: *mut usize,
) -> HlStatus {
    guard(|| {
        let map = match &borrow(sys, "system")?.0 {
            System::Map(m) => m,
            System::LSystem(_) => return Err(fail(HlStatus::InvalidArgument, "classification needs a map")),
        };
        let cfg = ClassifyConfig::default();
        let b = real(text(b, "b")?, precision(cfg.digits)?, "b")?;
        let c = classify(map, &b, &cfg).map_err(|e| fail(HlStatus::Eval, e))?;
        let (k, p) = match c.tag {
            Tag::Helix { j, .. } => (HlClass::Helix, j),
            Tag::PseudoHelix { j, .. } => (HlClass::PseudoHelix, j),
            Tag::Chaotic => (HlClass::Chaotic, 0),
            Tag::Unclassified => (HlClass::Unclassified, 0),
        };
        *class.as_mut().ok_or_else(|| fail(HlStatus::NullPointer, "class is null"))? = k;
        if let Some(p_out) = period.as_mut() {
            *p_out = p;
        }
        Ok(())
    })
}

/// Letter n of the Thue-Morse word, counting from 1, as 'A' or 'B';
/// 0 for n = 0.
#[no_mangle]
pub extern "C" fn hl_tm_letter(n: u64) -> c_char {
    if n == 0 {
        return 0;
    }
    tm_letter(n) as u8 as c_char
}
