//! C ABI for `bpcentre`.
//!
//! Objects cross the boundary as opaque handles (`BpEtaTable`, `BpLattice`)
//! created by `*_build`/`*_load`/`bp_*_window` calls and released with the
//! matching `*_free`. Every fallible call returns a [`BpStatus`]; the message
//! for the last failure on the calling thread is available from
//! [`bp_last_error_message`]. Panics never unwind into C.
//!
//! Exponent sequences are passed as `(const uint32_t *exps, size_t len)` with
//! `exps[i]` the exponent of `v_{i+1}`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use bpcentre::centre::{centre_commutant, diagonal_window_lattice};
use bpcentre::ktheory::{sg_window, SgCaps};
use bpcentre::ops::elementary_realize;
use bpcentre::{DvrLattice, EtaRTable, Error, ExponentSeq, Prime};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    NullArgument = 1,
    NotOddPrime = 2,
    /// Bad weight, height, exponent sequence or configuration.
    InvalidArgument = 3,
    /// A computed object failed an exact consistency check.
    Inconsistent = 4,
    NotStabilized = 5,
    Io = 6,
    /// Cache file malformed or built for different parameters.
    Cache = 7,
    /// Output buffer too small; the required length was still written.
    BufferTooSmall = 8,
    Panic = 9,
}

/// η_R table handle.
pub struct BpEtaTable {
    inner: EtaRTable,
}

/// `Z_(p)`-lattice handle.
pub struct BpLattice {
    inner: DvrLattice,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> BpStatus {
    match e {
        Error::NotOddPrime(_) => BpStatus::NotOddPrime,
        Error::Inconsistent(_) | Error::NonIntegral { .. } => BpStatus::Inconsistent,
        Error::NotStabilized(_) => BpStatus::NotStabilized,
        Error::Io(_) => BpStatus::Io,
        Error::CacheMismatch(_) | Error::MalformedCache(_) | Error::Json(_) => BpStatus::Cache,
        _ => BpStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and caught panics.
fn guard(f: impl FnOnce() -> Result<(), (BpStatus, String)>) -> BpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            BpStatus::Panic
        }
    }
}

fn lib<T>(r: bpcentre::Result<T>) -> Result<T, (BpStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (BpStatus, String) {
    (BpStatus::NullArgument, format!("{what} is null"))
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, (BpStatus, String)> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (BpStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, (BpStatus, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| (BpStatus::NullArgument, "path is not valid UTF-8".into()))
}

unsafe fn seq_arg(exps: *const u32, len: usize) -> Result<ExponentSeq, (BpStatus, String)> {
    if len == 0 {
        return Ok(ExponentSeq::empty());
    }
    if exps.is_null() {
        return Err(null("exponent array"));
    }
    Ok(ExponentSeq::new(std::slice::from_raw_parts(exps, len).to_vec()))
}

unsafe fn write_u32s(values: &[u32], buf: *mut u32, cap: usize, out_len: *mut usize) -> Result<(), (BpStatus, String)> {
    write(out_len, values.len(), "out_len")?;
    if cap < values.len() {
        return Err((BpStatus::BufferTooSmall, format!("buffer holds {cap}, need {}", values.len())));
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(null("buffer"));
        }
        std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn bp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the η_R table for `p` up to weight `max_weight`.
#[no_mangle]
pub unsafe extern "C" fn bp_eta_table_build(p: u32, max_weight: u64, out: *mut *mut BpEtaTable) -> BpStatus {
    guard(|| {
        let prime = lib(Prime::new(p))?;
        let inner = lib(EtaRTable::build(prime, max_weight))?;
        write(out, Box::into_raw(Box::new(BpEtaTable { inner })), "out")
    })
}

/// Loads and validates a cached table.
#[no_mangle]
pub unsafe extern "C" fn bp_eta_table_load(path: *const c_char, out: *mut *mut BpEtaTable) -> BpStatus {
    guard(|| {
        let inner = lib(EtaRTable::load(&path_arg(path)?))?;
        write(out, Box::into_raw(Box::new(BpEtaTable { inner })), "out")
    })
}

/// Writes the canonical cache document for `table` to `path`.
#[no_mangle]
pub unsafe extern "C" fn bp_eta_table_save(table: *const BpEtaTable, path: *const c_char) -> BpStatus {
    guard(|| {
        let t = deref(table, "table")?;
        lib(t.inner.save(&path_arg(path)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bp_eta_table_free(table: *mut BpEtaTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

#[no_mangle]
pub unsafe extern "C" fn bp_eta_table_max_weight(table: *const BpEtaTable, out: *mut u64) -> BpStatus {
    guard(|| write(out, deref(table, "table")?.inner.max_weight(), "out"))
}

/// `η_R(v^γ)` rendered as text, e.g. `"v_1 + 3·t_1"`. Free with
/// [`bp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bp_eta_r_string(
    table: *const BpEtaTable,
    gamma: *const u32,
    len: usize,
    out: *mut *mut c_char,
) -> BpStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let g = seq_arg(gamma, len)?;
        let s = lib(t.inner.eta_r_v(&g))?.to_string();
        let c = CString::new(s).map_err(|e| (BpStatus::Inconsistent, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

/// Realizes `μ̄ E_{α,β}` and reports `log_p μ̄`.
#[no_mangle]
pub unsafe extern "C" fn bp_realize(
    table: *const BpEtaTable,
    alpha: *const u32,
    alpha_len: usize,
    beta: *const u32,
    beta_len: usize,
    out_mu_bar_valuation: *mut u32,
) -> BpStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let a = seq_arg(alpha, alpha_len)?;
        let b = seq_arg(beta, beta_len)?;
        let real = lib(elementary_realize(&a, &b, &t.inner))?;
        write(out_mu_bar_valuation, real.mu_bar_valuation(t.inner.prime()), "out_mu_bar_valuation")
    })
}

/// Rank of the commutant of the projected elementary family in weight `r`
/// at height `n`, and whether it consists of scalar matrices.
#[no_mangle]
pub unsafe extern "C" fn bp_centre_rank(
    table: *const BpEtaTable,
    r: u64,
    n: u32,
    out_rank: *mut usize,
    out_is_scalar: *mut bool,
) -> BpStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let c = lib(centre_commutant(r, n, &t.inner))?;
        write(out_rank, c.rank(), "out_rank")?;
        write(out_is_scalar, c.is_scalar(), "out_is_scalar")
    })
}

/// Window `(μ_0, …, μ_N)` of `S_g` with default generator caps.
#[no_mangle]
pub unsafe extern "C" fn bp_sg_window(p: u32, big_n: u64, out: *mut *mut BpLattice) -> BpStatus {
    guard(|| {
        let prime = lib(Prime::new(p))?;
        let w = lib(sg_window(big_n, prime, SgCaps::defaults(prime, big_n)))?;
        write(out, Box::into_raw(Box::new(BpLattice { inner: w.lattice })), "out")
    })
}

/// Windows realized by operations that are scalar on `BP⟨n⟩_*` in weights `≤ N`.
#[no_mangle]
pub unsafe extern "C" fn bp_diagonal_lattice(
    table: *const BpEtaTable,
    big_n: u64,
    n: u32,
    out: *mut *mut BpLattice,
) -> BpStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let inner = lib(diagonal_window_lattice(big_n, n, &t.inner))?;
        write(out, Box::into_raw(Box::new(BpLattice { inner })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn bp_lattice_free(lattice: *mut BpLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

#[no_mangle]
pub unsafe extern "C" fn bp_lattice_rank(lattice: *const BpLattice, out_rank: *mut usize, out_ambient: *mut usize) -> BpStatus {
    guard(|| {
        let l = deref(lattice, "lattice")?;
        write(out_rank, l.inner.rank(), "out_rank")?;
        write(out_ambient, l.inner.ambient_rank(), "out_ambient")
    })
}

/// Exponents of the echelon pivots `p^e`. `*out_len` always receives the
/// required length.
#[no_mangle]
pub unsafe extern "C" fn bp_lattice_pivot_exponents(
    lattice: *const BpLattice,
    buf: *mut u32,
    cap: usize,
    out_len: *mut usize,
) -> BpStatus {
    guard(|| {
        let l = deref(lattice, "lattice")?;
        let e: Vec<u32> = l.inner.pivots().iter().map(|p| p.exponent).collect();
        write_u32s(&e, buf, cap, out_len)
    })
}

/// Smith invariants as ascending `p`-exponents.
#[no_mangle]
pub unsafe extern "C" fn bp_lattice_elementary_divisors(
    lattice: *const BpLattice,
    buf: *mut u32,
    cap: usize,
    out_len: *mut usize,
) -> BpStatus {
    guard(|| {
        let l = deref(lattice, "lattice")?;
        write_u32s(&l.inner.elementary_divisors(), buf, cap, out_len)
    })
}

/// Whether `inner ⊆ outer`.
#[no_mangle]
pub unsafe extern "C" fn bp_lattice_is_sublattice(
    inner: *const BpLattice,
    outer: *const BpLattice,
    out: *mut bool,
) -> BpStatus {
    guard(|| {
        let a = deref(inner, "inner")?;
        let b = deref(outer, "outer")?;
        if a.inner.ambient_rank() != b.inner.ambient_rank() || a.inner.prime() != b.inner.prime() {
            return Err((BpStatus::InvalidArgument, "lattices live in different ambient modules".into()));
        }
        write(out, a.inner.is_sublattice_of(&b.inner), "out")
    })
}
