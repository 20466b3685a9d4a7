//! C ABI for zkmc.
//!
//! Every object crossing the boundary is an opaque handle created by a
//! `*_parse` or producer function and released with the matching `*_free`.
//! Functions return a [`ZkmcStatus`]; on anything other than `ZKMC_STATUS_OK`
//! a description is available from [`zkmc_last_error`] on the same thread.
//! Byte outputs come back as a [`ZkmcBuffer`] owned by the caller.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use zkmc::explicit::plaintext_disjointness;
use zkmc::kzg::Srs;
use zkmc::lang::{self, graph_from_json, Unit};
use zkmc::lp;
use zkmc::model::{check_ranking_explicit, check_wellformedness, ExplicitRanking, ExplicitSystem, PiecewiseRanking, Ranking};
use zkmc::protocol::explicit::{self as pe, ExplicitBundle, ExplicitCertificate};
use zkmc::protocol::symbolic::{self as ps, SymbolicBundle, SymbolicCertificate};
use zkmc::sigma::Params;
use zkmc::symbolic::{gen_obligations, undischarged};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZkmcStatus {
    /// Success, a valid certificate or an accepted proof.
    Ok = 0,
    /// The certificate is invalid or the proof was rejected.
    Invalid = 1,
    /// Malformed certificate text or graph JSON.
    Parse = 2,
    NullPointer = 3,
    /// The arguments do not fit together, e.g. a table ranking given to the symbolic scheme.
    InvalidArgument = 4,
    /// Parameter or bundle bytes could not be decoded.
    Decode = 5,
    /// An internal failure; the library caught a panic.
    Internal = 6,
}

/// A parsed `.zkgc` unit.
pub struct ZkmcUnit(Unit);

/// An explicit graph or its labels-only state space.
pub struct ZkmcGraph(ExplicitSystem);

/// Owned bytes returned to the caller.
pub struct ZkmcBuffer(Vec<u8>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fault(ZkmcStatus, String);

fn fault(status: ZkmcStatus, message: impl ToString) -> Fault {
    Fault(status, message.to_string())
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fault>) -> ZkmcStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ZkmcStatus::Ok,
        Ok(Err(Fault(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal error");
            ZkmcStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fault> {
    p.as_ref().ok_or_else(|| fault(ZkmcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fault> {
    if p.is_null() {
        return Err(fault(ZkmcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fault(ZkmcStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn bytes<'a>(p: *const u8, len: usize, what: &str) -> Result<&'a [u8], Fault> {
    if p.is_null() {
        return Err(fault(ZkmcStatus::NullPointer, format!("{what} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Fault> {
    if out.is_null() {
        return Err(fault(ZkmcStatus::NullPointer, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn table(unit: &Unit) -> Result<&ExplicitRanking, Fault> {
    match &unit.ranking {
        Ranking::Table(t) => Ok(t),
        Ranking::Piecewise(_) => Err(fault(ZkmcStatus::InvalidArgument, "expected a table ranking")),
    }
}

fn piecewise(unit: &Unit) -> Result<&PiecewiseRanking, Fault> {
    match &unit.ranking {
        Ranking::Piecewise(p) => Ok(p),
        Ranking::Table(_) => Err(fault(ZkmcStatus::InvalidArgument, "expected a piecewise ranking")),
    }
}

fn symbolic_cert(unit: &Unit, bound: u64) -> Result<SymbolicCertificate, Fault> {
    let sys = unit.system.as_ref().ok_or_else(|| fault(ZkmcStatus::InvalidArgument, "the unit has no system"))?;
    Ok(SymbolicCertificate::new(unit.spec.clone(), piecewise(unit)?.clone(), sys, bound))
}

/// Message for the last failing call on this thread; empty after a success.
///
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn zkmc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a NUL-terminated `.zkgc` unit with coefficient bound `bound`.
///
/// # Safety
/// `source` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn zkmc_unit_parse(source: *const c_char, bound: u64, out: *mut *mut ZkmcUnit) -> ZkmcStatus {
    guard(|| {
        let src = text(source, "source")?;
        let (unit, _) = lang::parse_with_bound(src, bound).map_err(|diags| {
            fault(ZkmcStatus::Parse, diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))
        })?;
        emit(out, ZkmcUnit(unit))
    })
}

/// # Safety
/// `unit` must come from [`zkmc_unit_parse`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn zkmc_unit_free(unit: *mut ZkmcUnit) {
    if !unit.is_null() {
        drop(Box::from_raw(unit));
    }
}

/// Parses a graph or state-space JSON document.
///
/// # Safety
/// `json` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn zkmc_graph_parse(json: *const c_char, out: *mut *mut ZkmcGraph) -> ZkmcStatus {
    guard(|| {
        let sys = graph_from_json(text(json, "json")?).map_err(|e| fault(ZkmcStatus::Parse, e))?;
        emit(out, ZkmcGraph(sys))
    })
}

/// # Safety
/// `graph` must come from [`zkmc_graph_parse`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn zkmc_graph_free(graph: *mut ZkmcGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `buffer` must be a live buffer handle.
#[no_mangle]
pub unsafe extern "C" fn zkmc_buffer_data(buffer: *const ZkmcBuffer) -> *const u8 {
    buffer.as_ref().map_or(ptr::null(), |b| b.0.as_ptr())
}

/// # Safety
/// `buffer` must be a live buffer handle.
#[no_mangle]
pub unsafe extern "C" fn zkmc_buffer_len(buffer: *const ZkmcBuffer) -> usize {
    buffer.as_ref().map_or(0, |b| b.0.len())
}

/// # Safety
/// `buffer` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn zkmc_buffer_free(buffer: *mut ZkmcBuffer) {
    if !buffer.is_null() {
        drop(Box::from_raw(buffer));
    }
}

/// Checks a certificate in plaintext. A table ranking needs `graph`; a
/// piecewise ranking is checked against the unit's own system and `graph` may be null.
///
/// Returns `ZKMC_STATUS_OK` when valid and `ZKMC_STATUS_INVALID` otherwise.
///
/// # Safety
/// `unit` must be live; `graph` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn zkmc_check(unit: *const ZkmcUnit, graph: *const ZkmcGraph, bound: u64) -> ZkmcStatus {
    guard(|| {
        let unit = &deref(unit, "unit")?.0;
        match &unit.ranking {
            Ranking::Table(rank) => {
                let sys = &deref(graph, "graph")?.0;
                let report = check_ranking_explicit(sys, &unit.spec, rank).map_err(|e| fault(ZkmcStatus::InvalidArgument, e))?;
                if let Some(v) = report.violations.first() {
                    return Err(fault(ZkmcStatus::Invalid, v));
                }
                let cert = ExplicitCertificate::new(unit.spec.clone(), rank.clone(), sys);
                let (_, batches) = cert.batches().map_err(|e| fault(ZkmcStatus::InvalidArgument, e))?;
                if !plaintext_disjointness(sys, &batches) {
                    return Err(fault(ZkmcStatus::Invalid, "batches intersect the transition relation"));
                }
                Ok(())
            }
            Ranking::Piecewise(rk) => {
                let wf = check_wellformedness(rk, &unit.spec);
                if let Some(issue) = wf.issues.first() {
                    return Err(fault(ZkmcStatus::Invalid, issue));
                }
                let sys = unit.system.as_ref().ok_or_else(|| fault(ZkmcStatus::InvalidArgument, "the unit has no system"))?;
                let set = gen_obligations(sys, &unit.spec, rk).map_err(|e| fault(ZkmcStatus::InvalidArgument, e))?;
                if let Some((i, _)) = undischarged(&set).first() {
                    return Err(fault(ZkmcStatus::Invalid, format!("obligation {i} is satisfiable")));
                }
                lp::witnesses(&set.obligations, bound)
                    .map(drop)
                    .map_err(|(i, e)| fault(ZkmcStatus::Invalid, format!("obligation {i}: {e}")))
            }
        }
    })
}

/// Generates KZG parameters sized for a table certificate over `space`.
///
/// # Safety
/// `unit` and `space` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zkmc_explicit_setup(unit: *const ZkmcUnit, space: *const ZkmcGraph, out: *mut *mut ZkmcBuffer) -> ZkmcStatus {
    guard(|| {
        let unit = &deref(unit, "unit")?.0;
        let cert = ExplicitCertificate::new(unit.spec.clone(), table(unit)?.clone(), &deref(space, "space")?.0);
        let (deg, batch) = cert.srs_size().map_err(|e| fault(ZkmcStatus::InvalidArgument, e))?;
        let srs = Srs::setup(deg, batch, false, &mut rand::thread_rng());
        emit(out, ZkmcBuffer(srs.to_bytes()))
    })
}

/// Proves that `graph` satisfies the table certificate in `unit`.
///
/// # Safety
/// Handles must be live, `params` must point to `params_len` bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zkmc_explicit_prove(
    unit: *const ZkmcUnit,
    graph: *const ZkmcGraph,
    params: *const u8,
    params_len: usize,
    out: *mut *mut ZkmcBuffer,
) -> ZkmcStatus {
    guard(|| {
        let unit = &deref(unit, "unit")?.0;
        let sys = &deref(graph, "graph")?.0;
        let srs = Srs::from_bytes(bytes(params, params_len, "params")?, false).map_err(|e| fault(ZkmcStatus::Decode, e))?;
        let cert = ExplicitCertificate::new(unit.spec.clone(), table(unit)?.clone(), sys);
        let bundle = pe::prove(sys, &cert, &srs, &mut rand::thread_rng()).map_err(|e| fault(ZkmcStatus::Invalid, e))?;
        emit(out, ZkmcBuffer(bundle.to_bytes()))
    })
}

/// Verifies an explicit bundle against the public certificate and state space.
///
/// # Safety
/// Handles must be live and the byte pointers must cover their lengths.
#[no_mangle]
pub unsafe extern "C" fn zkmc_explicit_verify(
    unit: *const ZkmcUnit,
    space: *const ZkmcGraph,
    params: *const u8,
    params_len: usize,
    bundle: *const u8,
    bundle_len: usize,
) -> ZkmcStatus {
    guard(|| {
        let unit = &deref(unit, "unit")?.0;
        let srs = Srs::from_bytes(bytes(params, params_len, "params")?, false).map_err(|e| fault(ZkmcStatus::Decode, e))?;
        let cert = ExplicitCertificate::new(unit.spec.clone(), table(unit)?.clone(), &deref(space, "space")?.0);
        let bundle = ExplicitBundle::from_bytes(bytes(bundle, bundle_len, "bundle")?).map_err(|e| fault(ZkmcStatus::Invalid, e))?;
        pe::verify(&bundle, &cert, &srs).map_err(|r| fault(ZkmcStatus::Invalid, r))
    })
}

/// Generates Pedersen parameters sized for a piecewise certificate and its system.
///
/// # Safety
/// `unit` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zkmc_symbolic_setup(unit: *const ZkmcUnit, bound: u64, out: *mut *mut ZkmcBuffer) -> ZkmcStatus {
    guard(|| {
        let cert = symbolic_cert(&deref(unit, "unit")?.0, bound)?;
        let len = cert.params_len().map_err(|e| fault(ZkmcStatus::InvalidArgument, e))?;
        emit(out, ZkmcBuffer(Params::setup(len, false, &mut rand::thread_rng()).to_bytes()))
    })
}

/// Proves every obligation of the unit's piecewise certificate over its system.
///
/// # Safety
/// `unit` must be live, `params` must cover `params_len` bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zkmc_symbolic_prove(
    unit: *const ZkmcUnit,
    bound: u64,
    params: *const u8,
    params_len: usize,
    batch: usize,
    out: *mut *mut ZkmcBuffer,
) -> ZkmcStatus {
    guard(|| {
        let unit = &deref(unit, "unit")?.0;
        let cert = symbolic_cert(unit, bound)?;
        let sys = unit.system.as_ref().expect("checked by symbolic_cert");
        let set = gen_obligations(sys, &unit.spec, piecewise(unit)?).map_err(|e| fault(ZkmcStatus::InvalidArgument, e))?;
        let wits = lp::witnesses(&set.obligations, bound).map_err(|(i, e)| fault(ZkmcStatus::Invalid, format!("obligation {i}: {e}")))?;
        let p = Params::from_bytes(bytes(params, params_len, "params")?, false).map_err(|e| fault(ZkmcStatus::Decode, e))?;
        let bundle = ps::prove_all(&p, &cert, sys, &wits, batch.max(1), &mut rand::thread_rng())
            .map_err(|e| fault(ZkmcStatus::Invalid, e))?;
        emit(out, ZkmcBuffer(bundle.to_bytes()))
    })
}

/// Verifies a symbolic bundle from the public certificate alone; the unit's system, if any, is ignored.
///
/// # Safety
/// `unit` must be live and the byte pointers must cover their lengths.
#[no_mangle]
pub unsafe extern "C" fn zkmc_symbolic_verify(
    unit: *const ZkmcUnit,
    bound: u64,
    params: *const u8,
    params_len: usize,
    bundle: *const u8,
    bundle_len: usize,
    batch: usize,
) -> ZkmcStatus {
    guard(|| {
        let unit = &deref(unit, "unit")?.0;
        let p = Params::from_bytes(bytes(params, params_len, "params")?, false).map_err(|e| fault(ZkmcStatus::Decode, e))?;
        let bundle = SymbolicBundle::from_bytes(bytes(bundle, bundle_len, "bundle")?).map_err(|e| fault(ZkmcStatus::Invalid, e))?;
        let cert = SymbolicCertificate::from_public(unit.spec.clone(), piecewise(unit)?.clone(), bundle.secret_rows.clone(), bound);
        ps::verify_all(&p, &cert, &bundle, batch.max(1)).map_err(|f| match f.failures.first() {
            Some((i, r)) if *i != usize::MAX => fault(ZkmcStatus::Invalid, format!("obligation {i}: {r}")),
            Some((_, r)) => fault(ZkmcStatus::Invalid, r),
            None => fault(ZkmcStatus::Invalid, "rejected"),
        })
    })
}
