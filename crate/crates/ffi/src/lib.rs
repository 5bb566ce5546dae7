//! C interface to `univcat`.
//!
//! Inputs and outputs are JSON strings in the same formats the command-line
//! tool reads and prints. Every call returns a [`UcStatus`]; on anything other
//! than `UC_STATUS_OK` a description is available from
//! [`uc_last_error_message`] on the same thread. Strings handed out through an
//! `out` pointer belong to the caller and are released with [`uc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::{json, Value};
use univcat::criterion::{full_criterion, TargetDoc, TestMapsDoc, Verdict};
use univcat::diagram::{ChainDoc, Diagram, Representation, RepresentationDoc, SubdiagramChain};
use univcat::graph::{les_check, GraphDoc};
use univcat::linalg::json::{vector_to_json, MatrixLiteral};
use univcat::linalg::{smith_normal_form, Int, Rat, Ring, RingKind};
use univcat::universal::Universe;
use univcat::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    Ring = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcRing {
    /// Whatever the input declares.
    Declared = 0,
    Z = 1,
    Q = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcVerdict {
    Pass = 0,
    Fail = 1,
    Inconclusive = 2,
}

enum AnyUniverse {
    Z(Universe<Int>),
    Q(Universe<Rat>),
}

/// A representation together with its cache of commutants.
pub struct UcRepresentation {
    universe: AnyUniverse,
}

struct Failure(UcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => UcStatus::Parse,
            Error::Ring(_) => UcStatus::Ring,
            Error::Internal(_) => UcStatus::Internal,
            _ => UcStatus::Invalid,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(UcStatus::Parse, format!("parse error: {e}"))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UcStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {message}"));
            UcStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(UcStatus::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(UcStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_json<T: serde::de::DeserializeOwned>(p: *const c_char, what: &str) -> Result<T, Failure> {
    let s = read_str(p, what)?;
    serde_json::from_str(s).map_err(|e| Failure(UcStatus::Parse, format!("{what}: {e}")))
}

fn check_out<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(UcStatus::NullArgument, "out is NULL".into()))
    } else {
        Ok(())
    }
}

unsafe fn write_string(out: *mut *mut c_char, v: &Value) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v)?;
    let c = CString::new(s).map_err(|_| Failure(UcStatus::Internal, "nul in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn rep_ref<'a>(rep: *const UcRepresentation) -> Result<&'a UcRepresentation, Failure> {
    rep.as_ref()
        .ok_or_else(|| Failure(UcStatus::NullArgument, "representation is NULL".into()))
}

fn select_stage(d: &Diagram, stage: Option<&str>) -> Result<Diagram, Failure> {
    match stage {
        None | Some("all") => Ok(d.clone()),
        Some(s) => {
            let names: Vec<&str> = s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
            Ok(d.full_subdiagram(&names)?)
        }
    }
}

/// Version string of the library; static, never freed.
#[no_mangle]
pub extern "C" fn uc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next `uc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn uc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a representation document. A `Z` document may be read over `Q`.
///
/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn uc_representation_from_json(
    json: *const c_char,
    ring: UcRing,
    out: *mut *mut UcRepresentation,
) -> UcStatus {
    guard(|| {
        check_out(out)?;
        let doc: RepresentationDoc = read_json(json, "representation")?;
        let universe = match (doc.ring, ring) {
            (RingKind::Z, UcRing::Declared | UcRing::Z) => AnyUniverse::Z(Universe::new(doc.to_rep()?)),
            (RingKind::Z, UcRing::Q) => AnyUniverse::Q(Universe::new(doc.to_rep::<Int>()?.base_change_q())),
            (RingKind::Q, UcRing::Declared | UcRing::Q) => AnyUniverse::Q(Universe::new(doc.to_rep()?)),
            (RingKind::Q, UcRing::Z) => {
                return Err(Failure(UcStatus::Ring, "a representation over Q cannot be read over Z".into()))
            }
        };
        *out = Box::into_raw(Box::new(UcRepresentation { universe }));
        Ok(())
    })
}

/// # Safety
/// `rep` is NULL or a handle from [`uc_representation_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uc_representation_free(rep: *mut UcRepresentation) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// # Safety
/// `rep` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn uc_representation_ring(rep: *const UcRepresentation) -> UcRing {
    match rep.as_ref().map(|r| &r.universe) {
        Some(AnyUniverse::Z(_)) => UcRing::Z,
        Some(AnyUniverse::Q(_)) => UcRing::Q,
        None => UcRing::Declared,
    }
}

/// Number of objects of the underlying diagram; 0 for NULL.
///
/// # Safety
/// `rep` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn uc_representation_object_count(rep: *const UcRepresentation) -> usize {
    match rep.as_ref().map(|r| &r.universe) {
        Some(AnyUniverse::Z(u)) => u.diagram().objects().len(),
        Some(AnyUniverse::Q(u)) => u.diagram().objects().len(),
        None => 0,
    }
}

macro_rules! on_universe {
    ($rep:expr, $u:ident => $body:expr) => {
        match &$rep.universe {
            AnyUniverse::Z($u) => $body,
            AnyUniverse::Q($u) => $body,
        }
    };
}

/// Commutant at `stage` (comma-separated objects of a full subdiagram;
/// NULL or `"all"` for the whole diagram).
///
/// # Safety
/// `rep` is a live handle, `stage` is NULL or nul-terminated, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn uc_end_json(
    rep: *const UcRepresentation,
    stage: *const c_char,
    out: *mut *mut c_char,
) -> UcStatus {
    guard(|| {
        check_out(out)?;
        let rep = rep_ref(rep)?;
        let stage = if stage.is_null() { None } else { Some(read_str(stage, "stage")?) };
        let v = on_universe!(rep, u => {
            let d = select_stage(u.diagram(), stage)?;
            u.end(&d)?.to_json()
        });
        write_string(out, &v)
    })
}

/// Commutants along a chain of stages with their rank traces.
///
/// # Safety
/// `rep` is a live handle, `chain_json` is nul-terminated, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn uc_tower_json(
    rep: *const UcRepresentation,
    chain_json: *const c_char,
    out: *mut *mut c_char,
) -> UcStatus {
    guard(|| {
        check_out(out)?;
        let rep = rep_ref(rep)?;
        let chain: ChainDoc = read_json(chain_json, "chain")?;
        let v = on_universe!(rep, u => {
            let chain = SubdiagramChain::from_doc(u.diagram(), &chain)?;
            u.tower(&chain)?.to_json()
        });
        write_string(out, &v)
    })
}

fn criterion_report<R: Ring>(
    u: &Universe<R>,
    target: &TargetDoc,
    maps: &TestMapsDoc,
) -> Result<(Value, Verdict), Failure> {
    let target = target.to_target()?;
    let rep: &Representation<R> = u.representation();
    let resolved = maps
        .maps
        .iter()
        .enumerate()
        .map(|(i, m)| m.resolve(i, rep, Some(&target)))
        .collect::<Result<Vec<_>, _>>()?;
    let report = full_criterion(u, &target, &resolved)?;
    Ok((report.to_json(), report.overall()))
}

/// Runs the equivalence criterion. `verdict` may be NULL.
///
/// # Safety
/// `rep` is a live handle, the JSON arguments are nul-terminated, `out` is
/// writable and `verdict` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn uc_criterion_json(
    rep: *const UcRepresentation,
    target_json: *const c_char,
    maps_json: *const c_char,
    out: *mut *mut c_char,
    verdict: *mut UcVerdict,
) -> UcStatus {
    guard(|| {
        check_out(out)?;
        let rep = rep_ref(rep)?;
        let target: TargetDoc = read_json(target_json, "target")?;
        let maps: TestMapsDoc = read_json(maps_json, "maps")?;
        let (v, overall) = on_universe!(rep, u => criterion_report(u, &target, &maps)?);
        if let Some(slot) = verdict.as_mut() {
            *slot = match overall {
                Verdict::Pass => UcVerdict::Pass,
                Verdict::Fail => UcVerdict::Fail,
                Verdict::Inconclusive => UcVerdict::Inconclusive,
            };
        }
        write_string(out, &v)
    })
}

fn snf<R: Ring>(lit: &MatrixLiteral) -> Result<Value, Failure> {
    let a = lit.to_matrix::<R>().map_err(Error::Parse)?;
    let d = smith_normal_form(&a);
    Ok(json!({
        "ring": R::KIND,
        "diagonal": vector_to_json(&d.diagonal()),
        "rank": d.rank(),
        "u": d.u, "s": d.s, "v": d.v,
    }))
}

/// Smith normal form `U·A·V = S` of a matrix literal or bare array of rows.
///
/// # Safety
/// `matrix_json` is nul-terminated and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn uc_snf_json(matrix_json: *const c_char, ring: UcRing, out: *mut *mut c_char) -> UcStatus {
    guard(|| {
        check_out(out)?;
        let v: Value = read_json(matrix_json, "matrix")?;
        let lit = MatrixLiteral::from_value(&v).map_err(Error::Parse)?;
        let v = match ring {
            UcRing::Q => snf::<Rat>(&lit)?,
            _ => snf::<Int>(&lit)?,
        };
        write_string(out, &v)
    })
}

/// Relative homology of a graph pair document.
///
/// # Safety
/// `graph_json` is nul-terminated and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn uc_homology_json(graph_json: *const c_char, out: *mut *mut c_char) -> UcStatus {
    guard(|| {
        check_out(out)?;
        let doc: GraphDoc = read_json(graph_json, "graph")?;
        let pair = doc.pair()?;
        let h = pair.homology();
        let v = json!({
            "degree": pair.degree,
            "group": h.group(),
            "rank": h.rank(),
            "cycles": h.cycle_matrix(),
        });
        write_string(out, &v)
    })
}

/// Exactness of the long exact sequence of a graph triple. `exact` receives
/// 1 when every node is exact and 0 otherwise; it may be NULL.
///
/// # Safety
/// `graph_json` is nul-terminated, `out` is writable, `exact` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn uc_les_check_json(
    graph_json: *const c_char,
    out: *mut *mut c_char,
    exact: *mut i32,
) -> UcStatus {
    guard(|| {
        check_out(out)?;
        let doc: GraphDoc = read_json(graph_json, "graph")?;
        let report = les_check(&doc.triple()?)?;
        if let Some(slot) = exact.as_mut() {
            *slot = i32::from(report.pass);
        }
        let verdict = if report.pass { "PASS" } else { "FAIL" };
        write_string(out, &json!({"nodes": report.nodes, "verdict": verdict}))
    })
}
