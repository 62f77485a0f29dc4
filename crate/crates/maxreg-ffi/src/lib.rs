//! C ABI for the maxreg laboratory.
//!
//! Objects cross the boundary as opaque handles created and destroyed by
//! this library; every function returns a [`MaxregStatus`] code and the
//! last error message is kept per thread. The generated header lives at
//! `include/maxreg.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use maxreg::averaging::StencilTable;
use maxreg::cli::{parse_config, run_config, RunMode};
use maxreg::generate::Generator;
use maxreg::lattice::{build_domain, DomainSpec, Lattice, ScalarField};
use maxreg::maxops::{local_maximal_field, spherical_maximal_field, EngineKind, MultiField};
use maxreg::Error;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxregStatus {
    Ok = 0,
    /// A check ran and failed (batch runs only).
    CheckFailures = 1,
    /// Exponent or theorem hypotheses not satisfied.
    HypothesesUnmet = 2,
    NullPointer = 3,
    InvalidArgument = 4,
    DegenerateGeometry = 5,
    GridTooCoarse = 6,
    OutsideDomain = 7,
    IoError = 8,
    InternalPanic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> MaxregStatus {
    match err {
        Error::DegenerateGeometry(_) | Error::Disconnected(_) => MaxregStatus::DegenerateGeometry,
        Error::GridTooCoarse(_) => MaxregStatus::GridTooCoarse,
        Error::OutsideDomain(_) => MaxregStatus::OutsideDomain,
        Error::HypothesesUnmet(_) => MaxregStatus::HypothesesUnmet,
        Error::Io(_) => MaxregStatus::IoError,
        _ => MaxregStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> MaxregStatus {
    let code = status_of(&err);
    set_error(&err.to_string());
    code
}

fn guarded(job: impl FnOnce() -> MaxregStatus) -> MaxregStatus {
    match catch_unwind(AssertUnwindSafe(job)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            MaxregStatus::InternalPanic
        }
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, MaxregStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(MaxregStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        MaxregStatus::InvalidArgument
    })
}

/// Rasterized domain plus its stencil cache.
pub struct MaxregLattice {
    lattice: Lattice,
    table: StencilTable,
}

/// Scalar field on the lattice that created it.
pub struct MaxregField {
    field: ScalarField,
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn maxreg_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn maxreg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a lattice from a domain description
/// `{"kind": "...", "params": {...}}` and a grid spacing.
///
/// # Safety
/// `spec_json` must be a NUL-terminated UTF-8 string and `out` a valid
/// pointer. On success `*out` owns the lattice; free with
/// [`maxreg_lattice_free`].
#[no_mangle]
pub unsafe extern "C" fn maxreg_lattice_new(
    spec_json: *const c_char,
    h: f64,
    out: *mut *mut MaxregLattice,
) -> MaxregStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return MaxregStatus::NullPointer;
        }
        let text = match cstr(spec_json) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let spec: DomainSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => {
                set_error(&format!("malformed domain spec: {e}"));
                return MaxregStatus::InvalidArgument;
            }
        };
        let domain = match build_domain(&spec) {
            Ok(d) => d,
            Err(e) => return fail(e),
        };
        let lattice = match Lattice::new(domain, h) {
            Ok(l) => l,
            Err(e) => return fail(e),
        };
        let table = StencilTable::for_lattice(&lattice);
        *out = Box::into_raw(Box::new(MaxregLattice { lattice, table }));
        MaxregStatus::Ok
    })
}

/// Frees a lattice handle. Null is a no-op.
///
/// # Safety
/// `ptr` must come from [`maxreg_lattice_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn maxreg_lattice_free(ptr: *mut MaxregLattice) {
    if !ptr.is_null() {
        drop(Box::from_raw(ptr));
    }
}

/// Number of grid nodes strictly inside the domain.
///
/// # Safety
/// `ptr` must be a live lattice handle.
#[no_mangle]
pub unsafe extern "C" fn maxreg_lattice_inside_count(ptr: *const MaxregLattice) -> i64 {
    if ptr.is_null() {
        return -1;
    }
    (*ptr).lattice.mask.inside_count() as i64
}

/// Spatial dimension of the lattice.
///
/// # Safety
/// `ptr` must be a live lattice handle.
#[no_mangle]
pub unsafe extern "C" fn maxreg_lattice_dim(ptr: *const MaxregLattice) -> i32 {
    if ptr.is_null() {
        return -1;
    }
    (*ptr).lattice.dim() as i32
}

/// Copy of the distance-to-complement field.
///
/// # Safety
/// `lat` must be live; `out` valid. Free the result with
/// [`maxreg_field_free`].
#[no_mangle]
pub unsafe extern "C" fn maxreg_lattice_delta(
    lat: *const MaxregLattice,
    out: *mut *mut MaxregField,
) -> MaxregStatus {
    guarded(|| {
        if lat.is_null() || out.is_null() {
            set_error("null pointer");
            return MaxregStatus::NullPointer;
        }
        *out = Box::into_raw(Box::new(MaxregField {
            field: (*lat).lattice.delta.clone(),
        }));
        MaxregStatus::Ok
    })
}

/// Realizes a generator spec (JSON) on the lattice.
///
/// # Safety
/// `lat` must be live, `gen_json` NUL-terminated UTF-8, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn maxreg_field_generate(
    lat: *const MaxregLattice,
    gen_json: *const c_char,
    out: *mut *mut MaxregField,
) -> MaxregStatus {
    guarded(|| {
        if lat.is_null() || out.is_null() {
            set_error("null pointer");
            return MaxregStatus::NullPointer;
        }
        let text = match cstr(gen_json) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let gen: Generator = match serde_json::from_str(text) {
            Ok(g) => g,
            Err(e) => {
                set_error(&format!("unknown or malformed generator: {e}"));
                return MaxregStatus::InvalidArgument;
            }
        };
        match gen.realize((*lat).lattice.mask.clone()) {
            Ok(field) => {
                *out = Box::into_raw(Box::new(MaxregField { field }));
                MaxregStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Frees a field handle. Null is a no-op.
///
/// # Safety
/// `ptr` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn maxreg_field_free(ptr: *mut MaxregField) {
    if !ptr.is_null() {
        drop(Box::from_raw(ptr));
    }
}

/// Number of values [`maxreg_field_values`] will write.
///
/// # Safety
/// `ptr` must be a live field handle.
#[no_mangle]
pub unsafe extern "C" fn maxreg_field_len(ptr: *const MaxregField) -> i64 {
    if ptr.is_null() {
        return -1;
    }
    (*ptr).field.mask.inside_count() as i64
}

/// Copies the inside-point values (row-major node order) into `buf`.
///
/// # Safety
/// `buf` must have room for `maxreg_field_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn maxreg_field_values(
    ptr: *const MaxregField,
    buf: *mut f64,
    len: usize,
) -> MaxregStatus {
    guarded(|| {
        if ptr.is_null() || buf.is_null() {
            set_error("null pointer");
            return MaxregStatus::NullPointer;
        }
        let field = &(*ptr).field;
        let n = field.mask.inside_count();
        if len < n {
            set_error(&format!("buffer holds {len} values, need {n}"));
            return MaxregStatus::InvalidArgument;
        }
        for (i, (_, v)) in field.iter_inside().enumerate() {
            *buf.add(i) = v;
        }
        MaxregStatus::Ok
    })
}

/// Writes the field as CSV (row-major, blank cells outside the domain).
///
/// # Safety
/// `ptr` live, `path` NUL-terminated UTF-8.
#[no_mangle]
pub unsafe extern "C" fn maxreg_field_write_csv(
    ptr: *const MaxregField,
    path: *const c_char,
) -> MaxregStatus {
    guarded(|| {
        if ptr.is_null() {
            set_error("null pointer");
            return MaxregStatus::NullPointer;
        }
        let path = match cstr(path) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match maxreg::cli::write_field_csv(&(*ptr).field, Path::new(path)) {
            Ok(()) => MaxregStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Which engine evaluates the maximal operator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxregEngine {
    Oracle = 0,
    Fast = 1,
}

/// Evaluates the multilinear maximal operator over `m` slot fields.
///
/// # Safety
/// `slots` must point to `m` live field handles created on `lat`'s grid;
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn maxreg_local_maximal(
    lat: *const MaxregLattice,
    slots: *const *const MaxregField,
    m: usize,
    alpha: f64,
    engine: MaxregEngine,
    rel_tol: f64,
    out: *mut *mut MaxregField,
) -> MaxregStatus {
    guarded(|| {
        if lat.is_null() || slots.is_null() || out.is_null() {
            set_error("null pointer");
            return MaxregStatus::NullPointer;
        }
        let mut fields = Vec::with_capacity(m);
        for i in 0..m {
            let p = *slots.add(i);
            if p.is_null() {
                set_error(&format!("slot {i} is null"));
                return MaxregStatus::NullPointer;
            }
            if !Arc::ptr_eq(&(*p).field.mask, &(*lat).lattice.mask) {
                set_error(&format!("slot {i} lives on a different lattice"));
                return MaxregStatus::InvalidArgument;
            }
            fields.push((*p).field.clone());
        }
        let multi = match MultiField::new(fields) {
            Ok(m) => m,
            Err(e) => return fail(e),
        };
        let kind = match engine {
            MaxregEngine::Oracle => EngineKind::Oracle,
            MaxregEngine::Fast => EngineKind::Fast,
        };
        match local_maximal_field(&multi, &(*lat).table, &(*lat).lattice, alpha, kind, rel_tol) {
            Ok(res) => {
                *out = Box::into_raw(Box::new(MaxregField { field: res.value }));
                MaxregStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Evaluates the spherical maximal operator of one field.
///
/// # Safety
/// `lat` and `field` live and matching; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn maxreg_spherical_maximal(
    lat: *const MaxregLattice,
    field: *const MaxregField,
    alpha: f64,
    out: *mut *mut MaxregField,
) -> MaxregStatus {
    guarded(|| {
        if lat.is_null() || field.is_null() || out.is_null() {
            set_error("null pointer");
            return MaxregStatus::NullPointer;
        }
        match spherical_maximal_field(&(*field).field, &(*lat).table, &(*lat).lattice, alpha) {
            Ok(value) => {
                *out = Box::into_raw(Box::new(MaxregField { field: value }));
                MaxregStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs a full JSON configuration, writing artifacts under `out_dir`.
/// Returns `Ok`, `CheckFailures` or `HypothesesUnmet` mirroring the CLI
/// exit contract; other codes signal setup errors.
///
/// # Safety
/// Both strings NUL-terminated UTF-8.
#[no_mangle]
pub unsafe extern "C" fn maxreg_run_config(
    config_json: *const c_char,
    out_dir: *const c_char,
) -> MaxregStatus {
    guarded(|| {
        let text = match cstr(config_json) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let dir = match cstr(out_dir) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let doc: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                set_error(&format!("malformed config: {e}"));
                return MaxregStatus::InvalidArgument;
            }
        };
        let cfg = match parse_config(&doc) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        match run_config(&cfg, Path::new(dir), RunMode::Verify) {
            Ok(output) => match output.status.exit_code() {
                0 => MaxregStatus::Ok,
                1 => {
                    set_error("one or more checks failed");
                    MaxregStatus::CheckFailures
                }
                _ => {
                    set_error("hypotheses unmet");
                    MaxregStatus::HypothesesUnmet
                }
            },
            Err(e) => fail(e),
        }
    })
}
