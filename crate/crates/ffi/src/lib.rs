//! C interface to `geiringer`.
//!
//! Populations are opaque handles owned by the caller and released with
//! [`geiringer_population_free`]. Strings returned through `char **` out
//! parameters are heap allocated and released with [`geiringer_string_free`].
//! Every entry point returns a [`GeiringerStatus`]; on failure the message is
//! available from [`geiringer_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use geiringer::{
    enumerate_orbit, enumerate_shape_orbit, exact_limit_frequency, inflate, parse_op_sequence, parse_population,
    parse_schema, predict_schema_frequency, run_chain, uniform_mixing, ChainConfig, Error, Population,
};

/// Orbit cap used by the command-line tool.
pub const GEIRINGER_DEFAULT_CAP: usize = 200_000;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeiringerStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    CapExceeded = 5,
    Internal = 6,
}

/// Opaque population handle.
pub struct GeiringerPopulation {
    inner: Population,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GeiringerStatus {
    match err {
        Error::Syntax { .. }
        | Error::DuplicateState { .. }
        | Error::DuplicateTerminal { .. }
        | Error::EmptyRollout { .. }
        | Error::EmptyPopulation => GeiringerStatus::Parse,
        Error::CapExceeded { .. } => GeiringerStatus::CapExceeded,
        Error::Singular
        | Error::NotStationary { .. }
        | Error::NoConvergence { .. }
        | Error::ZeroStationaryMass(_)
        | Error::Io(_) => GeiringerStatus::Internal,
        _ => GeiringerStatus::InvalidArgument,
    }
}

struct Failure(GeiringerStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GeiringerStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GeiringerStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            GeiringerStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(GeiringerStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GeiringerStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn population<'a>(p: *const GeiringerPopulation) -> Result<&'a Population, Failure> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure(GeiringerStatus::NullPointer, "population handle is null".into()))
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(GeiringerStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) {
    *out = CString::new(s.replace('\0', " ")).expect("interior nul removed").into_raw();
}

unsafe fn put_population(out: *mut *mut GeiringerPopulation, pop: Population) {
    *out = Box::into_raw(Box::new(GeiringerPopulation { inner: pop }));
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn geiringer_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn geiringer_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses population text.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geiringer_population_parse(
    text: *const c_char,
    out: *mut *mut GeiringerPopulation,
) -> GeiringerStatus {
    guard(|| {
        check_out(out)?;
        let pop = parse_population(self::text(text, "text")?)?;
        put_population(out, pop);
        Ok(())
    })
}

/// # Safety
/// `pop` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn geiringer_population_free(pop: *mut GeiringerPopulation) {
    if !pop.is_null() {
        drop(Box::from_raw(pop));
    }
}

/// Number of rollouts.
///
/// # Safety
/// `pop` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geiringer_population_size(pop: *const GeiringerPopulation, out: *mut usize) -> GeiringerStatus {
    guard(|| {
        check_out(out)?;
        *out = population(pop)?.size();
        Ok(())
    })
}

/// Population in the text format accepted by the parser.
///
/// # Safety
/// `pop` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geiringer_population_to_string(
    pop: *const GeiringerPopulation,
    out: *mut *mut c_char,
) -> GeiringerStatus {
    guard(|| {
        check_out(out)?;
        put_string(out, population(pop)?.to_string());
        Ok(())
    })
}

/// Downward sets and order counts as JSON.
///
/// # Safety
/// `pop` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geiringer_stats_json(pop: *const GeiringerPopulation, out: *mut *mut c_char) -> GeiringerStatus {
    guard(|| {
        check_out(out)?;
        let v = geiringer::statistics::stats_json(population(pop)?);
        put_string(out, v.to_string());
        Ok(())
    })
}

/// Applies a comma-separated operator sequence, writing a new handle.
///
/// # Safety
/// `pop` must be a live handle, `ops` a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geiringer_apply_ops(
    pop: *const GeiringerPopulation,
    ops: *const c_char,
    out: *mut *mut GeiringerPopulation,
) -> GeiringerStatus {
    guard(|| {
        check_out(out)?;
        let seq = parse_op_sequence(text(ops, "ops")?)?;
        let image = seq.apply(population(pop)?)?;
        put_population(out, image);
        Ok(())
    })
}

/// Inflation by factor `m`, writing a new handle.
///
/// # Safety
/// `pop` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geiringer_inflate(
    pop: *const GeiringerPopulation,
    m: u32,
    out: *mut *mut GeiringerPopulation,
) -> GeiringerStatus {
    guard(|| {
        check_out(out)?;
        put_population(out, inflate(population(pop)?, m)?);
        Ok(())
    })
}

/// Closed-form schema frequency as a reduced fraction string such as "1/35".
///
/// # Safety
/// `pop` must be a live handle, `schema` a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geiringer_predict(
    pop: *const GeiringerPopulation,
    schema: *const c_char,
    out: *mut *mut c_char,
) -> GeiringerStatus {
    guard(|| {
        check_out(out)?;
        let h = parse_schema(text(schema, "schema")?)?;
        put_string(out, predict_schema_frequency(population(pop)?, &h).value.to_string());
        Ok(())
    })
}

/// Exact limiting frequency from the orbit, as a fraction string. With
/// `shapes` set the letter-quotient orbit is used. Returns
/// `CapExceeded` when the orbit has more than `cap` members.
///
/// # Safety
/// `pop` must be a live handle, `schema` a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geiringer_orbit_frequency(
    pop: *const GeiringerPopulation,
    schema: *const c_char,
    include_transpositions: bool,
    shapes: bool,
    cap: usize,
    out: *mut *mut c_char,
) -> GeiringerStatus {
    guard(|| {
        check_out(out)?;
        let h = parse_schema(text(schema, "schema")?)?;
        let pop = population(pop)?;
        let f = if shapes {
            enumerate_shape_orbit(pop, include_transpositions, cap)?.exact_frequency(&h)
        } else {
            exact_limit_frequency(&enumerate_orbit(pop, include_transpositions, cap)?, &h)
        };
        put_string(out, f.value.to_string());
        Ok(())
    })
}

/// Chain estimate of a schema frequency under the uniform mixing
/// distribution, averaged over `replicas` independent runs.
///
/// # Safety
/// `pop` must be a live handle, `schema` a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geiringer_mix(
    pop: *const GeiringerPopulation,
    schema: *const c_char,
    include_transpositions: bool,
    steps: usize,
    seed: u64,
    replicas: usize,
    out: *mut f64,
) -> GeiringerStatus {
    guard(|| {
        check_out(out)?;
        let h = parse_schema(text(schema, "schema")?)?;
        let pop = population(pop)?;
        let mu = uniform_mixing(pop, include_transpositions);
        let report = run_chain(pop, &mu, ChainConfig::new(steps, seed, replicas), std::slice::from_ref(&h))?;
        *out = report.estimates[0].phi;
        Ok(())
    })
}
