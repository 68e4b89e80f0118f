//! C ABI over `cru-core`.
//!
//! Every function returns a [`CruStatus`]. Strings passed in are
//! NUL-terminated UTF-8; strings handed out must be released with
//! [`cru_string_free`]. On failure a message for the calling thread is
//! available from [`cru_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cru_core::matcher::{recognize_with_context, MatchConfig, SurveillanceSnapshot};
use cru_core::{AirlineRegistry, CruError, IcaoCallsign, SpokenForm};

/// Opaque airline registry handle.
pub struct CruRegistry(AirlineRegistry);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CruStatus {
    Ok = 0,
    /// Recognition ran but produced no call-sign.
    NoMatch = 1,
    NullArgument = 2,
    InvalidUtf8 = 3,
    /// Input does not follow the expected grammar.
    Invalid = 4,
    Io = 5,
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(CruStatus);

impl From<CruError> for Fail {
    fn from(e: CruError) -> Self {
        set_error(e.to_string());
        Fail(match e {
            CruError::Io { .. } => CruStatus::Io,
            _ => CruStatus::Invalid,
        })
    }
}

fn guard(f: impl FnOnce() -> Result<CruStatus, Fail>) -> CruStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("internal panic");
            CruStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(Fail(CruStatus::NullArgument));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{name} is not valid UTF-8"));
        Fail(CruStatus::InvalidUtf8)
    })
}

unsafe fn str_array<'a>(p: *const *const c_char, len: usize, name: &str) -> Result<Vec<&'a str>, Fail> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(Fail(CruStatus::NullArgument));
    }
    (0..len).map(|i| str_arg(*p.add(i), name)).collect()
}

unsafe fn registry<'a>(p: *const CruRegistry) -> Result<&'a AirlineRegistry, Fail> {
    p.as_ref().map(|r| &r.0).ok_or_else(|| {
        set_error("registry is null");
        Fail(CruStatus::NullArgument)
    })
}

fn out_ptr<T>(p: *mut T, name: &str) -> Result<(), Fail> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(Fail(CruStatus::NullArgument));
    }
    Ok(())
}

unsafe fn write_callsign(out: *mut *mut c_char, cs: Option<IcaoCallsign>) -> CruStatus {
    match cs {
        Some(cs) => {
            *out = CString::new(cs.canonical()).expect("call-signs are ASCII").into_raw();
            CruStatus::Ok
        }
        None => {
            *out = ptr::null_mut();
            CruStatus::NoMatch
        }
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until
/// the next call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn cru_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cru_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The built-in airline registry.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cru_registry_builtin(out: *mut *mut CruRegistry) -> CruStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = Box::into_raw(Box::new(CruRegistry(AirlineRegistry::builtin())));
        Ok(CruStatus::Ok)
    })
}

/// Loads a registry TSV file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cru_registry_load(path: *const c_char, out: *mut *mut CruRegistry) -> CruStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let path = str_arg(path, "path")?;
        let reg = AirlineRegistry::load(path)?;
        *out = Box::into_raw(Box::new(CruRegistry(reg)));
        Ok(CruStatus::Ok)
    })
}

/// Releases a registry. NULL is ignored.
///
/// # Safety
/// `reg` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cru_registry_free(reg: *mut CruRegistry) {
    if !reg.is_null() {
        drop(Box::from_raw(reg));
    }
}

/// Validates an ICAO call-sign and writes its canonical form.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cru_parse_icao(text: *const c_char, out: *mut *mut c_char) -> CruStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let cs = cru_core::parse_icao(str_arg(text, "text")?)?;
        Ok(write_callsign(out, Some(cs)))
    })
}

/// Converts a spoken call-sign span (whitespace-separated words) to ICAO.
/// Returns `NoMatch` when the span carries no complete call-sign.
///
/// # Safety
/// Pointers must be valid; `spoken` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cru_spoken_to_icao(
    reg: *const CruRegistry,
    spoken: *const c_char,
    out: *mut *mut c_char,
) -> CruStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let reg = registry(reg)?;
        let form = SpokenForm::parse(str_arg(spoken, "spoken")?);
        let cs = cru_core::spoken_to_icao(&form.as_strs(), reg)?;
        Ok(write_callsign(out, cs))
    })
}

/// Recognizes the call-sign of a transcript without surveillance data.
///
/// # Safety
/// Pointers must be valid; `transcript` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cru_vanilla_recognize(
    reg: *const CruRegistry,
    transcript: *const c_char,
    out: *mut *mut c_char,
) -> CruStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let reg = registry(reg)?;
        let form = SpokenForm::parse(str_arg(transcript, "transcript")?);
        Ok(write_callsign(out, cru_core::extractor::vanilla_recognize(&form, reg)))
    })
}

/// Recognizes the call-sign of a transcript against `n` surveillance
/// call-signs with the default matcher settings. `score` (optional)
/// receives the best candidate similarity, or -1 when there was none.
///
/// # Safety
/// Pointers must be valid; `surveillance` must hold `n` NUL-terminated
/// strings.
#[no_mangle]
pub unsafe extern "C" fn cru_recognize_with_context(
    reg: *const CruRegistry,
    transcript: *const c_char,
    surveillance: *const *const c_char,
    n: usize,
    out: *mut *mut c_char,
    score: *mut f64,
) -> CruStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let reg = registry(reg)?;
        let form = SpokenForm::parse(str_arg(transcript, "transcript")?);
        let snapshot = str_array(surveillance, n, "surveillance")?
            .into_iter()
            .map(cru_core::parse_icao)
            .collect::<cru_core::Result<Vec<_>>>()?;
        let (cs, trace) = recognize_with_context(
            &form,
            &SurveillanceSnapshot::new(snapshot),
            reg,
            &MatchConfig::default(),
        );
        if !score.is_null() {
            *score = trace.best_score().unwrap_or(-1.0);
        }
        Ok(write_callsign(out, cs))
    })
}

/// Windowed similarity of a spoken call-sign variant inside a transcript.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cru_similarity(transcript: *const c_char, variant: *const c_char, out: *mut f64) -> CruStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let t = SpokenForm::parse(str_arg(transcript, "transcript")?);
        let v = SpokenForm::parse(str_arg(variant, "variant")?);
        *out = cru_core::matcher::similarity(&t, &v, &MatchConfig::default());
        Ok(CruStatus::Ok)
    })
}

/// Corpus word error rate in percent over `n` hypothesis/reference pairs.
///
/// # Safety
/// `hypotheses` and `references` must each hold `n` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn cru_wer(
    hypotheses: *const *const c_char,
    references: *const *const c_char,
    n: usize,
    out: *mut f64,
) -> CruStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let hyp: Vec<SpokenForm> = str_array(hypotheses, n, "hypotheses")?
            .into_iter()
            .map(SpokenForm::parse)
            .collect();
        let refs: Vec<SpokenForm> = str_array(references, n, "references")?
            .into_iter()
            .map(SpokenForm::parse)
            .collect();
        *out = cru_core::eval::wer(&hyp, &refs)?;
        Ok(CruStatus::Ok)
    })
}
