//! C interface to the checker, classifier, normalizer and scoring helpers.
//!
//! Every fallible call returns an [`SvaStatus`]. On failure a description
//! is kept per thread and can be read with [`sva_last_error_message`].
//! Strings returned through out-pointers belong to the caller and must be
//! released with [`sva_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use sva_equiv::metrics;
use sva_equiv::normalize::{self, Profile};
use sva_equiv::pec::{self, Backend, CheckConfig, CheckError, UnsupportedReason, Verdict};
use sva_equiv::reward;
use sva_equiv::tcl::{self, TclClass};
use sva_equiv::wrapper;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    SyntaxError = 3,
    ConfigError = 4,
    EngineError = 5,
    DomainError = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvaVerdict {
    Equivalent = 0,
    ImpliesRefToLm = 1,
    ImpliesLmToRef = 2,
    NotEquivalent = 3,
    Unsupported = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvaReason {
    None = 0,
    Liveness = 1,
    MultiClock = 2,
    UnboundedRange = 3,
    GotoRepeat = 4,
    UnsupportedFn = 5,
    Timeout = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvaBackend {
    Enumerate = 0,
    Smt = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvaProfile {
    Lint = 0,
    Pec = 1,
}

/// Opaque checker configuration.
pub struct SvaChecker {
    cfg: CheckConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Fail(SvaStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SvaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SvaStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SvaStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(SvaStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SvaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(SvaStatus::NullArgument, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(SvaStatus::EngineError, "output contains NUL".into()))?;
    write_out(out, c.into_raw(), "output pointer")
}

fn verdict_code(v: Verdict) -> (SvaVerdict, SvaReason) {
    match v {
        Verdict::Equivalent => (SvaVerdict::Equivalent, SvaReason::None),
        Verdict::ImpliesRefToLm => (SvaVerdict::ImpliesRefToLm, SvaReason::None),
        Verdict::ImpliesLmToRef => (SvaVerdict::ImpliesLmToRef, SvaReason::None),
        Verdict::NotEquivalent => (SvaVerdict::NotEquivalent, SvaReason::None),
        Verdict::Unsupported(r) => (
            SvaVerdict::Unsupported,
            match r {
                UnsupportedReason::Liveness => SvaReason::Liveness,
                UnsupportedReason::MultiClock => SvaReason::MultiClock,
                UnsupportedReason::UnboundedRange => SvaReason::UnboundedRange,
                UnsupportedReason::GotoRepeat => SvaReason::GotoRepeat,
                UnsupportedReason::UnsupportedFn => SvaReason::UnsupportedFn,
                UnsupportedReason::Timeout => SvaReason::Timeout,
            },
        ),
    }
}

fn verdict_value(v: SvaVerdict) -> Verdict {
    match v {
        SvaVerdict::Equivalent => Verdict::Equivalent,
        SvaVerdict::ImpliesRefToLm => Verdict::ImpliesRefToLm,
        SvaVerdict::ImpliesLmToRef => Verdict::ImpliesLmToRef,
        SvaVerdict::NotEquivalent => Verdict::NotEquivalent,
        // The reward tables do not look at the reason.
        SvaVerdict::Unsupported => Verdict::Unsupported(UnsupportedReason::Timeout),
    }
}

/// New checker with depth 20, 60 s timeout, enumerate backend.
#[no_mangle]
pub extern "C" fn sva_checker_new() -> *mut SvaChecker {
    Box::into_raw(Box::new(SvaChecker {
        cfg: CheckConfig::default(),
    }))
}

/// # Safety
/// `checker` must come from [`sva_checker_new`] and not be freed already.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sva_checker_free(checker: *mut SvaChecker) {
    if !checker.is_null() {
        drop(Box::from_raw(checker));
    }
}

unsafe fn checker_mut<'a>(checker: *mut SvaChecker) -> Result<&'a mut SvaChecker, Fail> {
    checker
        .as_mut()
        .ok_or_else(|| Fail(SvaStatus::NullArgument, "checker is null".into()))
}

/// # Safety
/// `checker` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sva_checker_set_depth(checker: *mut SvaChecker, depth: u32) -> SvaStatus {
    guard(|| {
        if depth == 0 {
            return Err(Fail(SvaStatus::ConfigError, "depth must be at least 1".into()));
        }
        checker_mut(checker)?.cfg.depth = depth as usize;
        Ok(())
    })
}

/// # Safety
/// `checker` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sva_checker_set_timeout_ms(checker: *mut SvaChecker, timeout_ms: u64) -> SvaStatus {
    guard(|| {
        if timeout_ms == 0 {
            return Err(Fail(SvaStatus::ConfigError, "timeout must be positive".into()));
        }
        checker_mut(checker)?.cfg.timeout = Duration::from_millis(timeout_ms);
        Ok(())
    })
}

/// # Safety
/// `checker` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sva_checker_set_backend(checker: *mut SvaChecker, backend: SvaBackend) -> SvaStatus {
    guard(|| {
        checker_mut(checker)?.cfg.backend = match backend {
            SvaBackend::Enumerate => Backend::Enumerate,
            SvaBackend::Smt => Backend::Smt,
        };
        Ok(())
    })
}

/// # Safety
/// `checker` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sva_checker_set_max_enum_bits(checker: *mut SvaChecker, bits: u32) -> SvaStatus {
    guard(|| {
        let c = checker_mut(checker)?;
        let cfg = CheckConfig {
            max_enum_bits: bits,
            ..c.cfg
        };
        cfg.validate().map_err(|e| Fail(SvaStatus::ConfigError, e.to_string()))?;
        c.cfg = cfg;
        Ok(())
    })
}

/// Decides the verdict of `candidate` against `reference`. `out_reason` may
/// be null; it is `SVA_REASON_NONE` unless the verdict is unsupported.
///
/// # Safety
/// `checker` must be a live handle, the strings NUL-terminated, and
/// `out_verdict` writable.
#[no_mangle]
pub unsafe extern "C" fn sva_check_equivalence(
    checker: *const SvaChecker,
    candidate: *const c_char,
    reference: *const c_char,
    out_verdict: *mut SvaVerdict,
    out_reason: *mut SvaReason,
) -> SvaStatus {
    guard(|| {
        let c = checker
            .as_ref()
            .ok_or_else(|| Fail(SvaStatus::NullArgument, "checker is null".into()))?;
        let cand = read_str(candidate, "candidate")?;
        let refr = read_str(reference, "reference")?;
        if out_verdict.is_null() {
            return Err(Fail(SvaStatus::NullArgument, "out_verdict is null".into()));
        }
        let v = pec::check_equivalence(cand, refr, &c.cfg).map_err(|e| {
            let status = match e {
                CheckError::Syntax { .. } => SvaStatus::SyntaxError,
                CheckError::Config(_) => SvaStatus::ConfigError,
                _ => SvaStatus::EngineError,
            };
            Fail(status, e.to_string())
        })?;
        let (verdict, reason) = verdict_code(v);
        out_verdict.write(verdict);
        if !out_reason.is_null() {
            out_reason.write(reason);
        }
        Ok(())
    })
}

/// Writes 1, 2 or 3 for classes C1, C2, C3.
///
/// # Safety
/// `sva` must be NUL-terminated and `out_class` writable.
#[no_mangle]
pub unsafe extern "C" fn sva_classify(sva: *const c_char, out_class: *mut u32) -> SvaStatus {
    guard(|| {
        let s = read_str(sva, "sva")?;
        let class = tcl::classify(s).map_err(|e| Fail(SvaStatus::SyntaxError, e.to_string()))?;
        let n = match class {
            TclClass::C1 => 1,
            TclClass::C2 => 2,
            TclClass::C3 => 3,
        };
        write_out(out_class, n, "out_class")
    })
}

/// # Safety
/// `sva` must be NUL-terminated and `out` writable. Free the result with
/// [`sva_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sva_normalize(sva: *const c_char, profile: SvaProfile, out: *mut *mut c_char) -> SvaStatus {
    guard(|| {
        let s = read_str(sva, "sva")?;
        let p = match profile {
            SvaProfile::Lint => Profile::Lint,
            SvaProfile::Pec => Profile::Pec,
        };
        let (text, _) = normalize::normalize(s, p).map_err(|e| Fail(SvaStatus::SyntaxError, e.to_string()))?;
        write_string(out, text)
    })
}

/// Lint-normalizes `sva` and emits the checker module around it.
///
/// # Safety
/// `sva` must be NUL-terminated and `out` writable. Free the result with
/// [`sva_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sva_wrap(sva: *const c_char, out: *mut *mut c_char) -> SvaStatus {
    guard(|| {
        let s = read_str(sva, "sva")?;
        let (text, _) =
            normalize::normalize(s, Profile::Lint).map_err(|e| Fail(SvaStatus::SyntaxError, e.to_string()))?;
        let module = wrapper::synthesize_wrapper(&text).map_err(|e| Fail(SvaStatus::SyntaxError, e.to_string()))?;
        write_string(out, module.to_sv())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sva_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Distillation weight for one rollout.
#[no_mangle]
pub extern "C" fn sva_rwopd_weight(verdict: SvaVerdict, syntax_ok: bool) -> f64 {
    reward::rwopd_weight(Some(verdict_value(verdict)), syntax_ok)
}

/// Policy-optimization reward for one rollout.
#[no_mangle]
pub extern "C" fn sva_rlvf_reward(verdict: SvaVerdict, syntax_ok: bool) -> f64 {
    reward::rlvf_reward(Some(verdict_value(verdict)), syntax_ok)
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sva_pass_at_k(n: u64, c: u64, k: u64, out: *mut f64) -> SvaStatus {
    guard(|| {
        let v = metrics::pass_at_k(n, c, k).map_err(|e| Fail(SvaStatus::DomainError, e.to_string()))?;
        write_out(out, v, "out")
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sva_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
