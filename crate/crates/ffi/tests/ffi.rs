use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use sva_equiv_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = sva_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn check(h: *const SvaChecker, cand: &str, refr: &str) -> (SvaStatus, SvaVerdict, SvaReason) {
    let mut v = SvaVerdict::NotEquivalent;
    let mut r = SvaReason::Timeout;
    let st = unsafe { sva_check_equivalence(h, c(cand).as_ptr(), c(refr).as_ptr(), &mut v, &mut r) };
    (st, v, r)
}

#[test]
fn checker_lifecycle_and_verdicts() {
    let h = sva_checker_new();
    unsafe {
        assert_eq!(sva_checker_set_depth(h, 6), SvaStatus::Ok);
        assert_eq!(sva_checker_set_timeout_ms(h, 5_000), SvaStatus::Ok);
        assert_eq!(sva_checker_set_depth(h, 0), SvaStatus::ConfigError);
        assert!(last_error().contains("depth"));
        assert_eq!(sva_checker_set_max_enum_bits(h, 99), SvaStatus::ConfigError);
    }
    assert_eq!(check(h, "a && b", "b && a"), (SvaStatus::Ok, SvaVerdict::Equivalent, SvaReason::None));
    assert_eq!(check(h, "a |-> (b && c)", "a |-> b").1, SvaVerdict::ImpliesRefToLm);
    assert_eq!(check(h, "a", "s_eventually a"), (SvaStatus::Ok, SvaVerdict::Unsupported, SvaReason::Liveness));
    assert_eq!(check(h, "###", "a").0, SvaStatus::SyntaxError);
    assert!(last_error().contains("candidate"));
    unsafe {
        assert_eq!(sva_checker_set_backend(h, SvaBackend::Smt), SvaStatus::Ok);
    }
    assert_eq!(check(h, "a |-> b", "b |-> a").1, SvaVerdict::NotEquivalent);
    unsafe { sva_checker_free(h) };
}

#[test]
fn null_arguments() {
    let (st, _, _) = check(ptr::null(), "a", "a");
    assert_eq!(st, SvaStatus::NullArgument);
    let mut class = 0u32;
    unsafe {
        assert_eq!(sva_classify(ptr::null(), &mut class), SvaStatus::NullArgument);
        assert_eq!(sva_classify(c("a").as_ptr(), ptr::null_mut()), SvaStatus::NullArgument);
        sva_checker_free(ptr::null_mut());
        sva_string_free(ptr::null_mut());
    }
}

#[test]
fn text_functions() {
    unsafe {
        let mut class = 0u32;
        assert_eq!(sva_classify(c("a |-> ##1 b").as_ptr(), &mut class), SvaStatus::Ok);
        assert_eq!(class, 2);
        assert!(sva_last_error_message().is_null());

        let mut out = ptr::null_mut();
        assert_eq!(sva_normalize(c("`SIG && a.b[0].c").as_ptr(), SvaProfile::Pec, &mut out), SvaStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "SIG && a_b_0_c");
        sva_string_free(out);

        let mut sv = ptr::null_mut();
        assert_eq!(sva_wrap(c("@(posedge ACLK) a |-> b").as_ptr(), &mut sv), SvaStatus::Ok);
        let text = CStr::from_ptr(sv).to_str().unwrap().to_string();
        sva_string_free(sv);
        assert!(text.starts_with("module sva_check"));
        assert!(text.contains("input logic ACLK;"));
    }
}

#[test]
fn scoring() {
    assert_eq!(sva_rlvf_reward(SvaVerdict::Unsupported, true), 0.15);
    assert_eq!(sva_rwopd_weight(SvaVerdict::Unsupported, true), 0.0);
    assert_eq!(sva_rlvf_reward(SvaVerdict::ImpliesRefToLm, true), 0.6);
    let mut p = 0.0;
    unsafe {
        assert_eq!(sva_pass_at_k(4, 1, 2, &mut p), SvaStatus::Ok);
        assert!((p - 0.5).abs() < 1e-12);
        assert_eq!(sva_pass_at_k(2, 1, 3, &mut p), SvaStatus::DomainError);
    }
    assert!(last_error().contains("pass@k"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/sva_equiv.h");
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output() else {
        eprintln!("skipping: no C compiler");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
