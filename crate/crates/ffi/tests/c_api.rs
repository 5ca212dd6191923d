use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use ahmass_ffi::*;

fn last_error() -> String {
    let p = ahm_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn kottler_mass_through_handles() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(ahm_metric_kottler2d(1.0, &mut m), AhmStatus::Ok);
        let mut res = ptr::null_mut();
        assert_eq!(ahm_mass(m, ptr::null(), 0, &mut res), AhmStatus::Ok);

        let mut len = 0usize;
        let mut small = [0.0f64; 1];
        assert_eq!(
            ahm_mass_result_components(res, small.as_mut_ptr(), 1, &mut len),
            AhmStatus::BufferTooSmall
        );
        assert_eq!(len, 3);
        let mut buf = [0.0f64; 3];
        assert_eq!(ahm_mass_result_components(res, buf.as_mut_ptr(), 3, &mut len), AhmStatus::Ok);
        assert!((buf[0] - 4.0 * std::f64::consts::PI).abs() < 1e-5);

        let (mut m2, mut mm, mut has_m) = (0.0, 0.0, false);
        let mut class = AhmClassification::Zero;
        assert_eq!(ahm_mass_result_invariants(res, &mut m2, &mut mm, &mut has_m, &mut class), AhmStatus::Ok);
        assert!(has_m);
        assert_eq!(class, AhmClassification::TimelikeFuture);
        assert!((mm - 4.0 * std::f64::consts::PI).abs() < 1e-5);

        let mut st = AhmLimitStatus::Divergent;
        assert_eq!(ahm_mass_result_status(res, &mut st), AhmStatus::Ok);
        assert_eq!(st, AhmLimitStatus::Converged);

        ahm_mass_result_free(res);
        ahm_metric_free(m);
    }
}

#[test]
fn gauge_handle_and_demo() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(ahm_metric_hyperbolic(2, &mut h), AhmStatus::Ok);
        let mut g = ptr::null_mut();
        assert_eq!(ahm_metric_apply_gauge(h, 1.0, &mut g), AhmStatus::Ok);
        let mut len = 0;
        assert_eq!(ahm_metric_basis_len(g, &mut len), AhmStatus::Ok);
        assert_eq!(len, 3);
        let (mut v, mut e) = (0.0, 0.0);
        assert_eq!(ahm_flux(g, 0, 50.0, &mut v, &mut e), AhmStatus::Ok);
        assert!(v.is_finite() && e >= 0.0);
        assert_eq!(ahm_flux(g, 7, 50.0, &mut v, &mut e), AhmStatus::InvalidArgument);
        ahm_metric_free(g);
        ahm_metric_free(h);

        let (mut c, mut p) = (0.0, 0.0);
        assert_eq!(ahm_gauge_demo(2, 1.0, &mut c, &mut p), AhmStatus::Ok);
        assert!((c - p).abs() <= 1e-3 * p.abs());
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        assert_eq!(ahm_metric_hyperbolic(2, ptr::null_mut()), AhmStatus::NullPointer);
        assert!(last_error().contains("out"));

        let mut x = 0.0;
        assert_eq!(ahm_decompactify(0.0, 1, &mut x), AhmStatus::ChartDomain);
        assert_eq!(ahm_compactify(3.0, 1, &mut x), AhmStatus::Ok);
        let mut r = 0.0;
        assert_eq!(ahm_decompactify(x, 1, &mut r), AhmStatus::Ok);
        assert!((r - 3.0).abs() < 1e-12);

        let mut m = ptr::null_mut();
        assert_ne!(ahm_metric_schwarzschild_ads(1, 1, 0.5, &mut m), AhmStatus::Ok);
        assert!(m.is_null());
        assert!(!last_error().is_empty());

        ahm_metric_free(ptr::null_mut());
        ahm_mass_result_free(ptr::null_mut());
        ahm_string_free(ptr::null_mut());
        assert!(!CStr::from_ptr(ahm_version()).to_bytes().is_empty());
    }
}

#[test]
fn run_json_matches_cli_contract() {
    unsafe {
        let cmd = CString::new("mass").unwrap();
        let cfg = CString::new(r#"{"metric": {"family": "kottler2d", "eta": 1.0}}"#).unwrap();
        let mut report = ptr::null_mut();
        let mut code = -1;
        assert_eq!(ahm_run_json(cmd.as_ptr(), cfg.as_ptr(), &mut report, &mut code), AhmStatus::Ok);
        assert_eq!(code, 0);
        let text = CStr::from_ptr(report).to_str().unwrap().to_owned();
        ahm_string_free(report);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v.get("m2").is_some() && v.get("p").is_some());

        let bad = CString::new(r#"{"metric": {"family": "kottler2d", "eta": 1.0}, "bogus": 1}"#).unwrap();
        assert_eq!(
            ahm_run_json(cmd.as_ptr(), bad.as_ptr(), &mut report, &mut code),
            AhmStatus::InvalidArgument
        );
        let nope = CString::new("explode").unwrap();
        assert_eq!(
            ahm_run_json(nope.as_ptr(), cfg.as_ptr(), &mut report, &mut code),
            AhmStatus::InvalidArgument
        );
        assert!(last_error().contains("explode"));
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/ahmass.h");
    let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", header])
        .output()
    else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(header).unwrap();
    for sym in ["ahm_mass", "ahm_run_json", "ahm_last_error_message", "AHM_STATUS_PANIC"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
}
