use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use hbcs_ffi::*;

fn load(name: &str) -> *mut HbcsSystem {
    let json = CString::new(hbcs::fixtures::source(name).unwrap()).unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { hbcs_system_from_json(json.as_ptr(), &mut sys) }, HbcsStatus::Ok);
    assert!(!sys.is_null());
    sys
}

fn last_error() -> String {
    let p = hbcs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn transfer_of_fixture_b() {
    let sys = load("B");
    let mut n = 0;
    assert_eq!(unsafe { hbcs_system_dim(sys, &mut n) }, HbcsStatus::Ok);
    assert_eq!(n, 1);
    let (mut re, mut im) = ([0.0; 1], [0.0; 1]);
    let status = unsafe { hbcs_transfer_eval(sys, 1.0, 0.0, re.as_mut_ptr(), im.as_mut_ptr(), 1) };
    assert_eq!(status, HbcsStatus::Ok);
    assert!((re[0] - 1.0 / (std::f64::consts::E - 1.0)).abs() <= 1e-9);
    assert_eq!(im[0], 0.0);

    let status = unsafe { hbcs_transfer_eval(sys, 0.0, 0.0, re.as_mut_ptr(), im.as_mut_ptr(), 1) };
    assert_eq!(status, HbcsStatus::Numerical);
    assert!(last_error().contains("boundary matrix singular"));
    unsafe { hbcs_system_free(sys) };
}

#[test]
fn buffers_are_checked() {
    let sys = load("C");
    let (mut re, mut im) = ([0.0; 3], [0.0; 3]);
    let status = unsafe { hbcs_transfer_eval(sys, 1.0, 0.0, re.as_mut_ptr(), im.as_mut_ptr(), 3) };
    assert_eq!(status, HbcsStatus::BufferTooSmall);
    let status = unsafe { hbcs_transfer_eval(sys, 1.0, 0.0, ptr::null_mut(), im.as_mut_ptr(), 4) };
    assert_eq!(status, HbcsStatus::NullPointer);
    unsafe { hbcs_system_free(sys) };
}

#[test]
fn certify_returns_outcome_and_report() {
    let sys = load("F");
    let mut outcome = HbcsOutcome::InvalidInput;
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { hbcs_certify(sys, 12, &mut outcome, &mut report) }, HbcsStatus::Ok);
    assert_eq!(outcome, HbcsOutcome::CertifiedBibo);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_owned();
    unsafe { hbcs_string_free(report) };
    assert!(text.contains("\"triggered_condition\":\"cond3_k0\""), "{text}");
    unsafe { hbcs_system_free(sys) };

    let sys = load("H");
    assert_eq!(unsafe { hbcs_certify(sys, 12, &mut outcome, ptr::null_mut()) }, HbcsStatus::Ok);
    assert_eq!(outcome, HbcsOutcome::Inconclusive);
    unsafe { hbcs_system_free(sys) };
}

#[test]
fn validate_and_simulate() {
    let sys = load("B");
    let mut ok = 0;
    assert_eq!(unsafe { hbcs_validate(sys, 1e-10, &mut ok) }, HbcsStatus::Ok);
    assert_eq!(ok, 1);
    let mut sup = 0.0;
    let u = [1.0];
    assert_eq!(unsafe { hbcs_simulate_constant(sys, u.as_ptr(), 1, 5.0, 1e-2, &mut sup) }, HbcsStatus::Ok);
    assert_eq!(sup, 5.0);
    assert_eq!(unsafe { hbcs_simulate_constant(sys, u.as_ptr(), 2, 5.0, 1e-2, &mut sup) }, HbcsStatus::InvalidInput);
    unsafe { hbcs_system_free(sys) };
}

#[test]
fn parse_failures_name_the_problem() {
    let json = CString::new(r#"{"n": 1, "interval": [0, 1]}"#).unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { hbcs_system_from_json(json.as_ptr(), &mut sys) }, HbcsStatus::Parse);
    assert!(sys.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { hbcs_system_from_json(ptr::null(), &mut sys) }, HbcsStatus::NullPointer);
    assert_eq!(unsafe { hbcs_system_from_json(json.as_ptr(), ptr::null_mut()) }, HbcsStatus::NullPointer);
    unsafe {
        hbcs_system_free(ptr::null_mut());
        hbcs_string_free(ptr::null_mut());
    }
}

#[test]
fn success_clears_last_error() {
    let mut n = 0;
    assert_eq!(unsafe { hbcs_system_dim(ptr::null(), &mut n) }, HbcsStatus::NullPointer);
    let sys = load("A");
    assert!(hbcs_last_error().is_null());
    unsafe { hbcs_system_free(sys) };
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hbcs.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["hbcs_system_from_json", "hbcs_transfer_eval", "hbcs_certify", "hbcs_string_free", "HBCS_STATUS_PANIC = 6"] {
        assert!(text.contains(name), "{name}");
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match std::process::Command::new(&cc).args(["-fsyntax-only", "-x", "c"]).arg(&header).status() {
        Ok(status) => assert!(status.success()),
        Err(e) => eprintln!("skipping C syntax check, {cc} unavailable: {e}"),
    }
}
