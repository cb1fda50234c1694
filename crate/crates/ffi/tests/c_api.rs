use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use zeno_ffi::*;

fn last_error() -> String {
    let p = zeno_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn run(toml: &str) -> Result<*mut ZenoResult, (ZenoStatus, String)> {
    let text = CString::new(toml).unwrap();
    let mut handle = ptr::null_mut();
    let status = unsafe { zeno_run_config(text.as_ptr(), &mut handle) };
    if status == ZenoStatus::Ok {
        Ok(handle)
    } else {
        assert!(handle.is_null());
        Err((status, last_error()))
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(zeno_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn ideal_closed_form() {
    let mut p = f64::NAN;
    assert_eq!(unsafe { zeno_ideal_p2(4, &mut p) }, ZenoStatus::Ok);
    assert!((p - 0.375).abs() < 1e-15);
    assert_eq!(unsafe { zeno_ideal_p2(0, &mut p) }, ZenoStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { zeno_ideal_p2(4, ptr::null_mut()) }, ZenoStatus::NullPointer);
}

#[test]
fn survival_product_reports_validity() {
    let (mut v, mut ok) = (0.0, false);
    let s = unsafe { zeno_survival_product(1_000_000, 1.0, 1.0, &mut v, &mut ok) };
    assert_eq!(s, ZenoStatus::Ok);
    assert!(ok);
    assert!((v - 1.0).abs() < 1e-5);
}

#[test]
fn run_and_inspect_result() {
    let handle = run("[scenario]\nkind = \"ihbw_ideal\"\npulse_count = 4\n").unwrap();
    let key = CString::new("p2_final").unwrap();
    let mut p2 = 0.0;
    assert_eq!(unsafe { zeno_result_summary(handle, key.as_ptr(), &mut p2) }, ZenoStatus::Ok);
    assert!((p2 - 0.375).abs() < 1e-12);

    let missing = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { zeno_result_summary(handle, missing.as_ptr(), &mut p2) },
        ZenoStatus::NotFound
    );

    let (mut samples, mut series) = (0, 0);
    assert_eq!(unsafe { zeno_result_len(handle, &mut samples, &mut series) }, ZenoStatus::Ok);
    assert_eq!(series, 2);
    let (mut t, mut v) = (0.0, 0.0);
    assert_eq!(
        unsafe { zeno_result_population(handle, 1, samples - 1, &mut t, &mut v) },
        ZenoStatus::Ok
    );
    assert!((t - std::f64::consts::PI).abs() < 1e-12);
    assert!((v - p2).abs() < 1e-15);
    assert_eq!(
        unsafe { zeno_result_population(handle, 2, 0, &mut t, &mut v) },
        ZenoStatus::InvalidArgument
    );

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { zeno_result_to_json(handle, &mut json) }, ZenoStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { zeno_string_free(json) };
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["scenario"], "ihbw_ideal");

    unsafe { zeno_result_free(handle) };
}

#[test]
fn config_errors_are_distinguished() {
    let (status, msg) = run("[scenario]\nkind = \"ihbw_ideal\"\nomega_rf = -1.0\n").unwrap_err();
    assert_eq!(status, ZenoStatus::ConfigError);
    assert!(msg.contains("omega_rf"), "{msg}");

    let (status, _) = run("not toml = = =").unwrap_err();
    assert_eq!(status, ZenoStatus::ConfigError);
}

#[test]
fn simulation_errors_are_distinguished() {
    let doc = "[scenario]\nkind = \"ihbw_full\"\npulse_count = 2\n\
               [scenario.integrator]\ntrace_drift_limit = 1e-30\n";
    let (status, msg) = run(doc).unwrap_err();
    assert_eq!(status, ZenoStatus::SimulationError);
    assert!(msg.contains("trace drift"), "{msg}");
}

#[test]
fn null_arguments_are_rejected() {
    let mut handle = ptr::null_mut();
    assert_eq!(unsafe { zeno_run_config(ptr::null(), &mut handle) }, ZenoStatus::NullPointer);
    let mut v = 0.0;
    let key = CString::new("p2_final").unwrap();
    assert_eq!(
        unsafe { zeno_result_summary(ptr::null(), key.as_ptr(), &mut v) },
        ZenoStatus::NullPointer
    );
    unsafe {
        zeno_result_free(ptr::null_mut());
        zeno_string_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/zeno_ffi.h");
    let text = std::fs::read_to_string(header).unwrap();
    for symbol in ["zeno_run_config", "zeno_result_free", "ZENO_STATUS_CONFIG_ERROR"] {
        assert!(text.contains(symbol), "{symbol} missing from header");
    }
    match Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).status() {
        Ok(status) => assert!(status.success()),
        Err(_) => eprintln!("cc not available; skipped syntax check"),
    }
}
