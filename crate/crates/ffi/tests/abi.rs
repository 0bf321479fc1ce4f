use std::ffi::{c_char, CStr};
use std::ptr;

use latclock_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { lc_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_static_string() {
    let v = unsafe { CStr::from_ptr(lc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn scenario_load_and_prep() {
    let mut s: *mut LcScenario = ptr::null_mut();
    let st = unsafe { lc_scenario_load(c"sr-breadboard".as_ptr(), ptr::null(), &mut s) };
    assert_eq!(st, LcStatus::Ok);
    assert!(!s.is_null());
    let mut r = LcPrepResult::default();
    assert_eq!(unsafe { lc_prep_run(s, &mut r) }, LcStatus::Ok);
    assert!((r.atom_number - 4.56186e5).abs() < 1.0, "{}", r.atom_number);
    assert_eq!(r.temperature, 2e-6);
    let mut nu = 0.0;
    assert_eq!(unsafe { lc_scenario_clock_frequency(s, &mut nu) }, LcStatus::Ok);
    assert!((nu - 4.29e14).abs() < 1e12);
    unsafe { lc_scenario_free(s) };
}

#[test]
fn unknown_scenario_sets_message() {
    let mut s: *mut LcScenario = ptr::null_mut();
    let st = unsafe { lc_scenario_load(c"hg-breadboard".as_ptr(), ptr::null(), &mut s) };
    assert_eq!(st, LcStatus::UnknownScenario);
    assert!(s.is_null());
    assert!(last_error().contains("hg-breadboard"));
}

#[test]
fn missing_file_is_io() {
    let mut s: *mut LcScenario = ptr::null_mut();
    let st = unsafe { lc_scenario_load(c"sr-breadboard".as_ptr(), c"/nonexistent/x.toml".as_ptr(), &mut s) };
    assert_eq!(st, LcStatus::Io);
}

#[test]
fn null_arguments_rejected() {
    let st = unsafe { lc_scenario_load(ptr::null(), ptr::null(), ptr::null_mut()) };
    assert_eq!(st, LcStatus::NullPointer);
    let mut out = 0.0;
    assert_eq!(
        unsafe { lc_fourier_limited_fwhm(0.3, ptr::null_mut()) },
        LcStatus::NullPointer
    );
    assert_eq!(
        unsafe { lc_trap_depth(ptr::null(), 0.28, 50e-6, 813e-9, 1.0, &mut out) },
        LcStatus::NullPointer
    );
    assert_eq!(unsafe { lc_trace_len(ptr::null()) }, 0);
    unsafe {
        lc_trace_free(ptr::null_mut());
        lc_curve_free(ptr::null_mut());
        lc_scenario_free(ptr::null_mut());
    }
}

#[test]
fn noise_trace_and_allan() {
    let spec = LcNoiseSpec {
        white_fm_h0: 2e-30,
        flicker_fm_hm1: 0.0,
        random_walk_hm2: 0.0,
        linear_drift: 0.0,
        flicker_floor_sigma: 0.0,
    };
    let mut t: *mut LcTrace = ptr::null_mut();
    assert_eq!(
        unsafe { lc_noise_synthesize(&spec, 4096, 1.0, 7, 0, &mut t) },
        LcStatus::Ok
    );
    assert_eq!(unsafe { lc_trace_len(t) }, 4096);
    assert_eq!(unsafe { lc_trace_dt(t) }, 1.0);

    let mut small = vec![0.0; 10];
    assert_eq!(
        unsafe { lc_trace_copy(t, small.as_mut_ptr(), small.len()) },
        LcStatus::OutOfRange
    );
    let mut buf = vec![0.0; 4096];
    assert_eq!(unsafe { lc_trace_copy(t, buf.as_mut_ptr(), buf.len()) }, LcStatus::Ok);

    // Same seed and stream through the FFI and from samples agree.
    let mut t2: *mut LcTrace = ptr::null_mut();
    assert_eq!(
        unsafe { lc_trace_from_samples(buf.as_ptr(), buf.len(), 1.0, &mut t2) },
        LcStatus::Ok
    );

    let mut c: *mut LcCurve = ptr::null_mut();
    assert_eq!(unsafe { lc_allan_overlapping(t, ptr::null(), 0, &mut c) }, LcStatus::Ok);
    let mut c2: *mut LcCurve = ptr::null_mut();
    assert_eq!(
        unsafe { lc_allan_overlapping(t2, ptr::null(), 0, &mut c2) },
        LcStatus::Ok
    );
    let n = unsafe { lc_curve_len(c) };
    assert!(n >= 8);
    let (mut tau, mut sigma) = (0.0, 0.0);
    assert_eq!(unsafe { lc_curve_get(c, 0, &mut tau, &mut sigma) }, LcStatus::Ok);
    assert_eq!(tau, 1.0);
    // h0 = 2e-30 -> sigma(1 s) = sqrt(h0/2) = 1e-15
    assert!((sigma / 1e-15 - 1.0).abs() < 0.05, "{sigma}");
    let (mut tau2, mut sigma2) = (0.0, 0.0);
    assert_eq!(unsafe { lc_curve_get(c2, 0, &mut tau2, &mut sigma2) }, LcStatus::Ok);
    assert_eq!((tau, sigma), (tau2, sigma2));
    assert_eq!(
        unsafe { lc_curve_get(c, n, &mut tau, &mut sigma) },
        LcStatus::OutOfRange
    );

    let bad = [3.0, 2.0];
    let mut c3: *mut LcCurve = ptr::null_mut();
    assert_eq!(
        unsafe { lc_allan_overlapping(t, bad.as_ptr(), 2, &mut c3) },
        LcStatus::InvalidInput
    );
    assert!(c3.is_null());
    unsafe {
        lc_curve_free(c);
        lc_curve_free(c2);
        lc_trace_free(t);
        lc_trace_free(t2);
    }
}

#[test]
fn scalar_physics() {
    assert!((lc_rabi_probability(0.0, std::f64::consts::PI, 1.0) - 1.0).abs() < 1e-15);
    let mut f = 0.0;
    assert_eq!(unsafe { lc_fourier_limited_fwhm(0.3, &mut f) }, LcStatus::Ok);
    assert!((f - 2.66).abs() < 0.01);
    assert_eq!(unsafe { lc_fourier_limited_fwhm(-1.0, &mut f) }, LcStatus::InvalidInput);
    let mut depth = 0.0;
    assert_eq!(
        unsafe { lc_trap_depth(c"Sr88".as_ptr(), 0.28, 50e-6, 813e-9, 1.0, &mut depth) },
        LcStatus::Ok
    );
    assert!((depth - 5e-6).abs() < 1e-15);
    assert_eq!(
        unsafe { lc_trap_depth(c"Xx1".as_ptr(), 0.28, 50e-6, 813e-9, 1.0, &mut depth) },
        LcStatus::InvalidInput
    );
    let mut q = 0.0;
    let fwhm = 0.7990 / 0.3;
    assert_eq!(
        unsafe { lc_qpn_limit(fwhm, 4.29e14, 1e5, 1.5, 1.0, &mut q) },
        LcStatus::Ok
    );
    assert!((q - 2.4e-17).abs() < 0.1e-17, "{q}");
}

#[test]
fn header_is_committed_and_current() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/latclock.h")).unwrap();
    for sym in [
        "lc_scenario_load",
        "lc_noise_synthesize",
        "lc_allan_overlapping",
        "lc_trace_copy",
        "lc_last_error",
        "typedef struct LcTrace LcTrace;",
        "LC_STATUS_NULL_POINTER = 1",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}
