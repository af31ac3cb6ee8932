use std::ffi::{CStr, CString};
use std::ptr;

use siegel_moduli_ffi::*;

fn point(g: usize, x: &[f64], y: &[f64]) -> *mut SmPoint {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sm_point_new(g, x.as_ptr(), y.as_ptr(), &mut p) }, SmStatus::Ok);
    p
}

fn last_error() -> String {
    let m = sm_last_error_message();
    assert!(!m.is_null());
    unsafe { CStr::from_ptr(m) }.to_str().unwrap().to_owned()
}

#[test]
fn distance_of_i_and_2i() {
    let (a, b) = (point(1, &[0.0], &[1.0]), point(1, &[0.0], &[2.0]));
    let mut d = 0.0;
    assert_eq!(unsafe { sm_distance(a, b, &mut d) }, SmStatus::Ok);
    assert!((d - 2f64.ln()).abs() < 1e-12);
    let big = point(2, &[0.0, 0.0, 0.0, 0.0], &[2.0, 0.0, 0.0, 1.0]);
    assert_eq!(unsafe { sm_distance(a, big, &mut d) }, SmStatus::Ok);
    assert!((d - 2f64.ln()).abs() < 1e-12);
    unsafe {
        sm_point_free(a);
        sm_point_free(b);
        sm_point_free(big);
    }
}

#[test]
fn reduce_and_read_back() {
    let p = point(1, &[0.3], &[0.4]);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { sm_reduce(p, &mut r) }, SmStatus::Ok);
    let (mut x, mut y) = ([0.0], [0.0]);
    assert_eq!(
        unsafe { sm_point_matrices(r, x.as_mut_ptr(), y.as_mut_ptr()) },
        SmStatus::Ok
    );
    assert!((x[0] + 0.2).abs() < 1e-12 && (y[0] - 1.6).abs() < 1e-12);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { sm_point_to_json(r, &mut json) }, SmStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { sm_point_from_json(json, &mut back) }, SmStatus::Ok);
    let mut d = 1.0;
    assert_eq!(unsafe { sm_distance(r, back, &mut d) }, SmStatus::Ok);
    assert!(d < 1e-12);

    let mut e = ptr::null_mut();
    assert_eq!(unsafe { sm_embed(r, 3, &mut e) }, SmStatus::Ok);
    assert_eq!(unsafe { sm_point_genus(e) }, 3);
    unsafe {
        sm_string_free(json);
        for q in [p, r, back, e] {
            sm_point_free(q);
        }
    }
}

#[test]
fn periods_and_volume() {
    let pts = [-1.0, 0.0, 1.0];
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { sm_curve_new(pts.as_ptr(), 3, &mut c) }, SmStatus::Ok);
    let mut z = ptr::null_mut();
    assert_eq!(unsafe { sm_period_matrix(c, true, &mut z) }, SmStatus::Ok);
    let (mut x, mut y) = ([0.0], [0.0]);
    unsafe { sm_point_matrices(z, x.as_mut_ptr(), y.as_mut_ptr()) };
    assert!(x[0].abs() < 1e-9 && (y[0] - 1.0).abs() < 1e-9);
    unsafe {
        sm_point_free(z);
        sm_curve_free(c);
    }
    let (mut v, mut s) = (0.0, 0.0);
    assert_eq!(unsafe { sm_volume(1, true, 0, 0, 1, &mut v, &mut s) }, SmStatus::Ok);
    assert!((v - std::f64::consts::PI / 3.0).abs() < 1e-10);
    assert_eq!(
        unsafe { sm_volume(3, false, 100, 1, 1, &mut v, &mut s) },
        SmStatus::Unsupported
    );
}

#[test]
fn strata_as_json() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sm_strata_json(3, false, &mut s) }, SmStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
    unsafe { sm_string_free(s) };
}

#[test]
fn errors_are_reported() {
    let mut p = ptr::null_mut();
    let status = unsafe { sm_point_new(1, [0.0].as_ptr(), [-1.0].as_ptr(), &mut p) };
    assert_eq!(status, SmStatus::NotPositiveDefinite);
    assert!(p.is_null());
    assert!(last_error().contains("positive definite"));

    assert_eq!(
        unsafe { sm_point_new(1, ptr::null(), [1.0].as_ptr(), &mut p) },
        SmStatus::NullPointer
    );
    let bad = CString::new("{\"g\":1").unwrap();
    assert_eq!(
        unsafe { sm_point_from_json(bad.as_ptr(), &mut p) },
        SmStatus::InvalidJson
    );
    let mut c = ptr::null_mut();
    assert_eq!(
        unsafe { sm_curve_new([0.0, 1.0].as_ptr(), 2, &mut c) },
        SmStatus::InvalidCurve
    );

    let ok = point(1, &[0.0], &[1.0]);
    assert!(sm_last_error_message().is_null());
    unsafe { sm_point_free(ok) };
    assert_eq!(unsafe { sm_point_genus(ptr::null()) }, 0);
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/siegel_moduli.h")).unwrap();
    for name in [
        "sm_point_new",
        "sm_point_free",
        "sm_distance",
        "sm_reduce",
        "sm_period_matrix",
        "sm_volume",
        "sm_strata_json",
        "sm_last_error_message",
        "SM_STATUS_NOT_POSITIVE_DEFINITE = 10",
        "typedef struct SmPoint SmPoint",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
