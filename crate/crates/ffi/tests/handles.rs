use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ptr;

use wedge_spectra_ffi::*;

fn small_params() -> WsBandParams {
    WsBandParams { length: 6.0, n: 10, ..ws_band_params_default() }
}

#[test]
fn defaults_match_the_reference_setup() {
    let p = ws_band_params_default();
    assert_eq!((p.length, p.n, p.order, p.tol), (20.0, 160, 2, 1e-8));
}

#[test]
fn constants_chain() {
    let mut c = WsConstants::default();
    assert_eq!(unsafe { ws_constants(&mut c) }, WsStatus::Ok);
    assert!(c.theta0 < c.big_xi0 && c.big_xi0 <= (4.0 - PI).sqrt());
    assert!((c.xi0 * c.xi0 - c.theta0).abs() < 1e-5);
}

#[test]
fn solver_lifecycle() {
    let p = small_params();
    let mut s = ptr::null_mut();
    let status = unsafe { ws_band_solver_new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.8 * PI, &p, &mut s) };
    assert_eq!(status, WsStatus::Ok);
    assert!(!s.is_null());

    let mut unknowns = 0;
    assert_eq!(unsafe { ws_band_solver_unknowns(s, &mut unknowns) }, WsStatus::Ok);
    assert!(unknowns > 0);

    let (mut v, mut r) = (0.0, 0.0);
    assert_eq!(unsafe { ws_band_value(s, 0.5, &mut v, &mut r) }, WsStatus::Ok);
    assert!(v > 0.5 && v < 1.5 && r < 1e-8);

    let taus = [-1.0, 0.0, 0.5, 1.0];
    let mut values = [0.0; 4];
    let (mut arg, mut min) = (0.0, 0.0);
    let st = unsafe { ws_band_scan(s, taus.as_ptr(), taus.len(), values.as_mut_ptr(), &mut arg, &mut min) };
    assert_eq!(st, WsStatus::Ok);
    assert_eq!(values[2], v);
    assert!(min <= values.iter().copied().fold(f64::INFINITY, f64::min));

    let unsorted = [1.0, 0.0];
    let st = unsafe { ws_band_scan(s, unsorted.as_ptr(), 2, values.as_mut_ptr(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, WsStatus::InvalidArgument);

    unsafe { ws_band_solver_free(s) };
    unsafe { ws_band_solver_free(ptr::null_mut()) };
}

#[test]
fn bad_parameters_leave_null_handle() {
    let p = WsBandParams { order: 3, ..small_params() };
    let mut s = ptr::NonNull::<WsBandSolver>::dangling().as_ptr();
    let st = unsafe { ws_band_solver_new(0.0, 1.0, 0.0, 1.0, &p, &mut s) };
    assert_eq!(st, WsStatus::InvalidArgument);
    assert!(s.is_null());
    let st = unsafe { ws_band_solver_new(0.0, 1.0, 0.0, 1.0, ptr::null(), &mut s) };
    assert_eq!(st, WsStatus::NullPointer);
}

#[test]
fn bounds_through_the_abi() {
    let mut b = 0.0;
    assert_eq!(unsafe { ws_small_angle_upper_bound(0.0, 0.0, 1.0, 0.1, &mut b) }, WsStatus::InvalidArgument);
    assert_eq!(unsafe { ws_small_angle_upper_bound(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 1e-4, &mut b) }, WsStatus::Ok);
    assert!((b - 0.610).abs() < 1e-3);
    let mut rho = 0.0;
    assert_eq!(unsafe { ws_gaussian_upper_bound(0.0, 1.0, 0.0, 0.5, &mut b, &mut rho) }, WsStatus::Ok);
    assert!(rho > 0.0 && b < (4.0 - PI).sqrt());
    let mut s = 0.0;
    assert_eq!(unsafe { ws_sigma(PI / 2.0, &mut s) }, WsStatus::Ok);
    assert_eq!(s, 1.0);
}
