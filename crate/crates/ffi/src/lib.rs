//! C ABI over `wedge_spectra`.
//!
//! Every function returns a [`WsStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and read with
//! [`ws_last_error_message`]. Band solvers are opaque handles released with
//! [`ws_band_solver_free`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wedge_spectra::band::{energy_report, sigma, BandConfig, BandSolver, SigmaConfig, TauGrid};
use wedge_spectra::bounds::{gaussian_upper_bound, small_angle_upper_bound, strictness_threshold};
use wedge_spectra::fem2d::Order;
use wedge_spectra::geometry::{face_angles, GeometryClass, MagneticField};
use wedge_spectra::spec1d::constants;
use wedge_spectra::Error;

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Mesh = 3,
    Factorization = 4,
    NotConverged = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsGeometryClass {
    Outgoing = 0,
    Tangent = 1,
    Ingoing = 2,
}

impl From<GeometryClass> for WsGeometryClass {
    fn from(k: GeometryClass) -> Self {
        match k {
            GeometryClass::Outgoing => WsGeometryClass::Outgoing,
            GeometryClass::Tangent => WsGeometryClass::Tangent,
            GeometryClass::Ingoing => WsGeometryClass::Ingoing,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WsConstants {
    pub theta0: f64,
    pub xi0: f64,
    pub big_xi0: f64,
    pub tau0: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsGeometry {
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub theta0: f64,
    pub klass: WsGeometryClass,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsEnergyReport {
    pub energy: f64,
    pub argmin_tau: f64,
    pub e_star: f64,
    /// `INFINITY` for outgoing fields.
    pub s_ess_inf: f64,
    pub s_inf_minus: f64,
    pub s_inf_plus: f64,
    pub klass: WsGeometryClass,
    pub strict: bool,
}

/// Mesh and solver parameters of a band solver.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsBandParams {
    pub length: f64,
    pub n: usize,
    /// 1 or 2.
    pub order: u32,
    pub tol: f64,
}

/// Opaque band solver.
pub struct WsBandSolver {
    inner: BandSolver,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> WsStatus {
    match e {
        Error::InvalidArgument(_) | Error::InadequateTruncation { .. } | Error::Json(_) => WsStatus::InvalidArgument,
        Error::Mesh(_) | Error::Assembly(_) => WsStatus::Mesh,
        Error::Factorization { .. } => WsStatus::Factorization,
        Error::NotConverged { .. } => WsStatus::NotConverged,
        Error::BandScan { source, .. } => status_of(source),
        Error::Io(_) => WsStatus::Io,
    }
}

fn guard<F: FnOnce() -> Result<(), Error>>(f: F) -> WsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            WsStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            WsStatus::Panic
        }
    }
}

/// Like [`guard`] but reports null out-pointers with their own code.
fn guard_out<F: FnOnce() -> Result<(), Error>>(ptrs: &[bool], f: F) -> WsStatus {
    if ptrs.iter().any(|&null| null) {
        set_error("null pointer argument".into());
        return WsStatus::NullPointer;
    }
    guard(f)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes). Returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ws_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Default parameters: `L = 20`, `n = 160`, `Q2`, `tol = 1e-8`.
#[no_mangle]
pub extern "C" fn ws_band_params_default() -> WsBandParams {
    let d = BandConfig::default();
    WsBandParams { length: d.length, n: d.n, order: d.order.degree(), tol: d.tol }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_constants(out: *mut WsConstants) -> WsStatus {
    guard_out(&[out.is_null()], || {
        let c = constants();
        *out = WsConstants { theta0: c.theta0_value(), xi0: c.theta0.arg, big_xi0: c.xi0_value(), tau0: c.xi0.arg };
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_face_angles(b1: f64, b2: f64, b3: f64, alpha: f64, out: *mut WsGeometry) -> WsStatus {
    guard_out(&[out.is_null()], || {
        let g = face_angles(&MagneticField::new(b1, b2, b3)?, alpha)?;
        *out = WsGeometry { theta_plus: g.theta_plus, theta_minus: g.theta_minus, theta0: g.theta0, klass: g.klass.into() };
        Ok(())
    })
}

/// Half-space ground energy `sigma(theta)`, `theta` in `[0, pi/2]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_sigma(theta: f64, out: *mut f64) -> WsStatus {
    guard_out(&[out.is_null()], || {
        *out = sigma(theta, &SigmaConfig::default())?;
        Ok(())
    })
}

fn band_config(p: &WsBandParams) -> Result<BandConfig, Error> {
    let cfg = BandConfig { length: p.length, n: p.n, order: Order::from_degree(p.order)?, tol: p.tol, ..BandConfig::default() };
    cfg.validate()?;
    Ok(cfg)
}

/// Creates a band solver for the field `(b1, b2, b3)` on the sector of opening `alpha`.
///
/// # Safety
/// `params` must be readable and `out` valid for writes. On success `*out`
/// owns a solver to be released with [`ws_band_solver_free`].
#[no_mangle]
pub unsafe extern "C" fn ws_band_solver_new(
    b1: f64,
    b2: f64,
    b3: f64,
    alpha: f64,
    params: *const WsBandParams,
    out: *mut *mut WsBandSolver,
) -> WsStatus {
    guard_out(&[params.is_null(), out.is_null()], || {
        *out = ptr::null_mut();
        let cfg = band_config(&*params)?;
        let field = MagneticField::new(b1, b2, b3)?;
        let inner = BandSolver::new(&field, alpha, &cfg)?;
        *out = Box::into_raw(Box::new(WsBandSolver { inner }));
        Ok(())
    })
}

/// # Safety
/// `solver` must come from [`ws_band_solver_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ws_band_solver_free(solver: *mut WsBandSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Number of unknowns of the discretization.
///
/// # Safety
/// `solver` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_band_solver_unknowns(solver: *const WsBandSolver, out: *mut usize) -> WsStatus {
    guard_out(&[solver.is_null(), out.is_null()], || {
        *out = (*solver).inner.fiber().n_unknowns();
        Ok(())
    })
}

/// Lowest eigenvalue of the fiber at `tau` and its relative residual.
///
/// # Safety
/// `solver` must be a live handle; `value` valid for writes; `residual` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ws_band_value(
    solver: *const WsBandSolver,
    tau: f64,
    value: *mut f64,
    residual: *mut f64,
) -> WsStatus {
    guard_out(&[solver.is_null(), value.is_null()], || {
        let (v, r) = (*solver).inner.value_with_residual(tau, None)?;
        *value = v;
        if !residual.is_null() {
            *residual = r;
        }
        Ok(())
    })
}

/// Evaluates the band on the strictly increasing `taus[0..len]` into
/// `values` and refines the minimum.
///
/// # Safety
/// `taus` readable and `values` writable for `len` elements; `argmin`, `min`
/// null or valid.
#[no_mangle]
pub unsafe extern "C" fn ws_band_scan(
    solver: *const WsBandSolver,
    taus: *const f64,
    len: usize,
    values: *mut f64,
    argmin: *mut f64,
    min: *mut f64,
) -> WsStatus {
    guard_out(&[solver.is_null(), taus.is_null(), values.is_null()], || {
        let taus = std::slice::from_raw_parts(taus, len);
        if taus.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("taus must be strictly increasing".into()));
        }
        let band = (*solver).inner.scan(taus)?;
        std::slice::from_raw_parts_mut(values, len).copy_from_slice(&band.values);
        if !argmin.is_null() {
            *argmin = band.argmin_tau;
        }
        if !min.is_null() {
            *min = band.min_value;
        }
        Ok(())
    })
}

/// Ground energy over the grid `[tau_min, tau_max]` with step `tau_step`.
///
/// # Safety
/// `solver` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_ground_energy(
    solver: *const WsBandSolver,
    tau_min: f64,
    tau_max: f64,
    tau_step: f64,
    out: *mut WsEnergyReport,
) -> WsStatus {
    guard_out(&[solver.is_null(), out.is_null()], || {
        let s = &(*solver).inner;
        let taus = TauGrid { min: tau_min, max: tau_max, step: tau_step }.points()?;
        let band = s.scan(&taus)?;
        let geom = face_angles(&s.field, s.alpha)?;
        let r = energy_report(&geom, &band, &s.cfg)?;
        *out = WsEnergyReport {
            energy: r.energy,
            argmin_tau: r.argmin_tau,
            e_star: r.e_star,
            s_ess_inf: r.s_ess_inf,
            s_inf_minus: r.s_inf_limits.0,
            s_inf_plus: r.s_inf_limits.1,
            klass: r.klass.into(),
            strict: r.strict,
        };
        Ok(())
    })
}

/// `b2 Xi0 + C(B) alpha^2`; needs `b2 > 0`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_small_angle_upper_bound(b1: f64, b2: f64, b3: f64, alpha: f64, out: *mut f64) -> WsStatus {
    guard_out(&[out.is_null()], || {
        *out = small_angle_upper_bound(&MagneticField::new(b1, b2, b3)?, alpha)?;
        Ok(())
    })
}

/// Best Gaussian quasimode energy and its parameter `rho`.
///
/// # Safety
/// `bound` must be valid for writes; `rho` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ws_gaussian_upper_bound(
    b1: f64,
    b2: f64,
    b3: f64,
    alpha: f64,
    bound: *mut f64,
    rho: *mut f64,
) -> WsStatus {
    guard_out(&[bound.is_null()], || {
        let (b, r) = gaussian_upper_bound(&MagneticField::new(b1, b2, b3)?, alpha)?;
        *bound = b.bound;
        if !rho.is_null() {
            *rho = r;
        }
        Ok(())
    })
}

/// Opening below which the Gaussian bound certifies `E < E*` on the scan grid.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_strictness_threshold(b1: f64, b2: f64, b3: f64, out: *mut f64) -> WsStatus {
    guard_out(&[out.is_null()], || {
        *out = strictness_threshold(&MagneticField::new(b1, b2, b3)?)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let mut buf = vec![0 as c_char; 256];
        let n = unsafe { ws_last_error_message(buf.as_mut_ptr(), buf.len()) };
        let bytes: Vec<u8> = buf.iter().take(n.min(255)).map(|&c| c as u8).collect();
        String::from_utf8(bytes).unwrap()
    }

    #[test]
    fn status_codes_are_stable() {
        assert_eq!(WsStatus::Ok as i32, 0);
        assert_eq!(WsStatus::InvalidArgument as i32, 1);
        assert_eq!(WsStatus::NotConverged as i32, 5);
        assert_eq!(WsStatus::Panic as i32, 7);
    }

    #[test]
    fn null_out_pointer() {
        assert_eq!(unsafe { ws_sigma(0.3, ptr::null_mut()) }, WsStatus::NullPointer);
        assert_eq!(last_error(), "null pointer argument");
    }

    #[test]
    fn invalid_field_sets_message() {
        let mut g = WsGeometry { theta_plus: 0.0, theta_minus: 0.0, theta0: 0.0, klass: WsGeometryClass::Ingoing };
        let s = unsafe { ws_face_angles(0.0, 0.0, 0.0, 1.0, &mut g) };
        assert_eq!(s, WsStatus::InvalidArgument);
        assert!(!last_error().is_empty());
        let s = unsafe { ws_face_angles(0.0, 1.0, 0.0, 1.0, &mut g) };
        assert_eq!(s, WsStatus::Ok);
        assert_eq!(g.klass, WsGeometryClass::Outgoing);
        assert!(last_error().is_empty());
    }

    #[test]
    fn message_truncation() {
        set_error("abcdef".into());
        let mut buf = [1 as c_char; 4];
        let n = unsafe { ws_last_error_message(buf.as_mut_ptr(), buf.len()) };
        assert_eq!(n, 6);
        assert_eq!(buf, [b'a' as c_char, b'b' as c_char, b'c' as c_char, 0]);
        assert_eq!(unsafe { ws_last_error_message(ptr::null_mut(), 0) }, 6);
    }
}
