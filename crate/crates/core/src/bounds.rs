//! Quasimode upper bounds for the ground energy at small openings.
//!
//! A radial trial function `u` is rescaled to `u_sc(r) = sqrt(b2) u(sqrt(b2) r)`
//! and inserted in the polar form of the fiber operator at parameter
//! `tau sqrt(b2)`. Its energy is explicit in `q_tau(u)` and in the moments
//! `||r u||^2`, `||sqrt(r) u||^2` of `u`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{face_angles, MagneticField};
use crate::minimize::{golden_section, scan_then_golden};
use crate::spec1d::{constants, Profile1D, Weight};

/// Nodes of the piecewise-linear Gaussian trial functions. Their energy is
/// integrated exactly, so the bound stays rigorous at any resolution.
pub const GAUSSIAN_NODES: usize = 4001;

/// Step of the opening-angle scan in [`strictness_threshold`].
pub const THRESHOLD_STEP: f64 = 0.01 * PI;

/// `sin(x) / x`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `1 - sinc(x)` without cancellation near zero.
pub fn one_minus_sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        x2 / 6.0 - x2 * x2 / 120.0
    } else {
        1.0 - x.sin() / x
    }
}

/// Trial function behind a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileId {
    /// Ground state of the half-line operator at its minimizing parameter.
    ZTau0,
    /// `exp(-rho r^2 / 2)`.
    Gaussian { rho: f64 },
    /// Any other normalized radial profile.
    Custom,
}

/// The four terms of the quasimode energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    /// `b2 q_tau(u)`.
    pub main: f64,
    /// `alpha^2 / 12 ||r u||^2 b3^2 / b2`.
    pub edge: f64,
    /// `(1 - sinc(alpha)) / 2 ||r u||^2 (b1^2 - b2^2) / b2`.
    pub tilt: f64,
    /// `2 tau b2 (1 - sinc(alpha / 2)) ||sqrt(r) u||^2`.
    pub shift: f64,
}

impl Breakdown {
    pub fn total(&self) -> f64 {
        self.main + self.edge + self.tilt + self.shift
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasimodeBound {
    pub alpha: f64,
    /// Parameter of the half-line form.
    pub tau: f64,
    /// Fiber parameter `tau sqrt(b2)` at which the bound holds.
    pub tau_used: f64,
    pub bound: f64,
    pub breakdown: Breakdown,
    pub profile_id: ProfileId,
}

fn require_b2(field: &MagneticField) -> Result<()> {
    if !(field.b2 > 0.0) {
        return Err(Error::InvalidArgument(
            "quasimode bounds need b2 > 0; the b2 = 0 case has a different limit operator".into(),
        ));
    }
    Ok(())
}

fn require_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0 * PI) {
        return Err(Error::InvalidArgument(format!("opening angle {alpha} outside (0, 2pi)")));
    }
    Ok(())
}

/// Energy of the rescaled radial quasimode built from `profile`; an upper
/// bound for the band function at `tau sqrt(b2)` and hence for `E`.
pub fn quasimode_energy(field: &MagneticField, alpha: f64, tau: f64, profile: &Profile1D) -> Result<QuasimodeBound> {
    quasimode_with_id(field, alpha, tau, profile, ProfileId::Custom)
}

fn quasimode_with_id(
    field: &MagneticField,
    alpha: f64,
    tau: f64,
    profile: &Profile1D,
    profile_id: ProfileId,
) -> Result<QuasimodeBound> {
    require_b2(field)?;
    require_alpha(alpha)?;
    if profile.weight != Weight::RadialR {
        return Err(Error::InvalidArgument("quasimodes need a profile normalized in L^2(r dr)".into()));
    }
    if (profile.norm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!("profile is not normalized (norm {})", profile.norm)));
    }
    let [b1, b2, b3] = field.components();
    let r2 = profile.moment_r2;
    let breakdown = Breakdown {
        main: b2 * profile.quadratic_form(tau),
        edge: alpha * alpha / 12.0 * r2 * b3 * b3 / b2,
        tilt: 0.5 * one_minus_sinc(alpha) * r2 * (b1 * b1 - b2 * b2) / b2,
        shift: 2.0 * tau * b2 * one_minus_sinc(0.5 * alpha) * profile.moment_sqrt_r,
    };
    Ok(QuasimodeBound {
        alpha,
        tau,
        tau_used: tau * b2.sqrt(),
        bound: breakdown.total(),
        breakdown,
        profile_id,
    })
}

/// Quasimode built from `z_{tau0}` at `tau0`.
pub fn z_tau0_bound(field: &MagneticField, alpha: f64) -> Result<QuasimodeBound> {
    let c = constants();
    quasimode_with_id(field, alpha, c.xi0.arg, &c.z_tau0, ProfileId::ZTau0)
}

/// Constant `C(B)` of `E <= b2 Xi0 + C(B) alpha^2`.
pub fn small_angle_constant(field: &MagneticField) -> Result<f64> {
    require_b2(field)?;
    let c = constants();
    let [b1, b2, b3] = field.components();
    let z = &c.z_tau0;
    Ok(((b3 * b3 + (b1 * b1 - b2 * b2).abs()) / b2 * z.moment_r2 + c.xi0.arg * b2 * z.moment_sqrt_r) / 12.0)
}

/// `b2 Xi0 + C(B) alpha^2`.
pub fn small_angle_upper_bound(field: &MagneticField, alpha: f64) -> Result<f64> {
    require_b2(field)?;
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Error::InvalidArgument(format!("small-angle bound needs alpha in (0, pi), got {alpha}")));
    }
    Ok(field.b2 * constants().xi0_value() + small_angle_constant(field)? * alpha * alpha)
}

/// Best Gaussian quasimode: golden section over `log(rho)` with an inner
/// golden section over `tau`. Returns the bound and the optimal `rho`.
pub fn gaussian_upper_bound(field: &MagneticField, alpha: f64) -> Result<(QuasimodeBound, f64)> {
    require_b2(field)?;
    require_alpha(alpha)?;
    let best_for = |rho: f64| -> Result<QuasimodeBound> {
        let profile = Profile1D::gaussian(rho, Weight::RadialR, GAUSSIAN_NODES)?;
        let id = ProfileId::Gaussian { rho };
        let centre = profile.moment_sqrt_r;
        let t = golden_section(
            |tau| Ok(quasimode_with_id(field, alpha, tau, &profile, id)?.bound),
            centre - 4.0,
            centre + 4.0,
            1e-9,
        )?;
        quasimode_with_id(field, alpha, t.arg, &profile, id)
    };
    let outer = scan_then_golden(|lr| Ok(best_for(lr.exp())?.bound), -5.0, 5.0, 0.25, 1e-7)?;
    let rho = outer.arg.exp();
    Ok((best_for(rho)?, rho))
}

/// `sqrt(Theta0^2 cos^2(theta) + sin^2(theta))`, a lower bound for `sigma(theta)`.
pub fn sigma_lower_bound(theta: f64) -> f64 {
    let t0 = constants().theta0_value();
    let (s, c) = theta.sin_cos();
    (t0 * t0 * c * c + s * s).sqrt()
}

/// Largest sampled opening `alpha*` such that at every sampled `alpha <= alpha*`
/// the Gaussian bound lies strictly below the lower bound of `E*`.
///
/// Openings `k pi / 100` are visited in increasing order until the first
/// failure; 0 means the very first sample fails.
pub fn strictness_threshold(field: &MagneticField) -> Result<f64> {
    require_b2(field)?;
    let mut last = 0.0;
    for k in 1..100 {
        let alpha = k as f64 * THRESHOLD_STEP;
        if !certified_strict(field, alpha)? {
            break;
        }
        last = alpha;
    }
    Ok(last)
}

/// Gaussian bound below `sigma_lower_bound(theta0(alpha))`.
pub fn certified_strict(field: &MagneticField, alpha: f64) -> Result<bool> {
    let geom = face_angles(field, alpha)?;
    let (g, _) = gaussian_upper_bound(field, alpha)?;
    Ok(g.bound < sigma_lower_bound(geom.theta0))
}

/// One line of the bound table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub alpha: f64,
    pub bound_z: f64,
    pub bound_gauss: f64,
    pub sigma_lower: f64,
    #[serde(rename = "E_fem")]
    pub e_fem: Option<f64>,
    /// `min(bound_z, bound_gauss) < sigma_lower`.
    pub strict_certified: bool,
}

pub fn bound_row(field: &MagneticField, alpha: f64, e_fem: Option<f64>) -> Result<BoundRow> {
    let geom = face_angles(field, alpha)?;
    let bound_z = z_tau0_bound(field, alpha)?.bound;
    let bound_gauss = gaussian_upper_bound(field, alpha)?.0.bound;
    let sigma_lower = sigma_lower_bound(geom.theta0);
    Ok(BoundRow {
        alpha,
        bound_z,
        bound_gauss,
        sigma_lower,
        e_fem,
        strict_certified: bound_z.min(bound_gauss) < sigma_lower,
    })
}
