//! Magnetic field and wedge parametrization.
//!
//! The wedge is `S_alpha x R` where the sector `S_alpha` is symmetric about the
//! `x1` axis. The upper face has inward normal `n+ = (-sin(a/2), cos(a/2), 0)`
//! and the lower face `n- = (sin(a/2), cos(a/2), 0)`; the face angles are the
//! unoriented angles between the field and those planes.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used to decide that a field is tangent to a face.
pub const TANGENCY_TOL: f64 = 1e-10;

/// A unit magnetic field `B = (b1, b2, b3)`.
///
/// Components may carry any sign; [`canonicalize`] maps a field to the
/// nonnegative octant, which leaves every energy unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagneticField {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl MagneticField {
    /// Normalizes a nonzero vector without touching the signs.
    pub fn new(b1: f64, b2: f64, b3: f64) -> Result<Self> {
        let norm = (b1 * b1 + b2 * b2 + b3 * b3).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "magnetic field ({b1}, {b2}, {b3}) must be a finite nonzero vector"
            )));
        }
        Ok(Self { b1: b1 / norm, b2: b2 / norm, b3: b3 / norm })
    }

    /// `gamma` is the angle to the edge (`x3` axis), `theta` the angle between
    /// the projection `(b1, b2)` and the `x2` axis.
    pub fn from_spherical(gamma: f64, theta: f64) -> Result<Self> {
        let range = 0.0..=FRAC_PI_2;
        if !range.contains(&gamma) || !range.contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "spherical angles must lie in [0, pi/2], got gamma = {gamma}, theta = {theta}"
            )));
        }
        Ok(Self {
            b1: gamma.sin() * theta.sin(),
            b2: gamma.sin() * theta.cos(),
            b3: gamma.cos(),
        })
    }

    pub fn components(&self) -> [f64; 3] {
        [self.b1, self.b2, self.b3]
    }

    /// Angle between the field and the edge, in `[0, pi/2]`.
    pub fn gamma(&self) -> f64 {
        self.b3.abs().min(1.0).acos()
    }

    /// Angle between `(|b1|, |b2|)` and the `x2` axis, in `[0, pi/2]`.
    /// Zero when the field is along the edge.
    pub fn theta(&self) -> f64 {
        let (b1, b2) = (self.b1.abs(), self.b2.abs());
        if b1 == 0.0 && b2 == 0.0 {
            0.0
        } else {
            b1.atan2(b2)
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.b1 >= 0.0 && self.b2 >= 0.0 && self.b3 >= 0.0
    }

    /// Applies sign flips componentwise.
    pub fn flipped(&self, flips: SignFlips) -> Self {
        Self {
            b1: self.b1 * flips.s1 as f64,
            b2: self.b2 * flips.s2 as f64,
            b3: self.b3 * flips.s3 as f64,
        }
    }
}

/// Component signs removed by [`canonicalize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignFlips {
    pub s1: i8,
    pub s2: i8,
    pub s3: i8,
}

impl SignFlips {
    pub const NONE: SignFlips = SignFlips { s1: 1, s2: 1, s3: 1 };
}

/// Normalizes `raw` and moves it to the nonnegative octant.
///
/// Returns the canonical field together with the signs that were removed, so
/// that `field.flipped(flips)` reproduces the normalized input exactly.
pub fn canonicalize(raw: [f64; 3]) -> Result<(MagneticField, SignFlips)> {
    let field = MagneticField::new(raw[0], raw[1], raw[2])?;
    let sign = |x: f64| if x.is_sign_negative() && x != 0.0 { -1 } else { 1 };
    let flips = SignFlips { s1: sign(field.b1), s2: sign(field.b2), s3: sign(field.b3) };
    let canonical = MagneticField { b1: field.b1.abs(), b2: field.b2.abs(), b3: field.b3.abs() };
    Ok((canonical, flips))
}

/// How the field meets the wedge; selects the essential-spectrum regime of
/// the sector operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryClass {
    Outgoing,
    Tangent,
    Ingoing,
}

impl std::fmt::Display for GeometryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GeometryClass::Outgoing => "outgoing",
            GeometryClass::Tangent => "tangent",
            GeometryClass::Ingoing => "ingoing",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorGeometry {
    pub field: MagneticField,
    pub alpha: f64,
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub theta0: f64,
    pub klass: GeometryClass,
}

/// Face angles and classification of `field` relative to the wedge of opening `alpha`.
pub fn face_angles(field: &MagneticField, alpha: f64) -> Result<SectorGeometry> {
    if !(alpha > 0.0 && alpha < 2.0 * PI) || alpha.is_nan() {
        return Err(Error::InvalidArgument(format!("opening angle {alpha} outside (0, 2pi)")));
    }
    if (alpha - PI).abs() < TANGENCY_TOL {
        return Err(Error::InvalidArgument(
            "alpha = pi is the half-space; use the sigma curve instead".into(),
        ));
    }
    let (s, c) = (0.5 * alpha).sin_cos();
    let on_plus = -field.b1 * s + field.b2 * c;
    let on_minus = field.b1 * s + field.b2 * c;
    let face_angle = |x: f64| if x.abs() < TANGENCY_TOL { 0.0 } else { x.abs().min(1.0).asin() };
    let theta_plus = face_angle(on_plus);
    let theta_minus = face_angle(on_minus);

    let gamma = field.gamma();
    let theta = field.theta();
    let klass = if gamma < TANGENCY_TOL || (theta - (PI - alpha).abs() / 2.0).abs() < TANGENCY_TOL {
        GeometryClass::Tangent
    } else if alpha < PI && theta < (PI - alpha) / 2.0 {
        GeometryClass::Outgoing
    } else {
        GeometryClass::Ingoing
    };

    Ok(SectorGeometry {
        field: *field,
        alpha,
        theta_plus,
        theta_minus,
        theta0: theta_plus.min(theta_minus),
        klass,
    })
}
