//! Band functions of the sector operators, the ground energy of the wedge,
//! the half-space curve `sigma(theta)` and the reference energy `E*`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::{OnceLock, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem2d::{EigenPair, FiberSolver, Mesh2D, Order};
use crate::geometry::{face_angles, GeometryClass, MagneticField, SectorGeometry};
use crate::minimize::{golden_section, refine_samples, scan_then_golden};
use crate::spec1d::{constants, degennes_mu_cached};

/// Uniform grid of Fourier parameters, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for TauGrid {
    fn default() -> Self {
        TauGrid { min: -3.0, max: 4.0, step: 0.1 }
    }
}

impl TauGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.max >= self.min) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tau grid needs min <= max and step > 0, got [{}, {}] step {}",
                self.min, self.max, self.step
            )));
        }
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| self.min + k as f64 * self.step).collect())
    }
}

/// Discretization of the half-plane problems behind `sigma(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaConfig {
    /// Below this angle the `theta = 0` value `Theta0` is returned.
    pub theta_min: f64,
    /// Rectangle `(0,L) x (-L,L)` used for `theta < pi/4`.
    pub rect_length: f64,
    pub rect_n: usize,
    /// Strip along the zero line of the potential used for `theta >= pi/4`.
    pub strip_length: f64,
    pub strip_width: f64,
    pub strip_n_along: usize,
    pub strip_n_across: usize,
    pub order: Order,
    pub tol: f64,
}

impl Default for SigmaConfig {
    fn default() -> Self {
        SigmaConfig {
            theta_min: 0.05,
            rect_length: 20.0,
            rect_n: 60,
            strip_length: 120.0,
            strip_width: 6.0,
            strip_n_along: 240,
            strip_n_across: 48,
            order: Order::Q2,
            tol: 1e-8,
        }
    }
}

/// Mesh and solver parameters of a band computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandConfig {
    #[serde(rename = "L")]
    pub length: f64,
    pub n: usize,
    pub order: Order,
    pub tol: f64,
    /// Width of the final bracket of the golden-section refinement in `tau`.
    pub refine_tol: f64,
    pub taus: TauGrid,
    pub sigma: SigmaConfig,
}

impl Default for BandConfig {
    fn default() -> Self {
        BandConfig {
            length: 20.0,
            n: 160,
            order: Order::Q2,
            tol: 1e-8,
            refine_tol: 1e-4,
            taus: TauGrid::default(),
            sigma: SigmaConfig::default(),
        }
    }
}

impl BandConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidArgument(format!("L must be positive, got {}", self.length)));
        }
        if self.n < 1 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidArgument(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::InvalidArgument("refinement tolerance must be positive".into()));
        }
        self.taus.points().map(|_| ())
    }

    /// `max(2 tol, 5e-3)`: gap below `E*` that counts as strict.
    pub fn margin(&self) -> f64 {
        (2.0 * self.tol).max(5e-3)
    }
}

/// Solver metadata attached to every band value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    #[serde(rename = "L")]
    pub length: f64,
    pub n: usize,
    pub order: u32,
    pub tol: f64,
}

/// Sampled band function with its refined minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandFunction {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub argmin_tau: f64,
    pub min_value: f64,
    pub solver_meta: SolverMeta,
}

/// Lowest eigenvalue of the fiber operators of one `(B, alpha)` pair on
/// `R(alpha, L)`, memoized by `tau`.
pub struct BandSolver {
    pub field: MagneticField,
    pub alpha: f64,
    pub cfg: BandConfig,
    fiber: FiberSolver,
    cache: RwLock<HashMap<u64, (f64, f64)>>,
}

impl BandSolver {
    pub fn new(field: &MagneticField, alpha: f64, cfg: &BandConfig) -> Result<Self> {
        cfg.validate()?;
        let mesh = Mesh2D::rhombus(alpha, cfg.length, cfg.n)?;
        let fiber = FiberSolver::new(mesh, field, cfg.order, cfg.tol)?;
        Ok(BandSolver { field: *field, alpha, cfg: *cfg, fiber, cache: RwLock::new(HashMap::new()) })
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.fiber.mesh
    }

    pub fn fiber(&self) -> &FiberSolver {
        &self.fiber
    }

    pub fn meta(&self) -> SolverMeta {
        SolverMeta { length: self.cfg.length, n: self.cfg.n, order: self.cfg.order.degree(), tol: self.cfg.tol }
    }

    /// Ground state of the fiber at `tau`.
    pub fn pair(&self, tau: f64, hint: Option<f64>) -> Result<EigenPair> {
        let p = self.fiber.lowest(tau, hint)?;
        self.cache.write().expect("band cache poisoned").insert(tau.to_bits(), (p.value, p.residual));
        Ok(p)
    }

    /// `(s(tau), residual)`.
    pub fn value_with_residual(&self, tau: f64, hint: Option<f64>) -> Result<(f64, f64)> {
        if let Some(v) = self.cache.read().expect("band cache poisoned").get(&tau.to_bits()) {
            return Ok(*v);
        }
        let p = self.pair(tau, hint)?;
        Ok((p.value, p.residual))
    }

    pub fn value(&self, tau: f64) -> Result<f64> {
        Ok(self.value_with_residual(tau, None)?.0)
    }

    /// Evaluates the band on `taus` in parallel, then refines the minimum by
    /// golden section to `cfg.refine_tol`.
    pub fn scan(&self, taus: &[f64]) -> Result<BandFunction> {
        if taus.is_empty() {
            return Err(Error::InvalidArgument("empty tau grid".into()));
        }
        let mut taus = taus.to_vec();
        taus.sort_by(f64::total_cmp);
        taus.dedup();
        let results: Vec<(f64, Result<(f64, f64)>)> =
            taus.par_iter().map(|&t| (t, self.value_with_residual(t, None))).collect();
        let mut values = Vec::with_capacity(taus.len());
        let mut residuals = Vec::with_capacity(taus.len());
        let mut failure = None;
        for (t, r) in results {
            match r {
                Ok((v, res)) => {
                    values.push(v);
                    residuals.push(res);
                }
                Err(e) => {
                    if failure.is_none() {
                        failure = Some((t, e));
                    }
                    values.push(f64::NAN);
                    residuals.push(f64::NAN);
                }
            }
        }
        if let Some((tau, e)) = failure {
            let partial = taus.iter().zip(&values).filter(|(_, v)| v.is_finite()).map(|(&t, &v)| (t, v)).collect();
            return Err(Error::BandScan { tau, partial, source: Box::new(e) });
        }
        let samples: Vec<(f64, f64)> = taus.iter().copied().zip(values.iter().copied()).collect();
        let coarse_min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let refined = refine_samples(&samples, |t| Ok(self.value_with_residual(t, Some(coarse_min))?.0), self.cfg.refine_tol)
            .map_err(|e| Error::BandScan { tau: f64::NAN, partial: samples.clone(), source: Box::new(e) })?;
        Ok(BandFunction {
            taus,
            values,
            residuals,
            argmin_tau: refined.arg,
            min_value: refined.value,
            solver_meta: self.meta(),
        })
    }
}

/// `s(B, S_alpha; tau)` on `R(alpha, L)`.
pub fn band_value(field: &MagneticField, alpha: f64, tau: f64, cfg: &BandConfig) -> Result<f64> {
    BandSolver::new(field, alpha, cfg)?.value(tau)
}

pub fn band_scan(field: &MagneticField, alpha: f64, taus: &[f64], cfg: &BandConfig) -> Result<BandFunction> {
    BandSolver::new(field, alpha, cfg)?.scan(taus)
}

/// Ground energy of the wedge together with the comparison quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub alpha: f64,
    pub field: MagneticField,
    #[serde(rename = "E")]
    pub energy: f64,
    pub argmin_tau: f64,
    #[serde(rename = "E_star")]
    pub e_star: f64,
    /// Bottom of the essential spectrum of the fiber at `argmin_tau`.
    #[serde(with = "crate::report::extended_float")]
    pub s_ess_inf: f64,
    /// Predicted limits of the band at `tau -> -inf` and `tau -> +inf`.
    pub s_inf_limits: (f64, f64),
    pub klass: GeometryClass,
    pub theta_plus: f64,
    pub theta_minus: f64,
    /// `E < E* - margin`.
    pub strict: bool,
    pub margin: f64,
}

/// Infimum of the band over `cfg.taus` and the comparison energies.
pub fn ground_energy(field: &MagneticField, alpha: f64, cfg: &BandConfig) -> Result<(EnergyReport, BandFunction)> {
    let geom = face_angles(field, alpha)?;
    let solver = BandSolver::new(field, alpha, cfg)?;
    let band = solver.scan(&cfg.taus.points()?)?;
    let report = energy_report(&geom, &band, cfg)?;
    Ok((report, band))
}

/// Assembles the report for an already computed band.
pub fn energy_report(geom: &SectorGeometry, band: &BandFunction, cfg: &BandConfig) -> Result<EnergyReport> {
    let e_star = e_star(geom, &cfg.sigma)?;
    let margin = cfg.margin();
    Ok(EnergyReport {
        alpha: geom.alpha,
        field: geom.field,
        energy: band.min_value,
        argmin_tau: band.argmin_tau,
        e_star,
        s_ess_inf: ess_spectrum_bottom(geom, band.argmin_tau)?,
        s_inf_limits: s_inf_limits(geom, &cfg.sigma)?,
        klass: geom.klass,
        theta_plus: geom.theta_plus,
        theta_minus: geom.theta_minus,
        strict: band.min_value < e_star - margin,
        margin,
    })
}

/// Ground energy of the half-space with a field at angle `theta` to the boundary.
///
/// `sigma(0) = Theta0` and `sigma(pi/2) = 1` are returned exactly; below
/// `cfg.theta_min` the `theta = 0` value is used. Otherwise the lowest
/// eigenvalue of `-Delta + (x1 cos(theta) - x2 sin(theta))^2` on a truncated
/// half-plane with Neumann condition on `x1 = 0`.
pub fn sigma(theta: f64, cfg: &SigmaConfig) -> Result<f64> {
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::InvalidArgument(format!("sigma needs theta in [0, pi/2], got {theta}")));
    }
    if theta == 0.0 {
        return Ok(constants().theta0_value());
    }
    if (theta - FRAC_PI_2).abs() < 1e-12 {
        return Ok(1.0);
    }
    if theta < cfg.theta_min {
        log::warn!("sigma({theta}) replaced by Theta0: angle below {}", cfg.theta_min);
        return Ok(constants().theta0_value());
    }
    type Key = (u64, [u64; 4], [usize; 4], u32);
    static CACHE: OnceLock<RwLock<HashMap<Key, f64>>> = OnceLock::new();
    let key: Key = (
        theta.to_bits(),
        [cfg.rect_length, cfg.strip_length, cfg.strip_width, cfg.tol].map(f64::to_bits),
        [cfg.rect_n, cfg.strip_n_along, cfg.strip_n_across, 0],
        cfg.order.degree(),
    );
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.read().expect("sigma cache poisoned").get(&key) {
        return Ok(*v);
    }
    let mesh = if theta < FRAC_PI_4 {
        Mesh2D::half_plane(cfg.rect_length, cfg.rect_n)?
    } else {
        Mesh2D::half_plane_strip(theta, cfg.strip_length, cfg.strip_width, cfg.strip_n_along, cfg.strip_n_across)?
    };
    let (s, c) = theta.sin_cos();
    let field = MagneticField::new(s, c, 0.0)?;
    let value = FiberSolver::new(mesh, &field, cfg.order, cfg.tol)?.lowest(0.0, None)?.value;
    cache.write().expect("sigma cache poisoned").insert(key, value);
    Ok(value)
}

/// `E* = sigma(theta0)`, the lowest energy among the two faces and the full space.
pub fn e_star(geom: &SectorGeometry, cfg: &SigmaConfig) -> Result<f64> {
    sigma(geom.theta0, cfg)
}

/// Bottom of the essential spectrum of the fiber operator at `tau`.
///
/// Outgoing fields give a compact resolvent (`+inf`), ingoing fields give `1`;
/// for tangent fields it is `inf_xi mu(xi cos(gamma) + tau sin(gamma)) + (xi sin(gamma) - tau cos(gamma))^2`.
pub fn ess_spectrum_bottom(geom: &SectorGeometry, tau: f64) -> Result<f64> {
    match geom.klass {
        GeometryClass::Outgoing => Ok(f64::INFINITY),
        GeometryClass::Ingoing => Ok(1.0),
        GeometryClass::Tangent => {
            let gamma = geom.field.gamma();
            let (sg, cg) = gamma.sin_cos();
            let f = |xi: f64| Ok(degennes_mu_cached(xi * cg + tau * sg)? + (xi * sg - tau * cg).powi(2));
            // closest point of the line to (xi0, 0) in the rotated variables
            let centre = constants().theta0.arg * cg;
            let r = scan_then_golden(f, centre - 5.0, centre + 5.0, 0.05, 1e-7)?;
            Ok(r.value)
        }
    }
}

/// `liminf` of the band at infinity: `sigma(max(theta+, theta-))` for tangent
/// fields, `E*` otherwise.
pub fn s_infinity(geom: &SectorGeometry, cfg: &SigmaConfig) -> Result<f64> {
    match geom.klass {
        GeometryClass::Tangent => sigma(geom.theta_plus.max(geom.theta_minus), cfg),
        _ => e_star(geom, cfg),
    }
}

/// Predicted band limits `(tau -> -inf, tau -> +inf)`. Large positive `tau`
/// moves the zero line of the potential to the lower face, large negative
/// `tau` to the upper face.
pub fn s_inf_limits(geom: &SectorGeometry, cfg: &SigmaConfig) -> Result<(f64, f64)> {
    match geom.klass {
        GeometryClass::Tangent => {
            let s = s_infinity(geom, cfg)?;
            Ok((s, s))
        }
        _ => {
            let (minus_side, plus_side) = if geom.field.b2 >= 0.0 {
                (geom.theta_plus, geom.theta_minus)
            } else {
                (geom.theta_minus, geom.theta_plus)
            };
            Ok((sigma(minus_side, cfg)?, sigma(plus_side, cfg)?))
        }
    }
}

/// Generalized eigenfunction `psi(x1, x2, x3) = exp(i tau_c x3) Phi(x1, x2)`
/// of the wedge operator built from a fiber ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedEigenfunction {
    pub tau_c: f64,
    pub energy: f64,
    /// Where the nodal values of `Phi` were exported, if anywhere.
    pub profile: Option<String>,
    /// Number of nodal values of `Phi`.
    pub n_values: usize,
}

pub fn extrude_generalized(pair: &EigenPair, tau_c: f64, profile: Option<String>) -> GeneralizedEigenfunction {
    GeneralizedEigenfunction { tau_c, energy: pair.value, profile, n_values: pair.vector.len() }
}

/// Minimum of the band over a bracket by golden section.
pub fn refine_minimum(solver: &BandSolver, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let r = golden_section(|t| solver.value(t), lo, hi, solver.cfg.refine_tol)?;
    Ok((r.arg, r.value))
}
