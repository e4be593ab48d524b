//! One-dimensional model operators.
//!
//! * the de Gennes operator `-d^2/dt^2 + (t - tau)^2` on `(0, inf)` with a
//!   Neumann condition, lowest eigenvalue `mu(tau)`, minimum `Theta0` at `xi0`;
//! * the weighted operator `g_tau` associated with
//!   `q_tau(u) = int (|u'|^2 + (r - tau)^2 |u|^2) r dr`, lowest eigenvalue
//!   `zeta(tau)`, minimum `Xi0` at `tau0`.
//!
//! Both are discretized with piecewise-linear elements on a truncated interval
//! `(0, t_max)` with a Dirichlet condition at `t_max`. All integrals are exact
//! for the piecewise-linear functions, so the discrete eigenvalues are upper
//! bounds that decrease monotonically under refinement and domain growth.
//! The resulting symmetric tridiagonal pencils are solved by Sturm bisection.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::minimize::MinimizerResult;
use crate::minimize::scan_then_golden;

/// Default node count. Piecewise-linear eigenvalues carry an `O(h^2)` error;
/// with `h = 5e-4` it stays below `1e-7` for the ground states used here.
pub const DEFAULT_NODES: usize = 24_001;

/// Peak-relative amplitude allowed in the last unit of the interval.
const DECAY_THRESHOLD: f64 = 1e-6;

// 3-point Gauss-Legendre on [0, 1]
const GAUSS3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub t_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(t_max: f64, n: usize) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) || n < 16 {
            return Err(Error::InvalidArgument(format!(
                "grid needs t_max > 0 and at least 16 nodes (got t_max = {t_max}, n = {n})"
            )));
        }
        Ok(Self { t_max, n })
    }

    /// Truncation `max(12, tau + 10)` with the default node count.
    pub fn for_tau(tau: f64) -> Self {
        Self { t_max: 12f64.max(tau + 10.0), n: DEFAULT_NODES }
    }

    pub fn spacing(&self) -> f64 {
        self.t_max / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }
}

/// Measure used for the inner product: `dt` or `r dr`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    Lebesgue,
    RadialR,
}

impl Weight {
    fn at(self, t: f64) -> f64 {
        match self {
            Weight::Lebesgue => 1.0,
            Weight::RadialR => t,
        }
    }
}

/// A nodal piecewise-linear function on a [`Grid1D`] with its weighted moments.
///
/// With `w` the weight, `norm = int u^2 w`, `moment_sqrt_r = int t u^2 w` and
/// `moment_r2 = int t^2 u^2 w`; for the radial weight these are
/// `||u||^2`, `||sqrt(r) u||^2` and `||r u||^2` in `L^2(r dr)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub weight: Weight,
    pub norm: f64,
    pub moment_sqrt_r: f64,
    pub moment_r2: f64,
    /// `int |u'|^2 w`.
    pub gradient: f64,
}

impl Profile1D {
    /// Builds a profile from nodal values and normalizes it in the weighted space.
    pub fn from_values(grid: Grid1D, mut values: Vec<f64>, weight: Weight) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidArgument(format!(
                "profile has {} values for a grid of {} nodes",
                values.len(),
                grid.n
            )));
        }
        let raw = integrate_moments(&grid, &values, weight);
        if !(raw[0] > 0.0) || !raw[0].is_finite() {
            return Err(Error::InvalidArgument("profile has zero or non-finite norm".into()));
        }
        let scale = raw[0].sqrt().recip();
        values.iter_mut().for_each(|v| *v *= scale);
        let m = integrate_moments(&grid, &values, weight);
        Ok(Self {
            grid,
            values,
            weight,
            norm: m[0],
            moment_sqrt_r: m[1],
            moment_r2: m[2],
            gradient: m[3],
        })
    }

    /// Gaussian trial function `exp(-rho r^2 / 2)` on a grid wide enough for it to decay.
    pub fn gaussian(rho: f64, weight: Weight, n: usize) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("Gaussian parameter must be positive, got {rho}")));
        }
        let grid = Grid1D::new(12f64.max((60.0 / rho).sqrt()), n)?;
        let values = (0..grid.n).map(|i| (-0.5 * rho * grid.node(i).powi(2)).exp()).collect();
        Self::from_values(grid, values, weight)
    }

    /// Evaluates `int (|u'|^2 + (t - tau)^2 |u|^2) w` exactly for the
    /// piecewise-linear function.
    pub fn quadratic_form(&self, tau: f64) -> f64 {
        self.gradient + self.moment_r2 - 2.0 * tau * self.moment_sqrt_r + tau * tau * self.norm
    }
}

/// `[int u^2 w, int t u^2 w, int t^2 u^2 w, int u'^2 w]`, exact for piecewise-linear `u`.
fn integrate_moments(grid: &Grid1D, u: &[f64], weight: Weight) -> [f64; 4] {
    let h = grid.spacing();
    let mut acc = [0.0; 4];
    for i in 0..grid.n - 1 {
        let (t0, u0, u1) = (grid.node(i), u[i], u[i + 1]);
        let slope = (u1 - u0) / h;
        for &(s, w) in &GAUSS3 {
            let t = t0 + s * h;
            let v = u0 + s * (u1 - u0);
            let wt = w * h * weight.at(t);
            acc[0] += wt * v * v;
            acc[1] += wt * t * v * v;
            acc[2] += wt * t * t * v * v;
            acc[3] += wt * slope * slope;
        }
    }
    acc
}

/// Symmetric tridiagonal pencil `K - lambda M` over the nodes `0..n-1`
/// (the last node carries the Dirichlet condition).
struct Pencil {
    k_diag: Vec<f64>,
    k_off: Vec<f64>,
    m_diag: Vec<f64>,
    m_off: Vec<f64>,
}

impl Pencil {
    fn assemble(grid: &Grid1D, tau: f64, weight: Weight) -> Self {
        let dim = grid.n - 1;
        let h = grid.spacing();
        let mut p = Pencil {
            k_diag: vec![0.0; dim],
            k_off: vec![0.0; dim.saturating_sub(1)],
            m_diag: vec![0.0; dim],
            m_off: vec![0.0; dim.saturating_sub(1)],
        };
        for e in 0..grid.n - 1 {
            let t0 = grid.node(e);
            let mut kl = [[0.0; 2]; 2];
            let mut ml = [[0.0; 2]; 2];
            for &(s, w) in &GAUSS3 {
                let t = t0 + s * h;
                let wt = w * h * weight.at(t);
                let phi = [1.0 - s, s];
                let dphi = [-1.0 / h, 1.0 / h];
                let pot = (t - tau) * (t - tau);
                for a in 0..2 {
                    for b in 0..2 {
                        kl[a][b] += wt * (dphi[a] * dphi[b] + pot * phi[a] * phi[b]);
                        ml[a][b] += wt * phi[a] * phi[b];
                    }
                }
            }
            p.k_diag[e] += kl[0][0];
            p.m_diag[e] += ml[0][0];
            if e + 1 < dim {
                p.k_diag[e + 1] += kl[1][1];
                p.m_diag[e + 1] += ml[1][1];
                p.k_off[e] += kl[0][1];
                p.m_off[e] += ml[0][1];
            }
        }
        p
    }

    fn dim(&self) -> usize {
        self.k_diag.len()
    }

    /// Number of eigenvalues strictly below `lambda` (Sylvester inertia).
    fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.dim() {
            let diag = self.k_diag[i] - lambda * self.m_diag[i];
            d = if i == 0 {
                diag
            } else {
                let off = self.k_off[i - 1] - lambda * self.m_off[i - 1];
                diag - off * off / d
            };
            if d == 0.0 {
                d = -f64::EPSILON * diag.abs().max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn lowest_eigenvalue(&self) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.count_below(hi) == 0 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn apply_m(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.m_diag[i] * x[i];
                if i > 0 {
                    y += self.m_off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.m_off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Solves `(K - s M) x = rhs` by the Thomas algorithm.
    fn solve_shifted(&self, s: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut prev_c = 0.0;
        let mut prev_d = 0.0;
        for i in 0..n {
            let diag = self.k_diag[i] - s * self.m_diag[i];
            let lower = if i > 0 { self.k_off[i - 1] - s * self.m_off[i - 1] } else { 0.0 };
            let upper = if i + 1 < n { self.k_off[i] - s * self.m_off[i] } else { 0.0 };
            let denom = diag - lower * prev_c;
            c[i] = upper / denom;
            d[i] = (rhs[i] - lower * prev_d) / denom;
            prev_c = c[i];
            prev_d = d[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            x[i] = d[i] - if i + 1 < n { c[i] * x[i + 1] } else { 0.0 };
        }
        x
    }

    fn ground_state(&self, lambda: f64) -> Vec<f64> {
        let shift = lambda - 1e-9 * lambda.abs().max(1e-3);
        let mut x = vec![1.0; self.dim()];
        for _ in 0..3 {
            let rhs = self.apply_m(&x);
            x = self.solve_shifted(shift, &rhs);
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            x.iter_mut().for_each(|v| *v /= scale);
        }
        if x.iter().sum::<f64>() < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }
}

fn check_truncation(grid: &Grid1D, tau: f64) -> Result<()> {
    if grid.t_max < tau + 10.0 {
        return Err(Error::InvalidArgument(format!(
            "t_max = {} must be at least tau + 10 = {}",
            grid.t_max,
            tau + 10.0
        )));
    }
    Ok(())
}

fn check_decay(grid: &Grid1D, values: &[f64]) -> Result<()> {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tail_start = ((grid.t_max - 1.0) / grid.spacing()).floor().max(0.0) as usize;
    let tail = values[tail_start..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ratio = tail / peak;
    if !(ratio < DECAY_THRESHOLD) {
        return Err(Error::InadequateTruncation { t_max: grid.t_max, ratio });
    }
    Ok(())
}

fn ground_state(tau: f64, grid: &Grid1D, weight: Weight) -> Result<(f64, Profile1D)> {
    check_truncation(grid, tau)?;
    let pencil = Pencil::assemble(grid, tau, weight);
    let lambda = pencil.lowest_eigenvalue();
    let mut values = pencil.ground_state(lambda);
    values.push(0.0);
    check_decay(grid, &values)?;
    let profile = Profile1D::from_values(*grid, values, weight)?;
    Ok((lambda, profile))
}

fn lowest(tau: f64, grid: &Grid1D, weight: Weight) -> Result<f64> {
    check_truncation(grid, tau)?;
    Ok(Pencil::assemble(grid, tau, weight).lowest_eigenvalue())
}

/// Lowest eigenvalue of the de Gennes operator at `tau`.
pub fn degennes_mu(tau: f64, grid: &Grid1D) -> Result<f64> {
    lowest(tau, grid, Weight::Lebesgue)
}

/// Lowest eigenpair of the de Gennes operator; the profile uses the `dt` measure.
pub fn degennes_ground_state(tau: f64, grid: &Grid1D) -> Result<(f64, Profile1D)> {
    ground_state(tau, grid, Weight::Lebesgue)
}

/// Lowest eigenpair `(zeta(tau), z_tau)` of the weighted half-line operator.
pub fn halfline_zeta(tau: f64, grid: &Grid1D) -> Result<(f64, Profile1D)> {
    ground_state(tau, grid, Weight::RadialR)
}

/// Eigenvalue only; same discretization as [`halfline_zeta`].
pub fn halfline_zeta_value(tau: f64, grid: &Grid1D) -> Result<f64> {
    lowest(tau, grid, Weight::RadialR)
}

/// `(||r u||^2, ||sqrt(r) u||^2)` in `L^2(r dr)` for a normalized radial profile.
pub fn moments(p: &Profile1D) -> Result<(f64, f64)> {
    if p.weight != Weight::RadialR {
        return Err(Error::InvalidArgument("moments are defined for radial profiles".into()));
    }
    if (p.norm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!("profile is not normalized (norm {})", p.norm)));
    }
    Ok((p.moment_r2, p.moment_sqrt_r))
}

/// `mu` on the default grid, memoized.
pub fn degennes_mu_cached(tau: f64) -> Result<f64> {
    static CACHE: OnceLock<RwLock<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = tau.to_bits();
    if let Some(v) = cache.read().expect("mu cache poisoned").get(&key) {
        return Ok(*v);
    }
    let v = degennes_mu(tau, &Grid1D::for_tau(tau))?;
    cache.write().expect("mu cache poisoned").insert(key, v);
    Ok(v)
}

/// `(xi0, Theta0)`: minimum of `mu` located by a scan of `[0, 2]` then golden section.
pub fn theta0(tol: f64) -> Result<MinimizerResult> {
    check_tol(tol)?;
    scan_then_golden(|t| degennes_mu(t, &Grid1D::for_tau(t)), 0.0, 2.0, 0.05, tol)
}

/// `(tau0, Xi0)`: minimum of `zeta` located by a scan of `[0, 4]` then golden section.
pub fn xi0(tol: f64) -> Result<MinimizerResult> {
    check_tol(tol)?;
    scan_then_golden(|t| halfline_zeta_value(t, &Grid1D::for_tau(t)), 0.0, 4.0, 0.05, tol)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol < 1e-8 || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!("minimizer tolerance must be >= 1e-8, got {tol}")));
    }
    Ok(())
}

/// Universal constants of the two model operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Constants {
    /// `arg = xi0`, `value = Theta0`.
    pub theta0: MinimizerResult,
    /// `arg = tau0`, `value = Xi0`.
    pub xi0: MinimizerResult,
    /// Normalized `z_{tau0}`.
    pub z_tau0: Profile1D,
}

impl Constants {
    pub fn compute(tol: f64) -> Result<Self> {
        let theta0 = theta0(tol)?;
        let xi0 = xi0(tol)?;
        let (_, z_tau0) = halfline_zeta(xi0.arg, &Grid1D::for_tau(xi0.arg))?;
        Ok(Self { theta0, xi0, z_tau0 })
    }

    pub fn theta0_value(&self) -> f64 {
        self.theta0.value
    }

    pub fn xi0_value(&self) -> f64 {
        self.xi0.value
    }
}

/// Shared constants computed once with tolerance `1e-7`.
///
/// # Panics
/// If the default solves fail, which only happens on a broken build.
pub fn constants() -> &'static Constants {
    static CONSTANTS: OnceLock<Constants> = OnceLock::new();
    CONSTANTS.get_or_init(|| Constants::compute(1e-7).expect("default 1D solves cannot fail"))
}
