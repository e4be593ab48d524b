//! Finite elements for the fiber operators on truncated sectors.

pub mod assemble;
pub mod cholesky;
pub mod lanczos;
pub mod mesh;
pub mod scalar;
pub mod space;
pub mod sparse;

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use assemble::{assemble, FiberFamily};
pub use cholesky::SkylineLayout;
pub use lanczos::LanczosOptions;
pub use mesh::{BoundaryEdge, BoundaryTag, Mesh2D};
pub use space::{FeSpace, Order};
pub use sparse::SparseHermitian;

use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::geometry::MagneticField;
use scalar::Scalar;

/// Eigenvalue with its eigenvector and relative residual
/// `||A v - lambda M v|| / ||M v||`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// `M`-normalized. Pairs produced by [`FiberSolver`] carry one entry per
    /// dof of the space, zero on Dirichlet dofs, vertex dofs first.
    pub vector: Vec<Complex64>,
    pub residual: f64,
}

fn to_pairs<T: Scalar>(raw: Vec<lanczos::RawPair<T>>) -> Vec<EigenPair> {
    raw.into_iter()
        .map(|p| EigenPair { value: p.value, vector: p.vector.iter().map(|x| x.to_complex()).collect(), residual: p.residual })
        .collect()
}

/// The `k` smallest eigenpairs of `A v = lambda M v`, vectors on the unknowns.
pub fn lowest_eigenpairs<T: Scalar>(
    a: &SparseHermitian<T>,
    m: &SparseHermitian<T>,
    k: usize,
    tol: f64,
) -> Result<Vec<EigenPair>> {
    let layout = SkylineLayout::new(&a.pattern());
    let opts = LanczosOptions { tol, ..LanczosOptions::default() };
    lanczos::lowest_eigenpairs(a, m, k, &opts, &layout).map(to_pairs)
}

#[derive(Debug, Clone)]
enum Family {
    Real(FiberFamily<f64>),
    Complex(FiberFamily<Complex64>),
}

/// Assembled fiber family on one mesh with a reusable fill-reducing ordering.
/// Real arithmetic is used when `b3 = 0`.
#[derive(Debug, Clone)]
pub struct FiberSolver {
    pub mesh: Mesh2D,
    family: Family,
    layout: SkylineLayout,
    pub options: LanczosOptions,
}

impl FiberSolver {
    pub fn new(mesh: Mesh2D, field: &MagneticField, order: Order, tol: f64) -> Result<Self> {
        let family = if field.b3 == 0.0 {
            Family::Real(FiberFamily::new(&mesh, field, order)?)
        } else {
            Family::Complex(FiberFamily::new(&mesh, field, order)?)
        };
        let pattern = match &family {
            Family::Real(f) => &f.pattern,
            Family::Complex(f) => &f.pattern,
        };
        if pattern.dim == 0 {
            return Err(Error::Mesh("mesh has no interior degrees of freedom".into()));
        }
        let layout = SkylineLayout::new(pattern);
        Ok(FiberSolver { mesh, family, layout, options: LanczosOptions { tol, ..LanczosOptions::default() } })
    }

    pub fn is_real(&self) -> bool {
        matches!(self.family, Family::Real(_))
    }

    pub fn space(&self) -> &FeSpace {
        match &self.family {
            Family::Real(f) => &f.space,
            Family::Complex(f) => &f.space,
        }
    }

    pub fn n_unknowns(&self) -> usize {
        self.space().n_free()
    }

    /// Lowest `k` eigenpairs of the fiber at `tau`.
    pub fn solve(&self, tau: f64, k: usize) -> Result<Vec<EigenPair>> {
        self.solve_with_hint(tau, k, None)
    }

    /// As [`FiberSolver::solve`], with an estimate of the lowest eigenvalue
    /// used to place the shift.
    pub fn solve_with_hint(&self, tau: f64, k: usize, hint: Option<f64>) -> Result<Vec<EigenPair>> {
        let opts = LanczosOptions { shift_hint: hint, ..self.options };
        let space = self.space();
        let pairs = match &self.family {
            Family::Real(f) => {
                to_pairs(lanczos::lowest_eigenpairs(&f.operator(tau), &f.mass_matrix(), k, &opts, &self.layout)?)
            }
            Family::Complex(f) => {
                to_pairs(lanczos::lowest_eigenpairs(&f.operator(tau), &f.mass_matrix(), k, &opts, &self.layout)?)
            }
        };
        Ok(pairs
            .into_iter()
            .map(|p| EigenPair { vector: space.expand(&p.vector, Complex64::new(0.0, 0.0)), ..p })
            .collect())
    }

    /// Lowest eigenvalue at `tau`.
    pub fn lowest(&self, tau: f64, hint: Option<f64>) -> Result<EigenPair> {
        Ok(self.solve_with_hint(tau, 1, hint)?.remove(0))
    }
}

/// Outcome of the Agmon decay fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DecayRate {
    /// Fitted exponential rate `nu` of the radial envelope.
    Rate(f64),
    /// Envelope under floating-point noise across the fitting window.
    FullyDecayed,
}

impl DecayRate {
    /// Rate, with `+inf` for a fully decayed envelope.
    pub fn value(self) -> f64 {
        match self {
            DecayRate::Rate(r) => r,
            DecayRate::FullyDecayed => f64::INFINITY,
        }
    }
}

const DECAY_BINS: usize = 24;
const NOISE_FLOOR: f64 = 1e-13;

/// Least-squares slope of `-log max_{|x| ~ r} |v(x)|` over
/// `r in [0.2, 0.6] * extent`, where `extent` is the largest distance of a
/// mesh node from the origin.
pub fn decay_rate(pair: &EigenPair, mesh: &Mesh2D) -> Result<DecayRate> {
    if pair.vector.len() < mesh.n_nodes() {
        return Err(Error::InvalidArgument("eigenvector shorter than the node count".into()));
    }
    let extent = mesh.radius();
    let (lo, hi) = (0.2 * extent, 0.6 * extent);
    let width = (hi - lo) / DECAY_BINS as f64;
    let peak = pair.vector[..mesh.n_nodes()].iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::InvalidArgument("zero eigenvector".into()));
    }
    let mut envelope = vec![0.0f64; DECAY_BINS];
    for (p, v) in mesh.nodes.iter().zip(&pair.vector) {
        let r = p[0].hypot(p[1]);
        if r >= lo && r < hi {
            let b = (((r - lo) / width) as usize).min(DECAY_BINS - 1);
            envelope[b] = envelope[b].max(v.norm());
        }
    }
    let points: Vec<(f64, f64)> = envelope
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > NOISE_FLOOR * peak)
        .map(|(b, &e)| (lo + (b as f64 + 0.5) * width, e.ln()))
        .collect();
    if points.len() < 3 {
        return Ok(DecayRate::FullyDecayed);
    }
    let n = points.len() as f64;
    let mr = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mr) * (p.1 - ml)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mr).powi(2)).sum();
    Ok(DecayRate::Rate(-sxy / sxx))
}

/// Writes the vertex values of an eigenvector as a whitespace-separated table.
pub fn write_eigenvector<W: Write>(mut out: W, mesh: &Mesh2D, pair: &EigenPair) -> Result<()> {
    if pair.vector.len() < mesh.n_nodes() {
        return Err(Error::InvalidArgument("eigenvector shorter than the node count".into()));
    }
    writeln!(out, "x1 x2 re(v) im(v) |v|")?;
    for (p, v) in mesh.nodes.iter().zip(&pair.vector) {
        writeln!(out, "{} {} {} {} {}", fmt_num(p[0]), fmt_num(p[1]), fmt_num(v.re), fmt_num(v.im), fmt_num(v.norm()))?;
    }
    Ok(())
}

/// Largest modulus on the elements touching the Dirichlet boundary relative to the global peak.
pub fn boundary_ratio(pair: &EigenPair, mesh: &Mesh2D) -> f64 {
    let peak = pair.vector[..mesh.n_nodes()].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut on_boundary = vec![false; mesh.n_nodes()];
    for b in mesh.boundary.iter().filter(|b| b.tag.is_dirichlet()) {
        on_boundary[b.nodes[0]] = true;
        on_boundary[b.nodes[1]] = true;
    }
    // Dirichlet nodes are zero; look one layer inside, at the neighbours of the boundary
    let mut near = vec![false; mesh.n_nodes()];
    for q in &mesh.quads {
        if q.iter().any(|&k| on_boundary[k]) {
            q.iter().for_each(|&k| near[k] = true);
        }
    }
    let edge = (0..mesh.n_nodes()).filter(|&k| near[k]).map(|k| pair.vector[k].norm()).fold(0.0, f64::max);
    edge / peak
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_vector_has_no_decay() {
        let mesh = Mesh2D::rhombus(0.5 * PI, 10.0, 20).unwrap();
        let pair = EigenPair { value: 0.0, vector: vec![Complex64::new(1.0, 0.0); mesh.n_nodes()], residual: 0.0 };
        match decay_rate(&pair, &mesh).unwrap() {
            DecayRate::Rate(r) => assert!(r.abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exponential_vector_rate_is_recovered() {
        let mesh = Mesh2D::rhombus(0.5 * PI, 10.0, 40).unwrap();
        let vector = mesh.nodes.iter().map(|p| Complex64::new((-0.7 * p[0].hypot(p[1])).exp(), 0.0)).collect();
        let pair = EigenPair { value: 0.0, vector, residual: 0.0 };
        let rate = decay_rate(&pair, &mesh).unwrap().value();
        assert!((rate - 0.7).abs() < 5e-3, "{rate}");
        let vector = mesh.nodes.iter().map(|p| Complex64::new((-40.0 * p[0].hypot(p[1])).exp(), 0.0)).collect();
        let pair = EigenPair { value: 0.0, vector, residual: 0.0 };
        assert_eq!(decay_rate(&pair, &mesh).unwrap(), DecayRate::FullyDecayed);
    }

    #[test]
    fn export_format() {
        let mesh = Mesh2D::rhombus(0.5 * PI, 1.0, 1).unwrap();
        let pair = EigenPair { value: 1.0, vector: vec![Complex64::new(0.5, -0.25); 4], residual: 0.0 };
        let mut out = Vec::new();
        write_eigenvector(&mut out, &mesh, &pair).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1 x2 re(v) im(v) |v|");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1].split(' ').count(), 5);
        assert!(lines[1].starts_with("0 0 0.5 -0.25 0.559016994375"));
    }

    #[test]
    fn real_path_chosen_without_edge_component() {
        let mesh = Mesh2D::rhombus(0.5 * PI, 2.0, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let real = FiberSolver::new(mesh.clone(), &MagneticField::new(s, s, 0.0).unwrap(), Order::Q1, 1e-8).unwrap();
        assert!(real.is_real());
        let cplx = FiberSolver::new(mesh, &MagneticField::new(0.0, s, s).unwrap(), Order::Q1, 1e-8).unwrap();
        assert!(!cplx.is_real());
    }
}
