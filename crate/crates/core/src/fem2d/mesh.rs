//! Structured quadrilateral meshes of truncated sectors and half-planes.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary condition carried by a boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryTag {
    /// Face at polar angle `+alpha/2`, Neumann.
    NeumannUpper,
    /// Face at polar angle `-alpha/2`, Neumann.
    NeumannLower,
    /// Truncation boundary, Dirichlet.
    DirichletArtificial,
}

impl BoundaryTag {
    pub fn is_dirichlet(self) -> bool {
        self == BoundaryTag::DirichletArtificial
    }

    fn reflected(self) -> Self {
        match self {
            BoundaryTag::NeumannUpper => BoundaryTag::NeumannLower,
            BoundaryTag::NeumannLower => BoundaryTag::NeumannUpper,
            BoundaryTag::DirichletArtificial => BoundaryTag::DirichletArtificial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Side of the parameter square `[0,1]^2` of a structured mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `u = 0`
    U0,
    /// `u = 1`
    U1,
    /// `v = 0`
    V0,
    /// `v = 1`
    V1,
}

/// Bilinear quadrilateral mesh; element corners are listed counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh2D {
    pub nodes: Vec<[f64; 2]>,
    pub quads: Vec<[usize; 4]>,
    pub boundary: Vec<BoundaryEdge>,
    /// Opening angle; `pi` for the half-plane.
    pub alpha: f64,
    #[serde(rename = "L")]
    pub length: f64,
}

/// Smallest opening accepted by [`Mesh2D::rhombus`].
pub const MIN_RHOMBUS_ALPHA: f64 = 0.02 * PI;

impl Mesh2D {
    /// Image of an `nu x nv` grid on the unit square under `map`; boundary
    /// edges are tagged by `tag(side, midpoint)`.
    pub fn structured<F, G>(nu: usize, nv: usize, map: F, tag: G, alpha: f64, length: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> [f64; 2],
        G: Fn(Side, [f64; 2]) -> BoundaryTag,
    {
        if nu == 0 || nv == 0 {
            return Err(Error::Mesh("structured mesh needs at least one cell per direction".into()));
        }
        let id = |i: usize, j: usize| j * (nu + 1) + i;
        let mut nodes = Vec::with_capacity((nu + 1) * (nv + 1));
        for j in 0..=nv {
            for i in 0..=nu {
                nodes.push(map(i as f64 / nu as f64, j as f64 / nv as f64));
            }
        }
        let mut quads = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            for i in 0..nu {
                quads.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mut boundary = Vec::with_capacity(2 * (nu + nv));
        let mut push = |a: usize, b: usize, side: Side, nodes: &[[f64; 2]]| {
            let mid = [(nodes[a][0] + nodes[b][0]) / 2.0, (nodes[a][1] + nodes[b][1]) / 2.0];
            boundary.push(BoundaryEdge { nodes: [a, b], tag: tag(side, mid) });
        };
        for i in 0..nu {
            push(id(i, 0), id(i + 1, 0), Side::V0, &nodes);
        }
        for j in 0..nv {
            push(id(nu, j), id(nu, j + 1), Side::U1, &nodes);
        }
        for i in (0..nu).rev() {
            push(id(i + 1, nv), id(i, nv), Side::V1, &nodes);
        }
        for j in (0..nv).rev() {
            push(id(0, j + 1), id(0, j), Side::U0, &nodes);
        }
        let mesh = Mesh2D { nodes, quads, boundary, alpha, length };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Truncated sector `R(alpha, L)`: the square `(0,L)^2` rotated by `-pi/4`
    /// and stretched by `tan(alpha/2)` in `x2`.
    pub fn rhombus(alpha: f64, length: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < PI) {
            return Err(Error::Mesh(format!("rhombus mesh needs alpha in (0, pi), got {alpha}")));
        }
        if alpha < MIN_RHOMBUS_ALPHA {
            return Err(Error::Mesh(format!(
                "alpha = {alpha} is below 0.02*pi and too thin to mesh; use the small-angle bounds instead"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Mesh(format!("rhombus mesh needs L > 0, got {length}")));
        }
        let t = (alpha / 2.0).tan();
        let map = |u: f64, v: f64| {
            let (u, v) = (u * length, v * length);
            [(u + v) * FRAC_1_SQRT_2, t * (v - u) * FRAC_1_SQRT_2]
        };
        let tag = |side: Side, _: [f64; 2]| match side {
            Side::U0 => BoundaryTag::NeumannUpper,
            Side::V0 => BoundaryTag::NeumannLower,
            Side::U1 | Side::V1 => BoundaryTag::DirichletArtificial,
        };
        Self::structured(n, n, map, tag, alpha, length)
    }

    /// Rectangle `(0,L) x (-L,L)` with `n x 2n` cells; Neumann on `x1 = 0`.
    pub fn half_plane(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Mesh(format!("half-plane mesh needs L > 0, got {length}")));
        }
        let map = |u: f64, v: f64| [u * length, (2.0 * v - 1.0) * length];
        let tag = |side: Side, mid: [f64; 2]| match side {
            Side::U0 if mid[1] >= 0.0 => BoundaryTag::NeumannUpper,
            Side::U0 => BoundaryTag::NeumannLower,
            _ => BoundaryTag::DirichletArtificial,
        };
        Self::structured(n, 2 * n, map, tag, PI, length)
    }

    /// Part of the half-plane `x1 > 0` within distance `width` of the line
    /// `x1 cos(theta) = x2 sin(theta)`, cut at `x1 = length sin(theta)`: a
    /// parallelogram whose long sides follow the zero line of the potential.
    /// Neumann on `x1 = 0`, Dirichlet elsewhere.
    pub fn half_plane_strip(theta: f64, length: f64, width: f64, n_along: usize, n_across: usize) -> Result<Self> {
        if !(theta > 0.0 && theta <= PI / 2.0) {
            return Err(Error::Mesh(format!("strip mesh needs theta in (0, pi/2], got {theta}")));
        }
        if !(length > 0.0 && width > 0.0 && length.is_finite() && width.is_finite()) {
            return Err(Error::Mesh("strip mesh needs positive length and width".into()));
        }
        let (s, c) = theta.sin_cos();
        let x_end = length * s;
        let map = |u: f64, v: f64| {
            let x1 = u * x_end;
            [x1, x1 * c / s + (2.0 * v - 1.0) * width / s]
        };
        let tag = |side: Side, mid: [f64; 2]| match side {
            Side::U0 if mid[1] >= 0.0 => BoundaryTag::NeumannUpper,
            Side::U0 => BoundaryTag::NeumannLower,
            _ => BoundaryTag::DirichletArtificial,
        };
        Self::structured(n_along, n_across, map, tag, PI, length)
    }

    /// Axis-aligned rectangle with every side Dirichlet.
    pub fn dirichlet_rectangle(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        let map = |u: f64, v: f64| [x.0 + u * (x.1 - x.0), y.0 + v * (y.1 - y.0)];
        Self::structured(nx, ny, map, |_, _| BoundaryTag::DirichletArtificial, PI / 2.0, x.1 - x.0)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn corners(&self, e: usize) -> [[f64; 2]; 4] {
        self.quads[e].map(|k| self.nodes[k])
    }

    /// Jacobian determinant of the bilinear map of element `e` at reference
    /// point `(s, t)` in `[-1,1]^2`.
    pub fn jacobian_det(&self, e: usize, s: f64, t: f64) -> f64 {
        let c = self.corners(e);
        let ds = [(1.0 - t) / 4.0, (1.0 - t) / 4.0, (1.0 + t) / 4.0, (1.0 + t) / 4.0];
        let dt = [(1.0 - s) / 4.0, (1.0 + s) / 4.0, (1.0 + s) / 4.0, (1.0 - s) / 4.0];
        let sign_s = [-1.0, 1.0, 1.0, -1.0];
        let sign_t = [-1.0, -1.0, 1.0, 1.0];
        let mut j = [[0.0; 2]; 2];
        for k in 0..4 {
            for d in 0..2 {
                j[d][0] += sign_s[k] * ds[k] * c[k][d];
                j[d][1] += sign_t[k] * dt[k] * c[k][d];
            }
        }
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let c = self.corners(e);
        let cross = |a: [f64; 2], b: [f64; 2], o: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        0.5 * (cross(c[1], c[2], c[0]) + cross(c[2], c[3], c[0]))
    }

    pub fn area(&self) -> f64 {
        (0..self.quads.len()).map(|e| self.element_area(e)).sum()
    }

    /// Largest distance of a node from the origin.
    pub fn radius(&self) -> f64 {
        self.nodes.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max)
    }

    /// Boundary edges as computed from the connectivity (edges owned by one element).
    pub fn topological_boundary(&self) -> Vec<[usize; 2]> {
        let mut count: HashMap<[usize; 2], usize> = HashMap::new();
        for q in &self.quads {
            for k in 0..4 {
                let (a, b) = (q[k], q[(k + 1) % 4]);
                *count.entry([a.min(b), a.max(b)]).or_default() += 1;
            }
        }
        let mut edges: Vec<[usize; 2]> = count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
        edges.sort_unstable();
        edges
    }

    /// Checks element orientation at the 3x3 Gauss points and that the tagged
    /// edges are exactly the boundary edges, each tagged once.
    pub fn validate(&self) -> Result<()> {
        let g = (0.6f64).sqrt();
        for e in 0..self.quads.len() {
            for s in [-g, 0.0, g] {
                for t in [-g, 0.0, g] {
                    let det = self.jacobian_det(e, s, t);
                    if !(det > 0.0) {
                        return Err(Error::Mesh(format!("element {e} is inverted or degenerate (det J = {det})")));
                    }
                }
            }
        }
        let mut tagged: Vec<[usize; 2]> =
            self.boundary.iter().map(|b| [b.nodes[0].min(b.nodes[1]), b.nodes[0].max(b.nodes[1])]).collect();
        tagged.sort_unstable();
        if tagged.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Mesh("boundary edge tagged more than once".into()));
        }
        if tagged != self.topological_boundary() {
            return Err(Error::Mesh("tagged edges do not match the mesh boundary".into()));
        }
        Ok(())
    }

    /// Renumbers nodes so that new node `k` is old node `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.nodes.len();
        if perm.len() != n {
            return Err(Error::Mesh("permutation length differs from node count".into()));
        }
        let mut inverse = vec![usize::MAX; n];
        for (new, &old) in perm.iter().enumerate() {
            if old >= n || inverse[old] != usize::MAX {
                return Err(Error::Mesh("not a permutation".into()));
            }
            inverse[old] = new;
        }
        Ok(Mesh2D {
            nodes: perm.iter().map(|&old| self.nodes[old]).collect(),
            quads: self.quads.iter().map(|q| q.map(|k| inverse[k])).collect(),
            boundary: self
                .boundary
                .iter()
                .map(|b| BoundaryEdge { nodes: b.nodes.map(|k| inverse[k]), tag: b.tag })
                .collect(),
            alpha: self.alpha,
            length: self.length,
        })
    }

    /// Mirror image under `x2 -> -x2`; upper and lower faces swap.
    pub fn reflected(&self) -> Self {
        Mesh2D {
            nodes: self.nodes.iter().map(|p| [p[0], -p[1]]).collect(),
            quads: self.quads.iter().map(|q| [q[0], q[3], q[2], q[1]]).collect(),
            boundary: self
                .boundary
                .iter()
                .map(|b| BoundaryEdge { nodes: [b.nodes[1], b.nodes[0]], tag: b.tag.reflected() })
                .collect(),
            alpha: self.alpha,
            length: self.length,
        }
    }

    /// Index of the node at `p`, if any, within `tol`.
    pub fn find_node(&self, p: [f64; 2], tol: f64) -> Option<usize> {
        self.nodes.iter().position(|q| (q[0] - p[0]).abs() <= tol && (q[1] - p[1]).abs() <= tol)
    }
}
