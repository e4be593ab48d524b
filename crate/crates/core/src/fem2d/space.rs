//! Lagrange Q1/Q2 spaces on quadrilateral meshes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::mesh::Mesh2D;
use crate::error::{Error, Result};

/// Polynomial degree per direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Q1,
    Q2,
}

impl Order {
    pub fn from_degree(k: u32) -> Result<Self> {
        match k {
            1 => Ok(Order::Q1),
            2 => Ok(Order::Q2),
            _ => Err(Error::InvalidArgument(format!("element order must be 1 or 2, got {k}"))),
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            Order::Q1 => 1,
            Order::Q2 => 2,
        }
    }

    pub fn dofs_per_element(self) -> usize {
        match self {
            Order::Q1 => 4,
            Order::Q2 => 9,
        }
    }

    /// Tensor Gauss rule: 2x2 for Q1, 3x3 for Q2.
    pub fn quadrature(self) -> Vec<(f64, f64, f64)> {
        let rule: &[(f64, f64)] = match self {
            Order::Q1 => &[(-0.577_350_269_189_625_8, 1.0), (0.577_350_269_189_625_8, 1.0)],
            Order::Q2 => &[
                (-0.774_596_669_241_483_4, 5.0 / 9.0),
                (0.0, 8.0 / 9.0),
                (0.774_596_669_241_483_4, 5.0 / 9.0),
            ],
        };
        let mut points = Vec::with_capacity(rule.len() * rule.len());
        for &(t, wt) in rule {
            for &(s, ws) in rule {
                points.push((s, t, ws * wt));
            }
        }
        points
    }

    /// Tensor indices of local dofs: corners counterclockwise, then edge
    /// midpoints (edge `k` joins corners `k` and `k+1`), then the centre.
    fn local_indices(self) -> &'static [(usize, usize)] {
        match self {
            Order::Q1 => &[(0, 0), (1, 0), (1, 1), (0, 1)],
            Order::Q2 => &[(0, 0), (2, 0), (2, 2), (0, 2), (1, 0), (2, 1), (1, 2), (0, 1), (1, 1)],
        }
    }

    fn lagrange_1d(self, s: f64) -> ([f64; 3], [f64; 3]) {
        match self {
            Order::Q1 => ([(1.0 - s) / 2.0, (1.0 + s) / 2.0, 0.0], [-0.5, 0.5, 0.0]),
            Order::Q2 => (
                [s * (s - 1.0) / 2.0, 1.0 - s * s, s * (s + 1.0) / 2.0],
                [s - 0.5, -2.0 * s, s + 0.5],
            ),
        }
    }

    /// Values and reference gradients of the local basis at `(s, t)`.
    pub fn basis(self, s: f64, t: f64) -> (Vec<f64>, Vec<[f64; 2]>) {
        let (ls, dls) = self.lagrange_1d(s);
        let (lt, dlt) = self.lagrange_1d(t);
        let idx = self.local_indices();
        let values = idx.iter().map(|&(a, b)| ls[a] * lt[b]).collect();
        let grads = idx.iter().map(|&(a, b)| [dls[a] * lt[b], ls[a] * dlt[b]]).collect();
        (values, grads)
    }
}

/// Degrees of freedom of a Lagrange space. Vertex dofs come first and carry
/// the mesh node numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct FeSpace {
    pub order: Order,
    pub n_dofs: usize,
    /// `dofs_per_element` entries per element.
    pub element_dofs: Vec<usize>,
    pub coords: Vec<[f64; 2]>,
    pub dirichlet: Vec<bool>,
    /// Position among the unknowns, `None` for Dirichlet dofs.
    pub free_index: Vec<Option<usize>>,
    pub free_dofs: Vec<usize>,
}

impl FeSpace {
    pub fn new(mesh: &Mesh2D, order: Order) -> Result<Self> {
        let n_nodes = mesh.n_nodes();
        let mut coords = mesh.nodes.clone();
        let mut edge_dof: HashMap<[usize; 2], usize> = HashMap::new();
        let per = order.dofs_per_element();
        let mut element_dofs = Vec::with_capacity(per * mesh.quads.len());
        for (e, q) in mesh.quads.iter().enumerate() {
            element_dofs.extend_from_slice(q);
            if order == Order::Q2 {
                let c = mesh.corners(e);
                for k in 0..4 {
                    let (a, b) = (q[k], q[(k + 1) % 4]);
                    let key = [a.min(b), a.max(b)];
                    let id = *edge_dof.entry(key).or_insert_with(|| {
                        let (p, r) = (c[k], c[(k + 1) % 4]);
                        coords.push([(p[0] + r[0]) / 2.0, (p[1] + r[1]) / 2.0]);
                        coords.len() - 1
                    });
                    element_dofs.push(id);
                }
                let centre = [
                    c.iter().map(|p| p[0]).sum::<f64>() / 4.0,
                    c.iter().map(|p| p[1]).sum::<f64>() / 4.0,
                ];
                coords.push(centre);
                element_dofs.push(coords.len() - 1);
            }
        }
        let n_dofs = coords.len();
        let mut dirichlet = vec![false; n_dofs];
        for b in mesh.boundary.iter().filter(|b| b.tag.is_dirichlet()) {
            let [a, c] = b.nodes;
            if a >= n_nodes || c >= n_nodes {
                return Err(Error::Mesh("boundary edge refers to a missing node".into()));
            }
            dirichlet[a] = true;
            dirichlet[c] = true;
            if order == Order::Q2 {
                let id = edge_dof
                    .get(&[a.min(c), a.max(c)])
                    .ok_or_else(|| Error::Mesh("tagged edge is not an element edge".into()))?;
                dirichlet[*id] = true;
            }
        }
        let mut free_index = vec![None; n_dofs];
        let mut free_dofs = Vec::new();
        for d in 0..n_dofs {
            if !dirichlet[d] {
                free_index[d] = Some(free_dofs.len());
                free_dofs.push(d);
            }
        }
        Ok(FeSpace { order, n_dofs, element_dofs, coords, dirichlet, free_index, free_dofs })
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn dofs_of(&self, e: usize) -> &[usize] {
        let per = self.order.dofs_per_element();
        &self.element_dofs[e * per..(e + 1) * per]
    }

    /// Expands a vector of unknowns to all dofs, with zeros on Dirichlet dofs.
    pub fn expand<T: Copy>(&self, free: &[T], zero: T) -> Vec<T> {
        let mut full = vec![zero; self.n_dofs];
        for (k, &d) in self.free_dofs.iter().enumerate() {
            full[d] = free[k];
        }
        full
    }
}

/// Physical quantities of one element at one quadrature point.
pub struct QuadPoint {
    pub x: [f64; 2],
    /// Quadrature weight times Jacobian determinant.
    pub weight: f64,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

/// Evaluates the basis of element `e` at every quadrature point.
pub fn element_quadrature(mesh: &Mesh2D, e: usize, order: Order) -> Result<Vec<QuadPoint>> {
    let c = mesh.corners(e);
    let q1 = Order::Q1;
    order
        .quadrature()
        .into_iter()
        .map(|(s, t, w)| {
            let (gv, gg) = q1.basis(s, t);
            let (values, ref_grads) = order.basis(s, t);
            let mut x = [0.0; 2];
            let mut j = [[0.0; 2]; 2];
            for k in 0..4 {
                for d in 0..2 {
                    x[d] += gv[k] * c[k][d];
                    j[d][0] += gg[k][0] * c[k][d];
                    j[d][1] += gg[k][1] * c[k][d];
                }
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if !(det > 0.0) {
                return Err(Error::Assembly(format!("non-positive Jacobian {det} in element {e}")));
            }
            // grad_x = J^{-T} grad_ref
            let grads = ref_grads
                .iter()
                .map(|g| [(j[1][1] * g[0] - j[1][0] * g[1]) / det, (-j[0][1] * g[0] + j[0][0] * g[1]) / det])
                .collect();
            Ok(QuadPoint { x, weight: w * det, values, grads })
        })
        .collect()
}
