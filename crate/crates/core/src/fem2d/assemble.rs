//! Galerkin matrices of the fiber operators `-(grad - i A)^2 + V^tau`.
//!
//! With `A = (0, b3 x1)` and `w = x1 b2 - x2 b1`, the potential expands as
//! `V^tau = w^2 - 2 tau w + tau^2`, so every fiber matrix is
//! `A(tau) = K - 2 tau W + tau^2 M` on a shared pattern.

use num_complex::Complex64;

use super::mesh::Mesh2D;
use super::scalar::Scalar;
use super::space::{element_quadrature, FeSpace, Order};
use super::sparse::{Pattern, SparseHermitian};
use crate::error::{Error, Result};
use crate::geometry::MagneticField;

/// The three `tau`-independent pieces of the fiber matrices on one space.
#[derive(Debug, Clone)]
pub struct FiberFamily<T> {
    pub space: FeSpace,
    pub pattern: Pattern,
    /// Kinetic part plus `w^2`.
    pub base: Vec<T>,
    /// Weighted mass with weight `w`.
    pub linear: Vec<f64>,
    pub mass: Vec<f64>,
    pub field: MagneticField,
}

impl<T: Scalar> FiberFamily<T> {
    pub fn new(mesh: &Mesh2D, field: &MagneticField, order: Order) -> Result<Self> {
        let [b1, b2, b3] = field.components();
        if !T::IS_COMPLEX && b3 != 0.0 {
            return Err(Error::Assembly("real assembly requested for a field with b3 != 0".into()));
        }
        let space = FeSpace::new(mesh, order)?;
        let n_free = space.n_free();
        let per = order.dofs_per_element();

        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n_free];
        for e in 0..mesh.quads.len() {
            let free: Vec<usize> = space.dofs_of(e).iter().filter_map(|&d| space.free_index[d]).collect();
            for &i in &free {
                rows[i].extend_from_slice(&free);
            }
        }
        let pattern = Pattern::from_rows(rows);
        let nnz = pattern.nnz();
        let mut base = vec![T::ZERO; nnz];
        let mut linear = vec![0.0; nnz];
        let mut mass = vec![0.0; nnz];

        let mut kb = vec![(0.0, 0.0); per * per];
        let mut kl = vec![0.0; per * per];
        let mut km = vec![0.0; per * per];
        for e in 0..mesh.quads.len() {
            kb.iter_mut().for_each(|v| *v = (0.0, 0.0));
            kl.iter_mut().for_each(|v| *v = 0.0);
            km.iter_mut().for_each(|v| *v = 0.0);
            for q in element_quadrature(mesh, e, order)? {
                let c = b3 * q.x[0];
                let w = b2 * q.x[0] - b1 * q.x[1];
                let pot = c * c + w * w;
                for a in 0..per {
                    let (pa, ga) = (q.values[a], q.grads[a]);
                    for b in 0..per {
                        let (pb, gb) = (q.values[b], q.grads[b]);
                        let m = q.weight * pa * pb;
                        let re = q.weight * (ga[0] * gb[0] + ga[1] * gb[1]) + pot * m;
                        let im = q.weight * c * (pa * gb[1] - pb * ga[1]);
                        let k = a * per + b;
                        kb[k].0 += re;
                        kb[k].1 += im;
                        kl[k] += w * m;
                        km[k] += m;
                    }
                }
            }
            if kb.iter().any(|v| !v.0.is_finite() || !v.1.is_finite()) {
                return Err(Error::Assembly(format!("non-finite quadrature value in element {e}")));
            }
            let dofs = space.dofs_of(e);
            for a in 0..per {
                let Some(i) = space.free_index[dofs[a]] else { continue };
                for b in 0..per {
                    let Some(j) = space.free_index[dofs[b]] else { continue };
                    if i > j {
                        continue;
                    }
                    let k = a * per + b;
                    let pos = pattern.position(i, j).expect("pattern covers element couplings");
                    if i == j {
                        base[pos] += T::from_re(kb[k].0);
                    } else {
                        base[pos] += T::from_parts(kb[k].0, kb[k].1);
                    }
                    linear[pos] += kl[k];
                    mass[pos] += km[k];
                }
            }
        }
        // mirror the upper triangle
        for i in 0..n_free {
            for pos in pattern.row_ptr[i]..pattern.row_ptr[i + 1] {
                let j = pattern.col_idx[pos];
                if j >= i {
                    break;
                }
                let upper = pattern.position(j, i).expect("pattern is symmetric");
                base[pos] = base[upper].conj();
                linear[pos] = linear[upper];
                mass[pos] = mass[upper];
            }
        }
        Ok(FiberFamily { space, pattern, base, linear, mass, field: *field })
    }

    /// Fiber matrix at `tau`.
    pub fn operator(&self, tau: f64) -> SparseHermitian<T> {
        let values = self
            .base
            .iter()
            .zip(&self.linear)
            .zip(&self.mass)
            .map(|((&k, &w), &m)| k + T::from_re(tau * tau * m - 2.0 * tau * w))
            .collect();
        self.pattern.with_values(values)
    }

    pub fn mass_matrix(&self) -> SparseHermitian<T> {
        self.pattern.with_values(self.mass.iter().map(|&m| T::from_re(m)).collect())
    }
}

/// Fiber matrices at one `tau`, in complex arithmetic, with Dirichlet dofs eliminated.
pub fn assemble(
    mesh: &Mesh2D,
    field: &MagneticField,
    tau: f64,
    order: Order,
) -> Result<(SparseHermitian<Complex64>, SparseHermitian<Complex64>)> {
    let family = FiberFamily::<Complex64>::new(mesh, field, order)?;
    Ok((family.operator(tau), family.mass_matrix()))
}
