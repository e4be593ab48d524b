use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use wedge_spectra::fem2d::{assemble, FeSpace, FiberSolver, Mesh2D, Order};
use wedge_spectra::geometry::MagneticField;

fn field(b: [f64; 3]) -> MagneticField {
    MagneticField::new(b[0], b[1], b[2]).unwrap()
}

fn gauss(points: usize) -> Vec<(f64, f64)> {
    match points {
        2 => {
            let x = 1.0 / 3f64.sqrt();
            vec![(-x, 1.0), (x, 1.0)]
        }
        4 => {
            let (a, b) = ((3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt(), (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt());
            let (wa, wb) = ((18.0 + 30f64.sqrt()) / 36.0, (18.0 - 30f64.sqrt()) / 36.0);
            vec![(-b, wb), (-a, wa), (a, wa), (b, wb)]
        }
        _ => unreachable!(),
    }
}

/// Dense bilinear-element matrices `(A(tau), M)` over all mesh nodes, computed
/// from `conj(D phi_a) . D phi_b` with `D = grad - i A`.
fn dense_q1(mesh: &Mesh2D, b: [f64; 3], tau: f64, points: usize) -> (Vec<Vec<Complex64>>, Vec<Vec<f64>>) {
    let n = mesh.n_nodes();
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut m = vec![vec![0.0; n]; n];
    let sk = [-1.0, 1.0, 1.0, -1.0];
    let tk = [-1.0, -1.0, 1.0, 1.0];
    let rule = gauss(points);
    for (e, quad) in mesh.quads.iter().enumerate() {
        let c = mesh.corners(e);
        for &(t, wt) in &rule {
            for &(s, ws) in &rule {
                let phi: Vec<f64> = (0..4).map(|k| (1.0 + s * sk[k]) * (1.0 + t * tk[k]) / 4.0).collect();
                let dphi: Vec<[f64; 2]> =
                    (0..4).map(|k| [sk[k] * (1.0 + t * tk[k]) / 4.0, tk[k] * (1.0 + s * sk[k]) / 4.0]).collect();
                let mut x = [0.0; 2];
                let mut jac = [[0.0; 2]; 2];
                for k in 0..4 {
                    for d in 0..2 {
                        x[d] += phi[k] * c[k][d];
                        jac[d][0] += dphi[k][0] * c[k][d];
                        jac[d][1] += dphi[k][1] * c[k][d];
                    }
                }
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                let grad = |k: usize| {
                    let g = dphi[k];
                    [(jac[1][1] * g[0] - jac[1][0] * g[1]) / det, (jac[0][0] * g[1] - jac[0][1] * g[0]) / det]
                };
                let pot = (x[0] * b[1] - x[1] * b[0] - tau).powi(2);
                let vec_pot = [0.0, b[2] * x[0]];
                let i = Complex64::i();
                let cov = |k: usize| {
                    let g = grad(k);
                    [g[0] - i * vec_pot[0] * phi[k], g[1] - i * vec_pot[1] * phi[k]]
                };
                let w = ws * wt * det;
                for p in 0..4 {
                    let dp = cov(p);
                    for q in 0..4 {
                        let dq = cov(q);
                        let kin = dp[0].conj() * dq[0] + dp[1].conj() * dq[1];
                        a[quad[p]][quad[q]] += w * (kin + pot * phi[p] * phi[q]);
                        m[quad[p]][quad[q]] += w * phi[p] * phi[q];
                    }
                }
            }
        }
    }
    (a, m)
}

fn free_nodes(mesh: &Mesh2D) -> Vec<usize> {
    FeSpace::new(mesh, Order::Q1).unwrap().free_dofs
}

#[test]
fn q1_assembly_matches_dense_oracle() {
    let b = [0.3, 0.5, 0.66f64.sqrt()];
    let tau = 0.35;
    let mesh = Mesh2D::rhombus(0.7 * PI, 3.0, 5).unwrap();
    let (a, m) = assemble(&mesh, &field(b), tau, Order::Q1).unwrap();
    let (da, dm) = dense_q1(&mesh, b, tau, 2);
    let free = free_nodes(&mesh);
    let scale = da.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    for (i, &p) in free.iter().enumerate() {
        for (j, &q) in free.iter().enumerate() {
            assert!((a.get(i, j) - da[p][q]).norm() <= 1e-12 * scale, "A[{i},{j}]");
            assert!((m.get(i, j).re - dm[p][q]).abs() <= 1e-12 * scale, "M[{i},{j}]");
        }
    }
}

#[test]
fn q1_mass_and_tau_dependence_are_integrated_exactly() {
    // on parallelogram cells the two-point rule is exact for M and for the
    // part of A(tau) - A(0) that depends on tau
    let b = [0.48, 0.6, 0.64];
    let mesh = Mesh2D::rhombus(0.4 * PI, 2.5, 4).unwrap();
    let (a0, m) = assemble(&mesh, &field(b), 0.0, Order::Q1).unwrap();
    let (a1, _) = assemble(&mesh, &field(b), 1.3, Order::Q1).unwrap();
    let (e0, em) = dense_q1(&mesh, b, 0.0, 4);
    let (e1, _) = dense_q1(&mesh, b, 1.3, 4);
    let free = free_nodes(&mesh);
    for (i, &p) in free.iter().enumerate() {
        for (j, &q) in free.iter().enumerate() {
            assert!((m.get(i, j).re - em[p][q]).abs() < 1e-13);
            let ours = a1.get(i, j) - a0.get(i, j);
            let exact = e1[p][q] - e0[p][q];
            assert!((ours - exact).norm() < 1e-12, "[{i},{j}] {ours} vs {exact}");
        }
    }
}

#[test]
fn normal_field_shifts_by_tau_squared() {
    let mesh = Mesh2D::rhombus(0.6 * PI, 3.0, 4).unwrap();
    let b = field([0.0, 0.0, 1.0]);
    let (a0, m) = assemble(&mesh, &b, 0.0, Order::Q2).unwrap();
    for tau in [-1.5, 0.4, 2.0] {
        let (a, _) = assemble(&mesh, &b, tau, Order::Q2).unwrap();
        let n = m.dim;
        for i in 0..n {
            for j in 0..n {
                let d = a.get(i, j) - a0.get(i, j) - m.get(i, j) * tau * tau;
                assert!(d.norm() < 1e-12, "tau {tau} [{i},{j}]");
            }
        }
    }
}

fn lowest(mesh: Mesh2D, b: [f64; 3], tau: f64) -> f64 {
    FiberSolver::new(mesh, &field(b), Order::Q2, 1e-10).unwrap().lowest(tau, None).unwrap().value
}

#[test]
fn renumbering_nodes_leaves_the_spectrum_unchanged() {
    let mesh = Mesh2D::rhombus(0.8 * PI, 4.0, 6).unwrap();
    let n = mesh.n_nodes();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut state = 12345u64;
    for k in (1..n).rev() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        perm.swap(k, (state >> 33) as usize % (k + 1));
    }
    let b = [0.3, 0.5, 0.66f64.sqrt()];
    let base = lowest(mesh.clone(), b, 0.2);
    let shuffled = lowest(mesh.permuted(&perm).unwrap(), b, 0.2);
    assert!((base - shuffled).abs() < 1e-9 * base, "{base} {shuffled}");
}

#[test]
fn reflected_mesh_with_mirrored_field() {
    let mesh = Mesh2D::rhombus(0.7 * PI, 4.0, 6).unwrap();
    let b = [0.3, 0.5, 0.66f64.sqrt()];
    let base = lowest(mesh.clone(), b, -0.3);
    let mirrored = lowest(mesh.reflected(), [-b[0], b[1], -b[2]], -0.3);
    assert!((base - mirrored).abs() < 1e-9 * base, "{base} {mirrored}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn band_is_invariant_under_sign_symmetries(
        gamma in 0.1f64..1.5,
        theta in 0.1f64..1.5,
        tau in -1.5f64..1.5,
        alpha in 0.3f64..0.9,
    ) {
        let b = [gamma.sin() * theta.sin(), gamma.sin() * theta.cos(), gamma.cos()];
        let mesh = || Mesh2D::rhombus(alpha * PI, 4.0, 4).unwrap();
        let base = lowest(mesh(), b, tau);
        for (flipped, t) in [
            ([-b[0], b[1], b[2]], tau),
            ([b[0], b[1], -b[2]], tau),
            ([-b[0], -b[1], b[2]], -tau),
        ] {
            let other = lowest(mesh(), flipped, t);
            prop_assert!((base - other).abs() < 1e-8 * base, "{:?}: {} vs {}", flipped, base, other);
        }
    }

    #[test]
    fn normal_field_band_is_a_parabola(tau in -2.0f64..2.0) {
        let mesh = || Mesh2D::rhombus(0.5 * PI, 4.0, 4).unwrap();
        let b = [0.0, 0.0, 1.0];
        let shifted = lowest(mesh(), b, tau);
        let base = lowest(mesh(), b, 0.0);
        prop_assert!((shifted - base - tau * tau).abs() < 1e-8 * shifted);
    }
}
