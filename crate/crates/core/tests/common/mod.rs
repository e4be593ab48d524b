//! Finite-difference reference solvers shared by the integration tests and
//! the acceptance runner. Nothing here calls into the finite-element code.

#![allow(dead_code)]

use num_complex::Complex64;

/// Hermitian band matrix, lower triangle stored row by row.
pub struct Banded {
    pub n: usize,
    pub bw: usize,
    data: Vec<Complex64>,
}

impl Banded {
    pub fn new(n: usize, bw: usize) -> Self {
        Banded { n, bw, data: vec![Complex64::new(0.0, 0.0); n * (bw + 1)] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (i - j)
    }

    /// Adds to entry `(i, j)` with `j <= i`.
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if j <= i {
            if i - j > self.bw {
                Complex64::new(0.0, 0.0)
            } else {
                self.data[self.idx(i, j)]
            }
        } else {
            self.get(j, i).conj()
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let a = self.data[self.idx(i, j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a.conj() * x[i];
                }
            }
        }
        y
    }

    /// `L L^H` factor; `None` if the matrix is not positive definite.
    pub fn cholesky(&self) -> Option<Banded> {
        let mut l = Banded::new(self.n, self.bw);
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let mut s = self.data[self.idx(i, j)];
                for k in i.saturating_sub(self.bw).max(j.saturating_sub(self.bw))..j {
                    s -= l.data[l.idx(i, k)] * l.data[l.idx(j, k)].conj();
                }
                if i == j {
                    if !(s.re > 0.0) {
                        return None;
                    }
                    let k = l.idx(i, i);
                    l.data[k] = Complex64::new(s.re.sqrt(), 0.0);
                } else {
                    let d = l.data[l.idx(j, j)];
                    let k = l.idx(i, j);
                    l.data[k] = s / d;
                }
            }
        }
        Some(l)
    }

    /// Solves `L L^H x = b` with `self` the factor.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut y = b.to_vec();
        for i in 0..self.n {
            let mut s = y[i];
            for k in i.saturating_sub(self.bw)..i {
                s -= self.data[self.idx(i, k)] * y[k];
            }
            y[i] = s / self.data[self.idx(i, i)];
        }
        for i in (0..self.n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + self.bw + 1).min(self.n) {
                s -= self.data[self.idx(k, i)].conj() * y[k];
            }
            y[i] = s / self.data[self.idx(i, i)];
        }
        y
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Lowest eigenvalue of a positive definite band matrix by inverse iteration
/// with Rayleigh quotients.
pub fn lowest_eigenvalue(h: &Banded) -> f64 {
    let l = h.cholesky().expect("oracle matrix must be positive definite");
    let mut x: Vec<Complex64> = (0..h.n).map(|i| Complex64::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.0)).collect();
    let mut rq = f64::INFINITY;
    for it in 0..5000 {
        let y = l.solve(&x);
        let norm = dot(&y, &y).re.sqrt();
        x = y.iter().map(|v| v / norm).collect();
        let hx = h.matvec(&x);
        let next = dot(&x, &hx).re;
        if it > 10 && (rq - next).abs() <= 1e-14 * next.abs() {
            return next;
        }
        rq = next;
    }
    rq
}

/// Boundary condition on one side of a rectangle.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Bc {
    Neumann,
    Dirichlet,
}

/// Magnetic Schrodinger operator `(-i grad - A)^2 + V` on `(0,lu) x (0,lv)`,
/// cell-centred grid, Peierls phases on the links.
pub struct FdProblem<'a> {
    pub lu: f64,
    pub lv: f64,
    pub nu: usize,
    pub nv: usize,
    /// Sides `u = 0`, `u = lu`, `v = 0`, `v = lv`.
    pub bc: [Bc; 4],
    pub potential: &'a dyn Fn(f64, f64) -> f64,
    /// Components of `A`, affine in `(u, v)` so that midpoint phases are exact.
    pub a_u: &'a dyn Fn(f64, f64) -> f64,
    pub a_v: &'a dyn Fn(f64, f64) -> f64,
}

impl FdProblem<'_> {
    pub fn matrix(&self) -> Banded {
        let (hu, hv) = (self.lu / self.nu as f64, self.lv / self.nv as f64);
        let id = |i: usize, j: usize| j * self.nu + i;
        let mut m = Banded::new(self.nu * self.nv, self.nu);
        let wall = |bc: Bc, h: f64| if bc == Bc::Dirichlet { 2.0 / (h * h) } else { 0.0 };
        for j in 0..self.nv {
            for i in 0..self.nu {
                let (u, v) = ((i as f64 + 0.5) * hu, (j as f64 + 0.5) * hv);
                let mut d = (self.potential)(u, v);
                d += if i > 0 { 1.0 / (hu * hu) } else { wall(self.bc[0], hu) };
                d += if i + 1 < self.nu { 1.0 / (hu * hu) } else { wall(self.bc[1], hu) };
                d += if j > 0 { 1.0 / (hv * hv) } else { wall(self.bc[2], hv) };
                d += if j + 1 < self.nv { 1.0 / (hv * hv) } else { wall(self.bc[3], hv) };
                m.add(id(i, j), id(i, j), Complex64::new(d, 0.0));
                // links to the left and below; entry (row, col) with col < row
                if i > 0 {
                    let phase = hu * (self.a_u)(u - 0.5 * hu, v);
                    m.add(id(i, j), id(i - 1, j), -Complex64::from_polar(1.0, phase) / (hu * hu));
                }
                if j > 0 {
                    let phase = hv * (self.a_v)(u, v - 0.5 * hv);
                    m.add(id(i, j), id(i, j - 1), -Complex64::from_polar(1.0, phase) / (hv * hv));
                }
            }
        }
        m
    }

    pub fn lowest(&self) -> f64 {
        lowest_eigenvalue(&self.matrix())
    }
}

pub fn no_field(_: f64, _: f64) -> f64 {
    0.0
}

/// Richardson extrapolation of values at spacings `h` and `h/2` for error `O(h^p)`.
pub fn richardson(coarse: f64, fine: f64, p: i32) -> f64 {
    let f = 2f64.powi(p);
    (f * fine - coarse) / (f - 1.0)
}

/// De Gennes eigenvalue `mu(tau)` on `(0, t_max)`, Neumann at 0, Dirichlet at `t_max`.
pub fn mu_fd(tau: f64, t_max: f64, n: usize) -> f64 {
    let pot = move |u: f64, _: f64| (u - tau) * (u - tau);
    FdProblem {
        lu: t_max,
        lv: 1.0,
        nu: n,
        nv: 1,
        bc: [Bc::Neumann, Bc::Dirichlet, Bc::Neumann, Bc::Neumann],
        potential: &pot,
        a_u: &no_field,
        a_v: &no_field,
    }
    .lowest()
}

/// Lowest eigenvalue of `-(1/r)(r u')' + (r - tau)^2 u` in `L^2(r dr)` on `(0, r_max)`.
pub fn zeta_fd(tau: f64, r_max: f64, n: usize) -> f64 {
    let h = r_max / n as f64;
    let r = |i: usize| (i as f64 + 0.5) * h;
    let face = |i: usize| (i as f64 + 1.0) * h;
    let mut m = Banded::new(n, 1);
    for i in 0..n {
        let left = if i > 0 { face(i - 1) } else { 0.0 };
        let right = if i + 1 < n { face(i) } else { 2.0 * face(i) };
        let k = (left + right) / (h * h) + r(i) * (r(i) - tau).powi(2);
        m.add(i, i, Complex64::new(k / r(i), 0.0));
        if i > 0 {
            m.add(i, i - 1, Complex64::new(-face(i - 1) / (h * h) / (r(i) * r(i - 1)).sqrt(), 0.0));
        }
    }
    lowest_eigenvalue(&m)
}

/// Parameters of the rhombus oracle at `alpha = pi/2`, where the sector is a
/// rotated square and the rhombus coordinates `(u, v)` are orthonormal.
pub struct SquareSector {
    pub length: f64,
    pub b: [f64; 3],
    pub tau: f64,
}

impl SquareSector {
    /// FD value with `n x n` cells; Neumann on `u = 0`, `v = 0`.
    pub fn fd(&self, n: usize) -> f64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let [b1, b2, b3] = self.b;
        let tau = self.tau;
        // x1 = (u + v)/sqrt2, x2 = (v - u)/sqrt2
        let pot = move |u: f64, v: f64| {
            let w = (u * (b2 + b1) + v * (b2 - b1)) * s;
            (w - tau) * (w - tau)
        };
        // A = (0, b3 x1) in x, pulled back: A.dx = b3 (u + v)(dv - du)/2
        let a_u = move |u: f64, v: f64| -0.5 * b3 * (u + v);
        let a_v = move |u: f64, v: f64| 0.5 * b3 * (u + v);
        FdProblem {
            lu: self.length,
            lv: self.length,
            nu: n,
            nv: n,
            bc: [Bc::Neumann, Bc::Dirichlet, Bc::Neumann, Bc::Dirichlet],
            potential: &pot,
            a_u: &a_u,
            a_v: &a_v,
        }
        .lowest()
    }

    /// Richardson-extrapolated FD value from `n` and `2n` cells.
    pub fn reference(&self, n: usize) -> f64 {
        richardson(self.fd(n), self.fd(2 * n), 2)
    }
}
