//! Shift-invert Lanczos for the lowest eigenpairs of `A v = lambda M v`.
//!
//! The iteration runs on `(A - sigma M)^{-1} M`, which is self-adjoint in the
//! `M` inner product, with full reorthogonalization. A short probe at a safe
//! negative shift yields an estimate of `lambda_1`; the shift is then moved
//! just below it, which separates the wanted eigenvalues sharply.

use nalgebra::{DMatrix, SymmetricEigen};

use super::cholesky::{Skyline, SkylineLayout};
use super::scalar::{axpy, dot, Scalar};
use super::sparse::SparseHermitian;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Bound on `||A v - lambda M v|| / ||M v||`.
    pub tol: f64,
    pub initial_shift: f64,
    /// Steps spent at the initial shift before moving it.
    pub probe_steps: usize,
    /// Krylov dimension before a restart.
    pub max_steps: usize,
    pub max_restarts: usize,
    /// Known estimate of `lambda_1`; skips the probe.
    pub shift_hint: Option<f64>,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-8,
            initial_shift: -0.5,
            probe_steps: 25,
            max_steps: 120,
            max_restarts: 6,
            shift_hint: None,
        }
    }
}

/// Eigenpair in the numbering of the unknowns.
#[derive(Debug, Clone)]
pub struct RawPair<T> {
    pub value: f64,
    /// `M`-normalized.
    pub vector: Vec<T>,
    pub residual: f64,
}

const SHIFT_RETRIES: usize = 5;

fn factor_with_retries<T: Scalar>(
    layout: &SkylineLayout,
    a: &SparseHermitian<T>,
    m: &SparseHermitian<T>,
    shift: f64,
) -> Result<Skyline<T>> {
    let mut shift = shift;
    let mut last = None;
    for _ in 0..=SHIFT_RETRIES {
        match layout.factor(a, m, shift) {
            Ok(f) => return Ok(f),
            Err(e) => {
                log::debug!("factorization failed at shift {shift}; moving down");
                last = Some(e);
                shift = 2.0 * shift - 1.0;
            }
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Places the shift just below `estimate`, widening the gap until the
/// shifted matrix factors; `None` if no admissible shift is found.
fn factor_below<T: Scalar>(
    layout: &SkylineLayout,
    a: &SparseHermitian<T>,
    m: &SparseHermitian<T>,
    estimate: f64,
    floor: f64,
) -> Option<Skyline<T>> {
    let mut delta = 0.05 * (estimate.abs() + 1.0);
    for _ in 0..6 {
        let shift = estimate - delta;
        if shift <= floor {
            return None;
        }
        if let Ok(f) = layout.factor(a, m, shift) {
            return Some(f);
        }
        delta *= 2.0;
    }
    None
}

fn residual<T: Scalar>(a: &SparseHermitian<T>, m: &SparseHermitian<T>, v: &[T]) -> (f64, f64) {
    let av = a.apply(v);
    let mv = m.apply(v);
    let lambda = dot(v, &av).re() / dot(v, &mv).re();
    let num: f64 = av.iter().zip(&mv).map(|(x, y)| (*x - y.scale(lambda)).abs2()).sum::<f64>().sqrt();
    let den: f64 = mv.iter().map(|y| y.abs2()).sum::<f64>().sqrt();
    (lambda, num / den)
}

struct Ritz<T> {
    pairs: Vec<RawPair<T>>,
    converged: bool,
}

/// One Lanczos run of at most `steps` steps from `start`.
fn lanczos_run<T: Scalar>(
    fac: &Skyline<T>,
    a: &SparseHermitian<T>,
    m: &SparseHermitian<T>,
    start: &[T],
    steps: usize,
    k: usize,
    tol: f64,
) -> Ritz<T> {
    let n = start.len();
    let steps = steps.min(n);
    let mut qs: Vec<Vec<T>> = Vec::with_capacity(steps);
    let mut mqs: Vec<Vec<T>> = Vec::with_capacity(steps);
    let mut alphas: Vec<f64> = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);

    let mut q = start.to_vec();
    let mut mq = m.apply(&q);
    let nrm = dot(&q, &mq).re().sqrt();
    q.iter_mut().for_each(|x| *x = x.scale(1.0 / nrm));
    mq.iter_mut().for_each(|x| *x = x.scale(1.0 / nrm));

    let mut best: Option<Ritz<T>> = None;
    for j in 0..steps {
        let mut w = fac.solve(&mq);
        let alpha = dot(&mq, &w).re();
        axpy(T::from_re(-alpha), &q, &mut w);
        if let Some(&beta) = betas.last() {
            axpy(T::from_re(-beta), &qs[j - 1], &mut w);
        }
        qs.push(q);
        mqs.push(mq);
        alphas.push(alpha);
        for _ in 0..2 {
            for (qi, mqi) in qs.iter().zip(&mqs) {
                let c = dot(mqi, &w);
                axpy(-c, qi, &mut w);
            }
        }
        let mw = m.apply(&w);
        let beta = dot(&w, &mw).re().max(0.0).sqrt();
        let size = j + 1;
        let breakdown = !(beta > 1e-13 * alpha.abs().max(1e-300));
        if size >= k && (size % 5 == 0 || size == steps || breakdown) {
            let ritz = extract(a, m, &qs, &alphas, &betas, k);
            let converged = ritz.pairs.iter().all(|p| p.residual <= tol);
            let better = best.as_ref().map_or(true, |b| max_residual(&ritz) < max_residual(b));
            if converged {
                return Ritz { pairs: ritz.pairs, converged };
            }
            if better {
                best = Some(ritz);
            }
        }
        if breakdown {
            break;
        }
        betas.push(beta);
        q = w.iter().map(|x| x.scale(1.0 / beta)).collect();
        mq = mw.iter().map(|x| x.scale(1.0 / beta)).collect();
    }
    best.unwrap_or_else(|| extract(a, m, &qs, &alphas, &betas, k.min(qs.len())))
}

fn max_residual<T>(r: &Ritz<T>) -> f64 {
    r.pairs.iter().map(|p| p.residual).fold(0.0, f64::max)
}

fn extract<T: Scalar>(
    a: &SparseHermitian<T>,
    m: &SparseHermitian<T>,
    qs: &[Vec<T>],
    alphas: &[f64],
    betas: &[f64],
    k: usize,
) -> Ritz<T> {
    let size = alphas.len();
    let mut t = DMatrix::<f64>::zeros(size, size);
    for i in 0..size {
        t[(i, i)] = alphas[i];
        if i + 1 < size {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut idx: Vec<usize> = (0..size).collect();
    idx.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let n = qs[0].len();
    let mut pairs = Vec::with_capacity(k);
    for &c in idx.iter().take(k) {
        if !(eig.eigenvalues[c] > 0.0) {
            continue;
        }
        let mut v = vec![T::ZERO; n];
        for (i, qi) in qs.iter().enumerate() {
            axpy(T::from_re(eig.eigenvectors[(i, c)]), qi, &mut v);
        }
        let mv = m.apply(&v);
        let nrm = dot(&v, &mv).re().sqrt();
        v.iter_mut().for_each(|x| *x = x.scale(1.0 / nrm));
        let (value, res) = residual(a, m, &v);
        pairs.push(RawPair { value, vector: v, residual: res });
    }
    pairs.sort_by(|x, y| x.value.total_cmp(&y.value));
    Ritz { pairs, converged: false }
}

fn start_vector<T: Scalar>(n: usize) -> Vec<T> {
    (0..n).map(|i| T::from_re(1.0 + 0.25 * (0.7 * i as f64 + 0.1).sin())).collect()
}

/// The `k` smallest eigenpairs of the pencil `(A, M)`, `M` positive definite.
pub fn lowest_eigenpairs<T: Scalar>(
    a: &SparseHermitian<T>,
    m: &SparseHermitian<T>,
    k: usize,
    opts: &LanczosOptions,
    layout: &SkylineLayout,
) -> Result<Vec<RawPair<T>>> {
    let n = a.dim;
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("requested {k} eigenpairs of a {n}-dimensional problem")));
    }
    let safe = factor_with_retries(layout, a, m, opts.initial_shift)?;
    let floor = safe.shift;
    let mut fac = match opts.shift_hint {
        Some(h) => factor_below(layout, a, m, h, floor).unwrap_or(safe),
        None => safe,
    };
    let mut moved = opts.shift_hint.is_some() && fac.shift > floor;
    let mut start = start_vector::<T>(n);
    let mut best = f64::INFINITY;
    let mut total = 0;
    for _ in 0..=opts.max_restarts {
        let steps = if moved { opts.max_steps } else { opts.probe_steps.max(k + 5) };
        let ritz = lanczos_run(&fac, a, m, &start, steps, k, opts.tol);
        total += steps;
        let worst = max_residual(&ritz);
        best = best.min(worst);
        if ritz.converged && ritz.pairs.len() == k {
            return Ok(ritz.pairs);
        }
        if ritz.pairs.is_empty() {
            break;
        }
        if !moved {
            if let Some(f) = factor_below(layout, a, m, ritz.pairs[0].value, floor) {
                fac = f;
            }
            moved = true;
        }
        start = vec![T::ZERO; n];
        for p in &ritz.pairs {
            axpy(T::from_re(1.0), &p.vector, &mut start);
        }
    }
    Err(Error::NotConverged { iterations: total, residual: best })
}
