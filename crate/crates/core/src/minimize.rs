//! Scalar minimization: coarse scan followed by golden-section refinement.

use serde::{Deserialize, Serialize};

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Location and value of a one-dimensional minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizerResult {
    pub arg: f64,
    pub value: f64,
    pub bracket: (f64, f64),
    /// Width of the final bracket.
    pub tol: f64,
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `tol`. The returned point is the
/// best one evaluated, so the value never exceeds `f` at either interior probe.
pub fn golden_section<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<MinimizerResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(MinimizerResult { arg: best.0, value: best.1, bracket: (lo, hi), tol: hi - lo })
}

/// Samples `f` on a uniform grid, then refines around the best sample.
///
/// The refined point replaces the coarse minimum only if it is lower.
pub fn scan_then_golden<F>(mut f: F, a: f64, b: f64, step: f64, tol: f64) -> Result<MinimizerResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let count = ((b - a) / step).round().max(1.0) as usize;
    let mut samples = Vec::with_capacity(count + 1);
    for k in 0..=count {
        let x = a + (b - a) * k as f64 / count as f64;
        samples.push((x, f(x)?));
    }
    refine_samples(&samples, f, tol)
}

/// Golden-section refinement around the smallest of precomputed samples
/// (sorted by abscissa).
pub fn refine_samples<F>(samples: &[(f64, f64)], f: F, tol: f64) -> Result<MinimizerResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (k, &(x, v)) = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("at least one sample");
    if samples.len() == 1 {
        return Ok(MinimizerResult { arg: x, value: v, bracket: (x, x), tol: 0.0 });
    }
    let lo = samples[k.saturating_sub(1)].0;
    let hi = samples[(k + 1).min(samples.len() - 1)].0;
    let refined = golden_section(f, lo, hi, tol)?;
    if refined.value <= v {
        Ok(refined)
    } else {
        Ok(MinimizerResult { arg: x, value: v, bracket: refined.bracket, tol: refined.tol })
    }
}
