use super::Tolerance;
use crate::error::{Error, Result};

// 15-point Kronrod abscissae on [-1, 1] (non-negative half) and weights,
// with the embedded 7-point Gauss weights at the odd abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    estimate: f64,
    error: f64,
}

fn kronrod15<F>(f: &F, lo: f64, hi: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let estimate = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !estimate.is_finite() {
        return Err(Error::QuadratureFailure { lo, hi });
    }
    Ok(Panel { estimate, error })
}

fn refine<F>(f: &F, lo: f64, hi: f64, panel: Panel, budget: f64, depth: u32, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if panel.error <= budget {
        return Ok(panel.estimate);
    }
    let mid = 0.5 * (lo + hi);
    if depth >= max_depth || mid <= lo || mid >= hi {
        return Err(Error::QuadratureFailure { lo, hi });
    }
    let left = kronrod15(f, lo, mid)?;
    let right = kronrod15(f, mid, hi)?;
    // Accept the split early when the two halves already agree with the parent.
    if left.error + right.error <= budget {
        return Ok(left.estimate + right.estimate);
    }
    Ok(refine(f, lo, mid, left, 0.5 * budget, depth + 1, max_depth)?
        + refine(f, mid, hi, right, 0.5 * budget, depth + 1, max_depth)?)
}

/// Adaptive Gauss-Kronrod quadrature of a fallible integrand.
///
/// The error target is `max(abs_tol, rel_tol * |I|)` with `|I|` taken from the
/// first 15-point estimate; the budget is split evenly on bisection. Reversed
/// limits integrate with a sign flip, equal limits give zero.
pub fn integrate_fallible<F>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(0.0);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::QuadratureFailure { lo, hi });
    }
    if lo > hi {
        return integrate_fallible(f, hi, lo, tol).map(|v| -v);
    }
    let whole = kronrod15(&f, lo, hi)?;
    let budget = tol.abs_tol.max(tol.rel_tol * whole.estimate.abs());
    refine(&f, lo, hi, whole, budget, 0, tol.max_depth)
}

pub fn integrate<F>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_fallible(|x| Ok(f(x)), lo, hi, tol)
}

/// Integrates piecewise over `[lo, hi]`, splitting at every break point that
/// falls strictly inside. Use for integrands with known kinks.
pub fn integrate_with_breaks<F>(f: F, lo: f64, hi: f64, breaks: &[f64], tol: &Tolerance) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if lo >= hi {
        return integrate_fallible(f, lo, hi, tol);
    }
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    let mut left = lo;
    for right in cuts.into_iter().chain(std::iter::once(hi)) {
        total += integrate_fallible(&f, left, right, tol)?;
        left = right;
    }
    Ok(total)
}
