//! Stationary mean-field equilibria among reflecting pairs.
//!
//! A pair `(a, b)` is an equilibrium when it is optimal for the market level
//! `R(a, b)`, the stationary mean of the market statistic under reflection on
//! `[a, b]`. Equivalently both optimality residuals vanish with `y = R(a, b)`.

use serde::{Deserialize, Serialize};

use crate::control::{ergodic_cost, pi1, pi2, residual_ii_with, SpeedMeasure, ThresholdPair, DEFAULT_MIN_WIDTH};
use crate::error::{Error, Result};
use crate::models::{check_assumptions, Diffusion, Problem, ScalarFn};
use crate::numerics::{brent, find_roots, intersect_on_curve, trace_implicit, upper_column, RootSet, Tolerance, Window};

/// Stationary mean of the identity for constant drift `mu` and volatility `sigma`.
pub fn bm_stationary_mean(mu: f64, sigma: f64, a: f64, b: f64) -> f64 {
    let k = 2.0 * mu / (sigma * sigma);
    let w = b - a;
    if k > 0.0 {
        let e = (-k * w).exp();
        (b - a * e) / (1.0 - e) - 1.0 / k
    } else {
        let e = (k * w).exp();
        (b * e - a) / (e - 1.0) - 1.0 / k
    }
}

/// Stationary mean of the identity for `mu(x) = -theta x` with constant `sigma`.
pub fn ou_stationary_mean(theta: f64, sigma: f64, a: f64, b: f64) -> f64 {
    if b <= 0.0 {
        return -ou_stationary_mean(theta, sigma, -b, -a);
    }
    let k = theta / (sigma * sigma);
    let s = k.sqrt();
    let num = (-k * a * a).exp() - (-k * b * b).exp();
    // Differences of erfc keep their digits in the upper tail.
    let den = if a >= 0.0 {
        libm::erfc(s * a) - libm::erfc(s * b)
    } else {
        libm::erf(s * b) - libm::erf(s * a)
    };
    (sigma * sigma / (theta * std::f64::consts::PI)).sqrt() * num / den
}

/// `R(a, b)`: the stationary mean of `f` under reflection on `[a, b]`, by quadrature.
pub fn stationary_mean_of<D: Diffusion>(model: &D, f: &ScalarFn, interval: ThresholdPair, tol: &Tolerance) -> Result<f64> {
    let sm = SpeedMeasure::new(model, tol, interval.a, interval.b)?;
    sm.mean(|t| f.eval(t), &[])
}

/// `R(a, b)` for the problem's market statistic, using a closed form when one applies.
pub fn stationary_mean<D: Diffusion>(problem: &Problem<D>, interval: ThresholdPair) -> Result<f64> {
    market_mean(problem, interval.a, interval.b)
}

fn market_mean<D: Diffusion>(problem: &Problem<D>, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::DegenerateInterval { a, b });
    }
    if problem.cost.market_statistic == ScalarFn::Identity {
        if let Some(r) = problem.model.stationary_mean_closed_form(a, b) {
            return Ok(r);
        }
    }
    let sm = SpeedMeasure::new(&problem.model, &problem.tol, a, b)?;
    let f = &problem.cost.market_statistic;
    sm.mean(|t| f.eval(t), &[])
}

fn residual_i_at<D: Diffusion>(problem: &Problem<D>, a: f64, b: f64) -> Result<f64> {
    let r = market_mean(problem, a, b)?;
    Ok(pi1(&problem.model, &problem.cost, b, r) - pi2(&problem.model, &problem.cost, a, r))
}

fn residual_ii_at<D: Diffusion>(problem: &Problem<D>, a: f64, b: f64) -> Result<f64> {
    let r = market_mean(problem, a, b)?;
    let sm = SpeedMeasure::new(&problem.model, &problem.tol, a, b)?;
    residual_ii_with(&sm, &problem.model, &problem.cost, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResiduals {
    pub residual_i: f64,
    /// Normalised by the speed mass, as in [`crate::control::optimality_residuals`].
    pub residual_ii: f64,
    #[serde(rename = "R_value")]
    pub r_value: f64,
}

/// Both optimality residuals at `pair` with the market at `R(a, b)`.
pub fn equilibrium_residuals<D: Diffusion>(problem: &Problem<D>, pair: ThresholdPair) -> Result<EquilibriumResiduals> {
    let r = market_mean(problem, pair.a, pair.b)?;
    let sm = SpeedMeasure::new(&problem.model, &problem.tol, pair.a, pair.b)?;
    Ok(EquilibriumResiduals {
        residual_i: pi1(&problem.model, &problem.cost, pair.b, r) - pi2(&problem.model, &problem.cost, pair.a, r),
        residual_ii: residual_ii_with(&sm, &problem.model, &problem.cost, r)?,
        r_value: r,
    })
}

/// Every `b > a` on the scan grid above `a` where the first residual changes sign.
pub fn rho_branches<D: Diffusion>(problem: &Problem<D>, a: f64, scan: &Window) -> RootSet {
    match upper_column(a, scan, DEFAULT_MIN_WIDTH) {
        Some(col) => find_roots(|b| residual_i_at(problem, a, b).unwrap_or(f64::NAN), &col, &problem.tol),
        None => RootSet::default(),
    }
}

/// Smallest `b > a` matching the drift-adjusted costs at the stationary market level.
pub fn rho<D: Diffusion>(problem: &Problem<D>, a: f64, scan: &Window) -> Result<f64> {
    rho_branches(problem, a, scan).roots.first().copied().ok_or(Error::EmptyRho { a })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Interior,
    /// Within one grid spacing of the scan edge; a wider scan may move or add points.
    BoundaryOfScan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub thresholds: ThresholdPair,
    #[serde(rename = "R_value")]
    pub r_value: f64,
    pub value: f64,
    pub residual_i: f64,
    pub residual_ii: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibriumOptions {
    pub min_width: f64,
    /// Acceptance bound for both residuals, relative to `1 + |value|`.
    pub residual_tol: f64,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        EquilibriumOptions {
            min_width: DEFAULT_MIN_WIDTH,
            residual_tol: 1e-7,
        }
    }
}

/// Enumerates equilibrium pairs with both barriers in `scan`, sorted by `a`.
pub fn find_equilibria<D: Diffusion>(problem: &Problem<D>, scan: &Window) -> Vec<EquilibriumPoint> {
    find_equilibria_with(problem, scan, &EquilibriumOptions::default())
}

pub fn find_equilibria_with<D: Diffusion>(problem: &Problem<D>, scan: &Window, opts: &EquilibriumOptions) -> Vec<EquilibriumPoint> {
    let first = |a: f64, b: f64| residual_i_at(problem, a, b).unwrap_or(f64::NAN);
    let second = |a: f64, b: f64| residual_ii_at(problem, a, b).unwrap_or(f64::NAN);
    let candidates = intersect_on_curve(first, second, scan, opts.min_width, &problem.tol);
    let edge = scan.spacing();
    let mut out: Vec<EquilibriumPoint> = Vec::new();
    for (a, b) in candidates {
        let Ok(pair) = ThresholdPair::with_min_width(a, b, opts.min_width) else {
            continue;
        };
        let Ok(res) = equilibrium_residuals(problem, pair) else {
            continue;
        };
        let Ok(value) = ergodic_cost(problem, pair, res.r_value) else {
            continue;
        };
        let bound = opts.residual_tol * (1.0 + value.abs());
        if !(res.residual_i.abs() <= bound && res.residual_ii.abs() <= bound) {
            continue;
        }
        if out.iter().any(|p| (p.thresholds.a - a).abs() < 1e-6 && (p.thresholds.b - b).abs() < 1e-6) {
            continue;
        }
        let classification = if a - scan.lo < edge || scan.hi - b < edge {
            Classification::BoundaryOfScan
        } else {
            Classification::Interior
        };
        out.push(EquilibriumPoint {
            thresholds: pair,
            r_value: res.r_value,
            value,
            residual_i: res.residual_i,
            residual_ii: res.residual_ii,
            classification,
        });
    }
    out.sort_by(|p, q| p.thresholds.a.total_cmp(&q.thresholds.a));
    out
}

/// Zero sets of the two equilibrium residuals over `b > a`, for plotting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveSamples {
    pub cond_i: Vec<(f64, f64)>,
    pub cond_ii: Vec<(f64, f64)>,
}

pub fn trace_curves<D: Diffusion>(problem: &Problem<D>, scan: &Window) -> CurveSamples {
    let above = |a: f64, b: f64, f: &dyn Fn(f64, f64) -> Result<f64>| {
        if b - a < DEFAULT_MIN_WIDTH {
            f64::NAN
        } else {
            f(a, b).unwrap_or(f64::NAN)
        }
    };
    CurveSamples {
        cond_i: trace_implicit(|a, b| above(a, b, &|a, b| residual_i_at(problem, a, b)), scan, scan, &problem.tol),
        cond_ii: trace_implicit(|a, b| above(a, b, &|a, b| residual_ii_at(problem, a, b)), scan, scan, &problem.tol),
    }
}

/// Constant-drift, unit-volatility model with `c(x, y) = |x - y|`.
///
/// Both residuals depend on `(a, b)` only through the spread `C = b - a`.
/// `spread_i` solves the first condition and `spread_ii` the second; an
/// equilibrium family `{(a, a + C)}` exists exactly when they coincide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmClosedForm {
    pub mu: f64,
    pub q_d: f64,
    pub q_u: f64,
    pub spread_i: f64,
    pub spread_ii: Option<f64>,
    /// Second condition at `spread_i`, divided by the speed mass.
    pub mismatch: f64,
    pub equilibrium_spread: Option<f64>,
    /// Common equilibrium value `pi1(b, R)` when the family exists.
    pub value: Option<f64>,
}

/// `C (1 + e^{2 mu C}) / (1 - e^{2 mu C}) + (q_d + q_u) mu + 1 / mu`.
pub fn bm_spread_condition_i(mu: f64, q_sum: f64, c: f64) -> f64 {
    let em1 = (2.0 * mu * c).exp_m1();
    c * (2.0 + em1) / (-em1) + q_sum * mu + 1.0 / mu
}

/// Spread form of the second condition at `a = 0`, divided by `m(0, C)`.
pub fn bm_spread_condition_ii(mu: f64, q_sum: f64, c: f64) -> f64 {
    let em1 = (2.0 * mu * c).exp_m1();
    let mass = em1 / mu;
    let r = c * (1.0 + em1) / em1 - 0.5 / mu;
    // Antiderivatives of 2 e^{2 mu t} and 2 t e^{2 mu t}.
    let k = |t: f64| (2.0 * mu * t).exp() / mu;
    let j = |t: f64| (2.0 * mu * t).exp() * (t / mu - 0.5 / (mu * mu));
    let below = r * (k(r) - k(0.0)) - (j(r) - j(0.0));
    let above = (j(c) - j(r)) - r * (k(c) - k(r));
    (below + above - (c - r) * mass + q_sum) / mass
}

pub fn bm_closed_form(mu: f64, q_d: f64, q_u: f64) -> Result<BmClosedForm> {
    if !(mu < 0.0 && mu.is_finite()) {
        return Err(Error::invalid("mu", "closed form needs a negative drift"));
    }
    if !(q_d > 0.0 && q_u > 0.0) {
        return Err(Error::invalid("q", "prices must be positive"));
    }
    let q = q_d + q_u;
    let g = |c: f64| bm_spread_condition_i(mu, q, c);
    // g increases from q mu < 0 at C = 0+ to infinity.
    let lo = 1e-12;
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoBracket("spread of the first condition".into()));
        }
    }
    let spread_i = brent(g, lo, hi, g(lo), g(hi), 1e-15).ok_or_else(|| Error::NoBracket("spread of the first condition".into()))?;

    let h = |c: f64| bm_spread_condition_ii(mu, q, c);
    let span = Window::new(1e-6, hi.max(40.0 / -mu), 4001)?;
    let spread_ii = find_roots(h, &span, &Tolerance::default()).roots.first().copied();
    let mismatch = h(spread_i);
    let equilibrium_spread = (mismatch.abs() <= 1e-8).then_some(spread_i);
    let value = equilibrium_spread.map(|c| {
        let r = bm_stationary_mean(mu, 1.0, 0.0, c);
        (c - r) + q_d * mu
    });
    Ok(BmClosedForm {
        mu,
        q_d,
        q_u,
        spread_i,
        spread_ii,
        mismatch,
        equilibrium_spread,
        value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Exists,
    ExistsUnique,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSample {
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

/// The second residual (integral form) along one branch of first-condition
/// pairs `(a, b)`, `a < a0`, ordered by `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchEvidence {
    pub samples: Vec<MapSample>,
    pub monotone: bool,
    /// Some sample is negative, so with the existence inequality at `a0` the
    /// residual has a zero on this branch.
    pub brackets_root: bool,
}

/// Existence and uniqueness evidence for product-form costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativeReport {
    pub a0: f64,
    pub rho_a0: f64,
    /// `rho(a0) = a0` was taken as the limit of an empty branch set.
    pub rho_a0_by_closure: bool,
    pub l_a0: f64,
    /// Left side of the existence inequality (unnormalised integral form).
    pub c1_value: f64,
    pub c1_holds: bool,
    pub branches: Vec<BranchEvidence>,
    pub grid_n: usize,
    /// The number of first-condition roots was the same at every grid point.
    pub branches_continuous: bool,
    /// Positivity of the residual on first-condition pairs with `a0 < r < rho(a0)`.
    pub tail_positive: bool,
    pub assumptions_ok: bool,
    pub verdict: Verdict,
}

/// Second residual in the unnormalised integral form, with the market at `R(a, b)`.
fn integral_residual<D: Diffusion>(problem: &Problem<D>, a: f64, b: f64) -> Result<(f64, f64)> {
    let r = market_mean(problem, a, b)?;
    let sm = SpeedMeasure::new(&problem.model, &problem.tol, a, b)?;
    Ok((residual_ii_with(&sm, &problem.model, &problem.cost, r)? * sm.unnormalised_mass(), r))
}

fn monotone(values: &[f64]) -> bool {
    let eps = 1e-10 * values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    diffs.iter().all(|&d| d >= -eps) || diffs.iter().all(|&d| d <= eps)
}

/// Grid evidence for existence and uniqueness of equilibria when `c(x, y) = g(x) h(y)`.
///
/// The existence inequality is evaluated at `(a0, rho(a0))`. For uniqueness,
/// the second residual is sampled along every branch of first-condition
/// roots for `a` on the scan grid below `a0`: exactly one branch may change
/// sign, and it must do so monotonically.
pub fn multiplicative_analysis<D: Diffusion>(problem: &Problem<D>, a0: f64, scan: &Window) -> Result<MultiplicativeReport> {
    if problem.cost.product_factors().is_none() {
        return Err(Error::invalid("cost.family", "needs a product-form cost g(x) h(y)"));
    }
    if !(a0 <= 0.0) {
        return Err(Error::invalid("a0", "must be non-positive"));
    }
    scan.validate()?;
    let search = scan.expanded();
    let q = problem.cost.q_d + problem.cost.q_u;

    let (rho_a0, by_closure) = match rho(problem, a0, &search) {
        Ok(b) => (b, false),
        Err(Error::EmptyRho { .. }) => {
            let h = 1e-8 * (1.0 + a0.abs());
            let near = residual_i_at(problem, a0, a0 + h)?;
            if near.abs() > 1e-6 {
                return Err(Error::EmptyRho { a: a0 });
            }
            (a0, true)
        }
        Err(e) => return Err(e),
    };
    let (c1_value, l_a0) = if by_closure {
        (q / problem.scale_density(a0)?, problem.cost.market_statistic.eval(a0))
    } else {
        integral_residual(problem, a0, rho_a0)?
    };
    let c1_holds = c1_value >= 0.0;

    let grid: Vec<f64> = scan.nodes().filter(|&a| a < a0).collect();
    let roots: Vec<Vec<f64>> = grid.iter().map(|&a| rho_branches(problem, a, &search).roots).collect();
    let counts: Vec<usize> = roots.iter().map(Vec::len).collect();
    let branches_continuous = counts.windows(2).all(|w| w[0] == w[1]) && counts.first().is_some_and(|&n| n > 0);
    let n_branches = counts.iter().copied().min().unwrap_or(0);
    let mut branches = Vec::with_capacity(n_branches);
    for k in 0..n_branches {
        let mut samples = Vec::with_capacity(grid.len());
        for (&a, bs) in grid.iter().zip(&roots) {
            samples.push(MapSample {
                a,
                b: bs[k],
                value: integral_residual(problem, a, bs[k])?.0,
            });
        }
        let mut values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        values.push(c1_value);
        branches.push(BranchEvidence {
            monotone: monotone(&values),
            brackets_root: samples.iter().any(|s| s.value < 0.0),
            samples,
        });
    }

    let mut tail_positive = true;
    if rho_a0 > a0 {
        let n = 16;
        for i in 1..n {
            let r = a0 + (rho_a0 - a0) * i as f64 / n as f64;
            for l in rho_branches(problem, r, &search).roots {
                if integral_residual(problem, r, l)?.0 <= 0.0 {
                    tail_positive = false;
                }
            }
        }
    }

    let assumptions_ok = check_assumptions(&problem.model, &problem.cost, l_a0, scan).all_pass();
    let rooted: Vec<&BranchEvidence> = branches.iter().filter(|b| b.brackets_root).collect();
    let verdict = if !(assumptions_ok && c1_holds) {
        Verdict::Inconclusive
    } else if branches_continuous && tail_positive && rooted.len() == 1 && rooted[0].monotone {
        Verdict::ExistsUnique
    } else {
        Verdict::Exists
    };
    Ok(MultiplicativeReport {
        a0,
        rho_a0,
        rho_a0_by_closure: by_closure,
        l_a0,
        c1_value,
        c1_holds,
        branches,
        grid_n: grid.len(),
        branches_continuous,
        tail_positive,
        assumptions_ok,
        verdict,
    })
}
