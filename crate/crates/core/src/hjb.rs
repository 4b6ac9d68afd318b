//! Free-boundary verification of a reflecting pair.
//!
//! On `(a, b)` the relative value function solves
//! `sigma^2 u'' / 2 + mu u' + c = lambda` with `u'(a) = -q_u` and
//! `u'(b) = q_d`; outside it is extended linearly with those slopes. The
//! constant `lambda` is found by shooting. A pair is optimal when the
//! extension satisfies `L u + c >= lambda` and `-q_u <= u' <= q_d` everywhere.

use serde::{Deserialize, Serialize};

use crate::control::{pi1, pi2, ThresholdPair};
use crate::error::{Error, Result};
use crate::models::{Diffusion, Problem};
use crate::numerics::{brent, shoot_ode, shoot_ode_trajectory, Window};

pub const DEFAULT_STEPS: usize = 8192;
pub const DEFAULT_SLACK_TOL: f64 = -1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HjbSample {
    pub x: f64,
    pub u: f64,
    pub du: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjbSolution {
    pub thresholds: ThresholdPair,
    pub y: f64,
    pub lambda: f64,
    pub q_u: f64,
    pub q_d: f64,
    pub steps: usize,
    /// `u` and `u'` on `[a, b]`, normalised by `u(a) = 0`.
    pub samples: Vec<HjbSample>,
    pub min_slope: f64,
    pub max_slope: f64,
    /// Smallest `L u + c - lambda` over the samples; zero up to rounding.
    pub min_generator_slack: f64,
}

impl HjbSolution {
    fn locate(&self, x: f64) -> (usize, f64) {
        let k = self.samples.partition_point(|s| s.x <= x).clamp(1, self.samples.len() - 1);
        let (l, r) = (&self.samples[k - 1], &self.samples[k]);
        (k, (x - l.x) / (r.x - l.x))
    }

    /// `u'(x)`, with the linear extensions outside the barriers.
    pub fn slope_at(&self, x: f64) -> f64 {
        if x < self.thresholds.a {
            return -self.q_u;
        }
        if x > self.thresholds.b {
            return self.q_d;
        }
        let (k, t) = self.locate(x);
        self.samples[k - 1].du + t * (self.samples[k].du - self.samples[k - 1].du)
    }

    /// `u(x)`, with the linear extensions outside the barriers.
    pub fn value_at(&self, x: f64) -> f64 {
        let (a, b) = (self.thresholds.a, self.thresholds.b);
        if x < a {
            return self.q_u * (a - x);
        }
        if x > b {
            return self.samples.last().map_or(0.0, |s| s.u) + self.q_d * (x - b);
        }
        let (k, t) = self.locate(x);
        self.samples[k - 1].u + t * (self.samples[k].u - self.samples[k - 1].u)
    }

    /// `(L u)(x) + c(x, y) - lambda`. Inside the barriers `u''` is taken from
    /// the equation itself; outside `u'' = 0`.
    pub fn generator_slack<D: Diffusion>(&self, problem: &Problem<D>, x: f64) -> f64 {
        let (model, cost) = (&problem.model, &problem.cost);
        if x < self.thresholds.a || x > self.thresholds.b {
            return model.drift(x) * self.slope_at(x) + cost.eval(x, self.y) - self.lambda;
        }
        let du = self.slope_at(x);
        let s = model.volatility(x);
        let d2u = second_derivative(model, cost.eval(x, self.y), self.lambda, x, du);
        0.5 * s * s * d2u + model.drift(x) * du + cost.eval(x, self.y) - self.lambda
    }
}

fn second_derivative<D: Diffusion + ?Sized>(model: &D, c: f64, lambda: f64, x: f64, du: f64) -> f64 {
    let s = model.volatility(x);
    2.0 * (lambda - c - model.drift(x) * du) / (s * s)
}

/// Sub-intervals of `[a, b]` split at the cost kinks, each with its share of `steps`.
fn segments(a: f64, b: f64, kinks: &[f64], steps: usize) -> Vec<(f64, f64, usize)> {
    let mut cuts: Vec<f64> = kinks.iter().copied().filter(|&k| k > a && k < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    let mut left = a;
    for right in cuts.into_iter().chain(std::iter::once(b)) {
        let share = ((right - left) / (b - a) * steps as f64).round() as usize;
        out.push((left, right, share.max(16)));
        left = right;
    }
    out
}

/// Solves the free-boundary problem on a fixed pair.
pub fn solve_fbp<D: Diffusion>(problem: &Problem<D>, interval: ThresholdPair, y: f64, steps: usize) -> Result<HjbSolution> {
    let (model, cost) = (&problem.model, &problem.cost);
    let (a, b) = (interval.a, interval.b);
    if !(a < b) {
        return Err(Error::DegenerateInterval { a, b });
    }
    if steps < 16 {
        return Err(Error::invalid("hjb.steps", "need at least 16 steps"));
    }
    let segs = segments(a, b, &cost.kinks(y), steps);
    for &(lo, hi, n) in &segs {
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            if !(model.volatility(x) > 0.0) {
                return Err(Error::NonPositiveVolatility { x });
            }
        }
    }

    let terminal_slope = |lambda: f64| -> Result<f64> {
        let mut v = [-cost.q_u];
        for &(lo, hi, n) in &segs {
            v = shoot_ode(|x, s: &[f64; 1]| [second_derivative(model, cost.eval(x, y), lambda, x, s[0])], lo, hi, v, n)?;
        }
        Ok(v[0] - cost.q_d)
    };

    // The terminal slope is increasing in lambda; expand until it changes sign.
    let centre = cost.eval(0.5 * (a + b), y);
    let mut width = 1.0 + centre.abs();
    let (mut lo, mut hi) = (centre - width, centre + width);
    let (mut f_lo, mut f_hi) = (terminal_slope(lo)?, terminal_slope(hi)?);
    let mut tries = 0;
    while f_lo > 0.0 || f_hi < 0.0 {
        tries += 1;
        if tries > 60 {
            return Err(Error::NoBracket(format!("no value of lambda matches the slope q_d at b = {b}")));
        }
        width *= 2.0;
        if f_lo > 0.0 {
            lo -= width;
            f_lo = terminal_slope(lo)?;
        }
        if f_hi < 0.0 {
            hi += width;
            f_hi = terminal_slope(hi)?;
        }
    }
    let lambda = brent(|l| terminal_slope(l).unwrap_or(f64::NAN), lo, hi, f_lo, f_hi, 1e-14)
        .ok_or_else(|| Error::NoBracket(format!("lambda refinement failed on [{lo}, {hi}]")))?;

    let mut samples: Vec<HjbSample> = Vec::with_capacity(steps + segs.len());
    let mut state = [0.0, -cost.q_u];
    for &(lo, hi, n) in &segs {
        let traj = shoot_ode_trajectory(
            |x, s: &[f64; 2]| [s[1], second_derivative(model, cost.eval(x, y), lambda, x, s[1])],
            lo,
            hi,
            state,
            n,
        )?;
        let skip = usize::from(!samples.is_empty());
        samples.extend(traj.iter().skip(skip).map(|(x, s)| HjbSample { x: *x, u: s[0], du: s[1] }));
        state = traj.last().map(|p| p.1).unwrap_or(state);
    }

    let min_slope = samples.iter().map(|s| s.du).fold(f64::INFINITY, f64::min);
    let max_slope = samples.iter().map(|s| s.du).fold(f64::NEG_INFINITY, f64::max);
    let mut sol = HjbSolution {
        thresholds: interval,
        y,
        lambda,
        q_u: cost.q_u,
        q_d: cost.q_d,
        steps,
        samples,
        min_slope,
        max_slope,
        min_generator_slack: 0.0,
    };
    sol.min_generator_slack = sol
        .samples
        .iter()
        .map(|s| sol.generator_slack(problem, s.x))
        .fold(f64::INFINITY, f64::min);
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `u'` left `[-q_u, q_d]`.
    Slope,
    /// `L u + c - lambda` fell below the slack tolerance.
    Generator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub x: f64,
    pub kind: ViolationKind,
    /// Distance past the bound, positive.
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub window: Window,
    pub slack_tol: f64,
    pub lambda: f64,
    pub min_slack: f64,
    pub min_slack_at: f64,
    pub min_slope: f64,
    pub max_slope: f64,
    pub slope_ok: bool,
    pub slack_ok: bool,
    pub pass: bool,
    pub violations: Vec<Violation>,
}

/// `[a - margin, b + margin]` on `grid_n` nodes.
pub fn check_window(interval: ThresholdPair, margin: f64, grid_n: usize) -> Result<Window> {
    Window::new(interval.a - margin, interval.b + margin, grid_n)
}

/// Checks the verification inequalities on the nodes of `window`.
pub fn verify_hjb<D: Diffusion>(problem: &Problem<D>, solution: &HjbSolution, window: &Window, slack_tol: f64) -> VerificationReport {
    let slope_eps = 1e-9 * (1.0 + solution.q_u.max(solution.q_d));
    let mut violations = Vec::new();
    let (mut min_slack, mut min_slack_at) = (f64::INFINITY, window.lo);
    let (mut min_slope, mut max_slope) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in window.nodes() {
        let du = solution.slope_at(x);
        min_slope = min_slope.min(du);
        max_slope = max_slope.max(du);
        let over = (du - solution.q_d).max(-solution.q_u - du);
        if over > slope_eps {
            violations.push(Violation {
                x,
                kind: ViolationKind::Slope,
                amount: over,
            });
        }
        let slack = solution.generator_slack(problem, x);
        if slack < min_slack {
            min_slack = slack;
            min_slack_at = x;
        }
        if slack < slack_tol {
            violations.push(Violation {
                x,
                kind: ViolationKind::Generator,
                amount: slack_tol - slack,
            });
        }
    }
    let slope_ok = !violations.iter().any(|v| v.kind == ViolationKind::Slope);
    let slack_ok = !violations.iter().any(|v| v.kind == ViolationKind::Generator);
    VerificationReport {
        window: *window,
        slack_tol,
        lambda: solution.lambda,
        min_slack,
        min_slack_at,
        min_slope,
        max_slope,
        slope_ok,
        slack_ok,
        pass: slope_ok && slack_ok,
        violations,
    }
}

/// Outside the barriers the slack reduces to `pi1 - lambda` above and `pi2 - lambda` below.
pub fn outer_slack<D: Diffusion>(problem: &Problem<D>, solution: &HjbSolution, x: f64) -> Option<f64> {
    let (model, cost) = (&problem.model, &problem.cost);
    if x > solution.thresholds.b {
        Some(pi1(model, cost, x, solution.y) - solution.lambda)
    } else if x < solution.thresholds.a {
        Some(pi2(model, cost, x, solution.y) - solution.lambda)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::ergodic_cost;
    use crate::models::{CostModel, DiffusionModel};

    #[test]
    fn lambda_matches_ergodic_cost() {
        let p = Problem::new(DiffusionModel::ou(0.4, 2.0), CostModel::mult_maxlin(1.0, 1.0, 0.1, 0.1));
        for (a, b) in [(-0.6, 0.7), (-2.0, -0.5), (0.3, 1.1)] {
            let pair = ThresholdPair::new(a, b).unwrap();
            let sol = solve_fbp(&p, pair, 0.0, DEFAULT_STEPS).unwrap();
            let g = ergodic_cost(&p, pair, 0.0).unwrap();
            assert!((sol.lambda - g).abs() < 1e-6 * (1.0 + g), "{} vs {g}", sol.lambda);
        }
    }

    #[test]
    fn boundary_slopes_are_the_prices() {
        let p = Problem::new(DiffusionModel::bm_drift(-0.5, 1.0), CostModel::abs_diff(0.2, 0.3));
        let sol = solve_fbp(&p, ThresholdPair::new(-1.0, 0.8).unwrap(), 0.1, 2048).unwrap();
        assert_eq!(sol.samples[0].du, -0.2);
        assert!((sol.samples.last().unwrap().du - 0.3).abs() < 1e-10);
        assert_eq!(sol.samples[0].u, 0.0);
        assert_eq!(sol.samples.last().unwrap().x, 0.8);
        assert!(sol.min_generator_slack.abs() < 1e-12);
    }

    #[test]
    fn symmetric_problem_has_odd_slope() {
        let p = Problem::new(
            DiffusionModel::bm_drift(0.0, std::f64::consts::SQRT_2),
            CostModel::quadratic(0.0, 1.0, 0.25, 0.25),
        );
        let sol = solve_fbp(&p, ThresholdPair::new(-1.0, 1.0).unwrap(), 0.0, 4096).unwrap();
        for x in [0.1, 0.37, 0.9] {
            assert!((sol.slope_at(x) + sol.slope_at(-x)).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn outside_slack_is_pi_minus_lambda() {
        let p = Problem::new(DiffusionModel::ou(0.4, 2.0), CostModel::mult_maxlin(1.0, 1.0, 0.1, 0.1));
        let sol = solve_fbp(&p, ThresholdPair::new(-0.5, 0.9).unwrap(), 0.3, 1024).unwrap();
        for x in [-3.0, -0.51, 0.91, 4.0] {
            let want = outer_slack(&p, &sol, x).unwrap();
            assert!((sol.generator_slack(&p, x) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_steps_rejected() {
        let p = Problem::new(DiffusionModel::ou(0.4, 2.0), CostModel::abs_diff(0.1, 0.1));
        assert!(solve_fbp(&p, ThresholdPair::new(-1.0, 1.0).unwrap(), 0.0, 8).is_err());
    }
}
