//! Single-agent ergodic control with a frozen market level `y`: the
//! drift-adjusted costs, the long-run average cost of a reflecting pair and
//! the optimal pair itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{check_assumptions, AssumptionReport, CostModel, Diffusion, Problem};
use crate::numerics::{integrate_with_breaks, intersect_on_curve, Tolerance, Window};

/// Reflecting barriers `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdPair {
    pub a: f64,
    pub b: f64,
}

pub const DEFAULT_MIN_WIDTH: f64 = 1e-6;

impl ThresholdPair {
    /// Checked constructor with the default minimum width.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Self::with_min_width(a, b, DEFAULT_MIN_WIDTH)
    }

    pub fn with_min_width(a: f64, b: f64, min_width: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || !(b - a >= min_width) {
            return Err(Error::DegenerateInterval { a, b });
        }
        Ok(ThresholdPair { a, b })
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

/// `pi1(x, y) = c(x, y) + q_d mu(x)`.
pub fn pi1<D: Diffusion + ?Sized>(model: &D, cost: &CostModel, x: f64, y: f64) -> f64 {
    cost.eval(x, y) + cost.q_d * model.drift(x)
}

/// `pi2(x, y) = c(x, y) - q_u mu(x)`.
pub fn pi2<D: Diffusion + ?Sized>(model: &D, cost: &CostModel, x: f64, y: f64) -> f64 {
    cost.eval(x, y) - cost.q_u * model.drift(x)
}

/// The speed measure restricted to `[a, b]`, renormalised so that the scale
/// density is 1 at the midpoint. Ratios of its integrals do not depend on the
/// normalisation, and keeping the weights near 1 keeps absolute quadrature
/// tolerances meaningful far from the model's reference point.
pub(crate) struct SpeedMeasure<'p, D: Diffusion> {
    model: &'p D,
    tol: Tolerance,
    scale_ref: f64,
    pub a: f64,
    pub b: f64,
    pub mass: f64,
}

impl<'p, D: Diffusion> SpeedMeasure<'p, D> {
    pub fn new(model: &'p D, tol: &Tolerance, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::DegenerateInterval { a, b });
        }
        let scale_ref = model.scale_density(0.5 * (a + b), tol)?;
        let mut out = SpeedMeasure {
            model,
            tol: *tol,
            scale_ref,
            a,
            b,
            mass: 0.0,
        };
        out.mass = out.integral(|_| 1.0, &[])?;
        Ok(out)
    }

    pub fn density(&self, t: f64) -> Result<f64> {
        Ok(self.model.speed_density(t, &self.tol)? * self.scale_ref)
    }

    /// `1 / S'(x)` under the local normalisation.
    pub fn boundary_weight(&self, x: f64) -> Result<f64> {
        Ok(self.scale_ref / self.model.scale_density(x, &self.tol)?)
    }

    pub fn integral<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64]) -> Result<f64> {
        integrate_with_breaks(|t| Ok(f(t) * self.density(t)?), self.a, self.b, breaks, &self.tol)
    }

    /// Speed mass under the model's own anchoring of `S'`.
    pub fn unnormalised_mass(&self) -> f64 {
        self.mass / self.scale_ref
    }

    pub fn mean<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64]) -> Result<f64> {
        Ok(self.integral(f, breaks)? / self.mass)
    }
}

fn cost_with_weights<D: Diffusion>(sm: &SpeedMeasure<'_, D>, cost: &CostModel, y: f64) -> Result<f64> {
    let running = sm.integral(|t| cost.eval(t, y), &cost.kinks(y))?;
    let push = cost.q_u * sm.boundary_weight(sm.a)? + cost.q_d * sm.boundary_weight(sm.b)?;
    Ok((running + push) / sm.mass)
}

/// Long-run average cost of reflecting at `interval` with the market frozen at `y`.
pub fn ergodic_cost<D: Diffusion>(problem: &Problem<D>, interval: ThresholdPair, y: f64) -> Result<f64> {
    let sm = SpeedMeasure::new(&problem.model, &problem.tol, interval.a, interval.b)?;
    cost_with_weights(&sm, &problem.cost, y)
}

/// Residuals of the optimality system at `(a, b)` for market level `y`.
///
/// The first is `pi1(b, y) - pi2(a, y)`. The second is
/// `[int_a^b (pi1(t, y) - pi1(b, y)) m(dt) + (q_d + q_u) / S'(a)] / m(a, b)`,
/// i.e. the raw integral divided by the speed mass, which makes it
/// independent of how `S'` is normalised. It equals `ergodic_cost - pi1(b, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub residual_i: f64,
    pub residual_ii: f64,
}

pub(crate) fn residual_ii_with<D: Diffusion>(sm: &SpeedMeasure<'_, D>, model: &D, cost: &CostModel, y: f64) -> Result<f64> {
    let top = pi1(model, cost, sm.b, y);
    let gap = sm.integral(|t| pi1(model, cost, t, y) - top, &cost.kinks(y))?;
    Ok((gap + (cost.q_d + cost.q_u) * sm.boundary_weight(sm.a)?) / sm.mass)
}

pub fn optimality_residuals<D: Diffusion>(problem: &Problem<D>, interval: ThresholdPair, y: f64) -> Result<Residuals> {
    let sm = SpeedMeasure::new(&problem.model, &problem.tol, interval.a, interval.b)?;
    Ok(Residuals {
        residual_i: pi1(&problem.model, &problem.cost, interval.b, y) - pi2(&problem.model, &problem.cost, interval.a, y),
        residual_ii: residual_ii_with(&sm, &problem.model, &problem.cost, y)?,
    })
}

/// A pair satisfying the optimality system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub thresholds: ThresholdPair,
    pub value: f64,
    pub residual_i: f64,
    pub residual_ii: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSolution {
    pub y: f64,
    pub thresholds: ThresholdPair,
    pub value: f64,
    pub residual_i: f64,
    pub residual_ii: f64,
    /// Every other pair that satisfied both conditions, by increasing value.
    pub alternatives: Vec<Candidate>,
    /// The window actually searched, after any expansion.
    pub scan: Window,
    pub assumption_report: AssumptionReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlOptions {
    pub min_width: f64,
    /// How many times the scan window may be doubled when nothing is found.
    pub max_expansions: u32,
    /// Acceptance bound for both residuals, relative to `1 + |value|`.
    pub residual_tol: f64,
}

impl Default for ControlOptions {
    fn default() -> Self {
        ControlOptions {
            min_width: DEFAULT_MIN_WIDTH,
            max_expansions: 4,
            residual_tol: 1e-7,
        }
    }
}

pub fn solve_control<D: Diffusion>(problem: &Problem<D>, y: f64, scan: &Window) -> Result<ControlSolution> {
    solve_control_with(problem, y, scan, &ControlOptions::default())
}

pub fn solve_control_with<D: Diffusion>(problem: &Problem<D>, y: f64, scan: &Window, opts: &ControlOptions) -> Result<ControlSolution> {
    scan.validate()?;
    let mut window = *scan;
    for _ in 0..=opts.max_expansions {
        let mut found = control_candidates(problem, y, &window, opts);
        if !found.is_empty() {
            found.sort_by(|p, q| p.value.total_cmp(&q.value));
            let best = found.remove(0);
            if best.thresholds.width() < opts.min_width {
                return Err(Error::DegenerateInterval {
                    a: best.thresholds.a,
                    b: best.thresholds.b,
                });
            }
            return Ok(ControlSolution {
                y,
                thresholds: best.thresholds,
                value: best.value,
                residual_i: best.residual_i,
                residual_ii: best.residual_ii,
                alternatives: found,
                scan: window,
                assumption_report: check_assumptions(&problem.model, &problem.cost, y, &window),
            });
        }
        window = window.expanded();
    }
    Err(Error::NoBracket(format!(
        "the optimality residuals have no common zero on [{}, {}] after {} expansions",
        window.lo, window.hi, opts.max_expansions
    )))
}

fn control_candidates<D: Diffusion>(problem: &Problem<D>, y: f64, window: &Window, opts: &ControlOptions) -> Vec<Candidate> {
    let (model, cost) = (&problem.model, &problem.cost);
    let first = |a: f64, b: f64| pi1(model, cost, b, y) - pi2(model, cost, a, y);
    let second = |a: f64, b: f64| {
        SpeedMeasure::new(model, &problem.tol, a, b)
            .and_then(|sm| residual_ii_with(&sm, model, cost, y))
            .unwrap_or(f64::NAN)
    };
    let points = intersect_on_curve(first, second, window, opts.min_width, &problem.tol);
    let mut out: Vec<Candidate> = Vec::new();
    for (a, b) in points {
        let Ok(pair) = ThresholdPair::with_min_width(a, b, opts.min_width) else {
            continue;
        };
        let (Ok(res), Ok(value)) = (optimality_residuals(problem, pair, y), ergodic_cost(problem, pair, y)) else {
            continue;
        };
        let bound = opts.residual_tol * (1.0 + value.abs());
        if res.residual_i.abs() > bound || res.residual_ii.abs() > bound {
            continue;
        }
        if out.iter().any(|c| (c.thresholds.a - a).abs() < 1e-7 && (c.thresholds.b - b).abs() < 1e-7) {
            continue;
        }
        out.push(Candidate {
            thresholds: pair,
            value,
            residual_i: res.residual_i,
            residual_ii: res.residual_ii,
        });
    }
    out
}
