//! Parametric diffusion and cost families.
//!
//! A diffusion `dX = mu(X) dt + sigma(X) dW` is summarised by its scale
//! density `S'(x) = exp(-int_{x0}^x 2 mu / sigma^2)` and speed density
//! `m'(x) = 2 / (sigma^2 S')`. Every quantity the solvers compute is a ratio
//! in which the anchor `x0` cancels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_fallible, Tolerance, Window};

/// Drift and volatility of a one-dimensional diffusion, plus its densities.
///
/// Implement this for coefficient functions that the polynomial registry
/// cannot express; every solver is generic over it.
pub trait Diffusion: Sync {
    fn drift(&self, x: f64) -> f64;
    fn volatility(&self, x: f64) -> f64;

    /// `S'(x)`, anchored to 1 at the reference point.
    fn scale_density(&self, x: f64, tol: &Tolerance) -> Result<f64>;

    fn speed_density(&self, x: f64, tol: &Tolerance) -> Result<f64> {
        let s = self.volatility(x);
        if !(s > 0.0) {
            return Err(Error::NonPositiveVolatility { x });
        }
        Ok(2.0 / (s * s * self.scale_density(x, tol)?))
    }

    /// Stationary mean of the identity on `[a, b]` in closed form, if known.
    fn stationary_mean_closed_form(&self, _a: f64, _b: f64) -> Option<f64> {
        None
    }
}

/// A real function of one variable given as data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarFn {
    Identity,
    /// `coeffs[0] + coeffs[1] x + coeffs[2] x^2 + ...`
    Poly { coeffs: Vec<f64> },
    /// `offset + scale * |x|^beta`
    AbsPow { scale: f64, beta: f64, offset: f64 },
}

impl ScalarFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalarFn::Identity => x,
            ScalarFn::Poly { coeffs } => horner(coeffs, x),
            ScalarFn::AbsPow { scale, beta, offset } => offset + scale * x.abs().powf(*beta),
        }
    }

    pub fn constant(value: f64) -> Self {
        ScalarFn::Poly { coeffs: vec![value] }
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiffusionFamily {
    /// Constant coefficients.
    BmDrift { mu: f64, sigma: f64 },
    /// Mean reversion to zero, `mu(x) = -theta x`, constant volatility.
    Ou { theta: f64, sigma: f64 },
    /// Polynomial drift and volatility coefficients (lowest degree first).
    CustomPoly { drift: Vec<f64>, volatility: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct DiffusionModel {
    pub family: DiffusionFamily,
    pub reference_point: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    family: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    drift: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    volatility: Option<Vec<f64>>,
    #[serde(default)]
    reference_point: f64,
}

fn take_params(family: &str, params: &BTreeMap<String, f64>, names: &[&str], prefix: &str) -> Result<Vec<f64>> {
    if let Some(extra) = params.keys().find(|k| !names.contains(&k.as_str())) {
        return Err(Error::invalid(format!("{prefix}.params.{extra}"), format!("not a parameter of `{family}`")));
    }
    names
        .iter()
        .map(|n| {
            params
                .get(*n)
                .copied()
                .ok_or_else(|| Error::invalid(format!("{prefix}.params.{n}"), "missing"))
        })
        .collect()
}

impl TryFrom<RawModel> for DiffusionModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        let family = match raw.family.as_str() {
            "bm_drift" => {
                let p = take_params(&raw.family, &raw.params, &["mu", "sigma"], "model")?;
                DiffusionFamily::BmDrift { mu: p[0], sigma: p[1] }
            }
            "ou" => {
                let p = take_params(&raw.family, &raw.params, &["theta", "sigma"], "model")?;
                DiffusionFamily::Ou { theta: p[0], sigma: p[1] }
            }
            "custom_poly" => {
                take_params(&raw.family, &raw.params, &[], "model")?;
                DiffusionFamily::CustomPoly {
                    drift: raw.drift.clone().ok_or_else(|| Error::invalid("model.drift", "missing"))?,
                    volatility: raw.volatility.clone().ok_or_else(|| Error::invalid("model.volatility", "missing"))?,
                }
            }
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        if !matches!(family, DiffusionFamily::CustomPoly { .. }) && (raw.drift.is_some() || raw.volatility.is_some()) {
            return Err(Error::invalid("model.drift", "coefficient lists only apply to `custom_poly`"));
        }
        let model = DiffusionModel {
            family,
            reference_point: raw.reference_point,
        };
        model.validate()?;
        Ok(model)
    }
}

impl From<DiffusionModel> for RawModel {
    fn from(m: DiffusionModel) -> Self {
        let mut raw = RawModel {
            family: String::new(),
            params: BTreeMap::new(),
            drift: None,
            volatility: None,
            reference_point: m.reference_point,
        };
        match m.family {
            DiffusionFamily::BmDrift { mu, sigma } => {
                raw.family = "bm_drift".into();
                raw.params.insert("mu".into(), mu);
                raw.params.insert("sigma".into(), sigma);
            }
            DiffusionFamily::Ou { theta, sigma } => {
                raw.family = "ou".into();
                raw.params.insert("theta".into(), theta);
                raw.params.insert("sigma".into(), sigma);
            }
            DiffusionFamily::CustomPoly { drift, volatility } => {
                raw.family = "custom_poly".into();
                raw.drift = Some(drift);
                raw.volatility = Some(volatility);
            }
        }
        raw
    }
}

impl DiffusionModel {
    pub fn bm_drift(mu: f64, sigma: f64) -> Self {
        DiffusionModel {
            family: DiffusionFamily::BmDrift { mu, sigma },
            reference_point: 0.0,
        }
    }

    pub fn ou(theta: f64, sigma: f64) -> Self {
        DiffusionModel {
            family: DiffusionFamily::Ou { theta, sigma },
            reference_point: 0.0,
        }
    }

    pub fn custom_poly(drift: Vec<f64>, volatility: Vec<f64>) -> Self {
        DiffusionModel {
            family: DiffusionFamily::CustomPoly { drift, volatility },
            reference_point: 0.0,
        }
    }

    pub fn with_reference_point(mut self, x0: f64) -> Self {
        self.reference_point = x0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.reference_point.is_finite() {
            return Err(Error::invalid("model.reference_point", "must be finite"));
        }
        match &self.family {
            DiffusionFamily::BmDrift { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::invalid("model.params.mu", "must be finite"));
                }
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::invalid("model.params.sigma", "must be positive"));
                }
            }
            DiffusionFamily::Ou { theta, sigma } => {
                if !(*theta > 0.0 && theta.is_finite()) {
                    return Err(Error::invalid("model.params.theta", "must be positive"));
                }
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::invalid("model.params.sigma", "must be positive"));
                }
            }
            DiffusionFamily::CustomPoly { drift, volatility } => {
                if volatility.is_empty() {
                    return Err(Error::invalid("model.volatility", "needs at least one coefficient"));
                }
                if drift.iter().chain(volatility).any(|c| !c.is_finite()) {
                    return Err(Error::invalid("model", "coefficients must be finite"));
                }
            }
        }
        Ok(())
    }

    /// True when the drift is odd and the volatility even about the origin.
    pub fn is_symmetric(&self) -> bool {
        match &self.family {
            DiffusionFamily::BmDrift { mu, .. } => *mu == 0.0,
            DiffusionFamily::Ou { .. } => true,
            DiffusionFamily::CustomPoly { drift, volatility } => {
                drift.iter().step_by(2).all(|&c| c == 0.0) && volatility.iter().skip(1).step_by(2).all(|&c| c == 0.0)
            }
        }
    }
}

impl Diffusion for DiffusionModel {
    fn drift(&self, x: f64) -> f64 {
        match &self.family {
            DiffusionFamily::BmDrift { mu, .. } => *mu,
            DiffusionFamily::Ou { theta, .. } => -theta * x,
            DiffusionFamily::CustomPoly { drift, .. } => horner(drift, x),
        }
    }

    fn volatility(&self, x: f64) -> f64 {
        match &self.family {
            DiffusionFamily::BmDrift { sigma, .. } | DiffusionFamily::Ou { sigma, .. } => *sigma,
            DiffusionFamily::CustomPoly { volatility, .. } => horner(volatility, x),
        }
    }

    fn scale_density(&self, x: f64, tol: &Tolerance) -> Result<f64> {
        let x0 = self.reference_point;
        match &self.family {
            DiffusionFamily::BmDrift { mu, sigma } => Ok((-2.0 * mu * (x - x0) / (sigma * sigma)).exp()),
            DiffusionFamily::Ou { theta, sigma } => Ok((theta * (x * x - x0 * x0) / (sigma * sigma)).exp()),
            DiffusionFamily::CustomPoly { .. } => {
                let exponent = integrate_fallible(
                    |u| {
                        let s = self.volatility(u);
                        if !(s > 0.0) {
                            return Err(Error::NonPositiveVolatility { x: u });
                        }
                        Ok(2.0 * self.drift(u) / (s * s))
                    },
                    x0,
                    x,
                    tol,
                )?;
                if !(self.volatility(x) > 0.0) || !(self.volatility(x0) > 0.0) {
                    return Err(Error::NonPositiveVolatility { x });
                }
                Ok((-exponent).exp())
            }
        }
    }

    fn stationary_mean_closed_form(&self, a: f64, b: f64) -> Option<f64> {
        // Both formulas lose digits to cancellation on very short intervals.
        if !(b - a > 1e-3 * (1.0 + a.abs().max(b.abs()))) {
            return None;
        }
        match self.family {
            DiffusionFamily::BmDrift { mu, sigma } if mu != 0.0 => Some(crate::mfg::bm_stationary_mean(mu, sigma, a, b)),
            DiffusionFamily::BmDrift { .. } => Some(0.5 * (a + b)),
            DiffusionFamily::Ou { theta, sigma } => Some(crate::mfg::ou_stationary_mean(theta, sigma, a, b)),
            DiffusionFamily::CustomPoly { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostFamily {
    /// `|x - y|`
    AbsDiff,
    /// `max(-lambda x, x) (1 + |y|^beta)`
    MultMaxLin { lambda: f64, beta: f64 },
    /// `scale (x - center)^2`, independent of the market level.
    Quadratic { center: f64, scale: f64 },
    /// `sum coef x^i y^j` over `(coef, i, j)` terms.
    CustomPoly { terms: Vec<(f64, u32, u32)> },
}

/// Bound `|c(x, y1) - c(x, y2)| <= F(|x|) |g(y1) - g(y2)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    #[serde(rename = "F")]
    pub outer: ScalarFn,
    #[serde(rename = "g")]
    pub inner: ScalarFn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCost", into = "RawCost")]
pub struct CostModel {
    pub family: CostFamily,
    pub q_u: f64,
    pub q_d: f64,
    /// The market statistic `f` whose stationary mean enters the cost.
    pub market_statistic: ScalarFn,
    pub envelope: Option<Envelope>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCost {
    family: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<(f64, u32, u32)>>,
    q_u: f64,
    q_d: f64,
    #[serde(default = "identity_statistic")]
    market_statistic: ScalarFn,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    envelope: Option<Envelope>,
}

fn identity_statistic() -> ScalarFn {
    ScalarFn::Identity
}

impl TryFrom<RawCost> for CostModel {
    type Error = Error;

    fn try_from(raw: RawCost) -> Result<Self> {
        let family = match raw.family.as_str() {
            "abs_diff" => {
                take_params(&raw.family, &raw.params, &[], "cost")?;
                CostFamily::AbsDiff
            }
            "mult_maxlin" => {
                let p = take_params(&raw.family, &raw.params, &["lambda", "beta"], "cost")?;
                CostFamily::MultMaxLin { lambda: p[0], beta: p[1] }
            }
            "quadratic" => {
                let p = take_params(&raw.family, &raw.params, &["center", "scale"], "cost")?;
                CostFamily::Quadratic { center: p[0], scale: p[1] }
            }
            "custom_poly" => {
                take_params(&raw.family, &raw.params, &[], "cost")?;
                CostFamily::CustomPoly {
                    terms: raw.terms.clone().ok_or_else(|| Error::invalid("cost.terms", "missing"))?,
                }
            }
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        if !matches!(family, CostFamily::CustomPoly { .. }) && raw.terms.is_some() {
            return Err(Error::invalid("cost.terms", "only applies to `custom_poly`"));
        }
        let cost = CostModel {
            family,
            q_u: raw.q_u,
            q_d: raw.q_d,
            market_statistic: raw.market_statistic,
            envelope: raw.envelope,
        };
        cost.validate()?;
        Ok(cost)
    }
}

impl From<CostModel> for RawCost {
    fn from(c: CostModel) -> Self {
        let mut params = BTreeMap::new();
        let mut terms = None;
        let family = match c.family {
            CostFamily::AbsDiff => "abs_diff",
            CostFamily::MultMaxLin { lambda, beta } => {
                params.insert("lambda".into(), lambda);
                params.insert("beta".into(), beta);
                "mult_maxlin"
            }
            CostFamily::Quadratic { center, scale } => {
                params.insert("center".into(), center);
                params.insert("scale".into(), scale);
                "quadratic"
            }
            CostFamily::CustomPoly { terms: t } => {
                terms = Some(t);
                "custom_poly"
            }
        };
        RawCost {
            family: family.into(),
            params,
            terms,
            q_u: c.q_u,
            q_d: c.q_d,
            market_statistic: c.market_statistic,
            envelope: c.envelope,
        }
    }
}

impl CostModel {
    pub fn new(family: CostFamily, q_u: f64, q_d: f64) -> Self {
        CostModel {
            family,
            q_u,
            q_d,
            market_statistic: ScalarFn::Identity,
            envelope: None,
        }
    }

    pub fn abs_diff(q_u: f64, q_d: f64) -> Self {
        Self::new(CostFamily::AbsDiff, q_u, q_d)
    }

    pub fn mult_maxlin(lambda: f64, beta: f64, q_u: f64, q_d: f64) -> Self {
        Self::new(CostFamily::MultMaxLin { lambda, beta }, q_u, q_d)
    }

    pub fn quadratic(center: f64, scale: f64, q_u: f64, q_d: f64) -> Self {
        Self::new(CostFamily::Quadratic { center, scale }, q_u, q_d)
    }

    pub fn with_envelope(mut self, outer: ScalarFn, inner: ScalarFn) -> Self {
        self.envelope = Some(Envelope { outer, inner });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_u > 0.0 && self.q_u.is_finite()) {
            return Err(Error::invalid("cost.q_u", "must be positive"));
        }
        if !(self.q_d > 0.0 && self.q_d.is_finite()) {
            return Err(Error::invalid("cost.q_d", "must be positive"));
        }
        match &self.family {
            CostFamily::AbsDiff => {}
            CostFamily::MultMaxLin { lambda, beta } => {
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::invalid("cost.params.lambda", "must be positive"));
                }
                if !(*beta >= 1.0 && beta.is_finite()) {
                    return Err(Error::invalid("cost.params.beta", "must be at least 1"));
                }
            }
            CostFamily::Quadratic { center, scale } => {
                if !center.is_finite() {
                    return Err(Error::invalid("cost.params.center", "must be finite"));
                }
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(Error::invalid("cost.params.scale", "must be positive"));
                }
            }
            CostFamily::CustomPoly { terms } => {
                if terms.iter().any(|t| !t.0.is_finite()) {
                    return Err(Error::invalid("cost.terms", "coefficients must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Running cost `c(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.family {
            CostFamily::AbsDiff => (x - y).abs(),
            CostFamily::MultMaxLin { lambda, beta } => (-lambda * x).max(x) * (1.0 + y.abs().powf(*beta)),
            CostFamily::Quadratic { center, scale } => scale * (x - center) * (x - center),
            CostFamily::CustomPoly { terms } => terms
                .iter()
                .map(|&(c, i, j)| c * x.powi(i as i32) * y.powi(j as i32))
                .sum(),
        }
    }

    /// Points in `x` where `c(., y)` is not smooth.
    pub fn kinks(&self, y: f64) -> Vec<f64> {
        match &self.family {
            CostFamily::AbsDiff => vec![y],
            CostFamily::MultMaxLin { .. } => vec![0.0],
            _ => Vec::new(),
        }
    }

    /// `c(x, y) = g(x) h(y)` for the returned factors, when the family has that form.
    pub fn product_factors(&self) -> Option<(ScalarFnOfCost, ScalarFnOfCost)> {
        match &self.family {
            CostFamily::MultMaxLin { lambda, beta } => Some((
                ScalarFnOfCost::MaxLin { lambda: *lambda },
                ScalarFnOfCost::Fn(ScalarFn::AbsPow {
                    scale: 1.0,
                    beta: *beta,
                    offset: 1.0,
                }),
            )),
            CostFamily::Quadratic { center, scale } => Some((
                ScalarFnOfCost::Fn(ScalarFn::Poly {
                    coeffs: vec![scale * center * center, -2.0 * scale * center, *scale],
                }),
                ScalarFnOfCost::Fn(ScalarFn::constant(1.0)),
            )),
            _ => None,
        }
    }
}

/// A factor of a product-form cost.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFnOfCost {
    /// `max(-lambda x, x)`
    MaxLin { lambda: f64 },
    Fn(ScalarFn),
}

impl ScalarFnOfCost {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalarFnOfCost::MaxLin { lambda } => (-lambda * x).max(x),
            ScalarFnOfCost::Fn(f) => f.eval(x),
        }
    }
}

/// A diffusion, a running cost and the numerical tolerances used on them.
#[derive(Debug, Clone)]
pub struct Problem<D: Diffusion = DiffusionModel> {
    pub model: D,
    pub cost: CostModel,
    pub tol: Tolerance,
}

impl<D: Diffusion> Problem<D> {
    pub fn new(model: D, cost: CostModel) -> Self {
        Problem {
            model,
            cost,
            tol: Tolerance::default(),
        }
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn scale_density(&self, x: f64) -> Result<f64> {
        self.model.scale_density(x, &self.tol)
    }

    pub fn speed_density(&self, x: f64) -> Result<f64> {
        self.model.speed_density(x, &self.tol)
    }

    pub fn cost_eval(&self, x: f64, y: f64) -> f64 {
        self.cost.eval(x, y)
    }
}

pub fn scale_density<D: Diffusion + ?Sized>(model: &D, x: f64, tol: &Tolerance) -> Result<f64> {
    model.scale_density(x, tol)
}

pub fn speed_density<D: Diffusion + ?Sized>(model: &D, x: f64, tol: &Tolerance) -> Result<f64> {
    model.speed_density(x, tol)
}

pub fn cost_eval(cost: &CostModel, x: f64, y: f64) -> f64 {
    cost.eval(x, y)
}

/// Grid evidence for the structural conditions on `pi1(., y)`, `pi2(., y)`
/// and `c(., y)`. Limits at infinity are only sampled, hence `heuristic`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub y: f64,
    pub window: Window,
    /// Grid argmin of `pi1(., y)`.
    pub x1: f64,
    /// Grid argmin of `pi2(., y)`.
    pub x2: f64,
    pub pi1_unimodal: bool,
    pub pi2_unimodal: bool,
    pub nonnegative: bool,
    pub min_cost: f64,
    pub pi1_diverges_right: bool,
    pub pi2_diverges_left: bool,
    /// Smallest secant slope of `c(., y) - min c` from its argmin to either edge.
    pub growth_slope: f64,
    pub linear_growth: bool,
    pub heuristic: bool,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.pi1_unimodal
            && self.pi2_unimodal
            && self.nonnegative
            && self.pi1_diverges_right
            && self.pi2_diverges_left
            && self.linear_growth
    }
}

fn argmin(xs: &[f64], vs: &[f64]) -> (usize, f64) {
    let k = vs
        .iter()
        .enumerate()
        .min_by(|p, q| p.1.total_cmp(q.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    (k, xs[k])
}

fn unimodal(vs: &[f64], k: usize, eps: f64) -> bool {
    vs[..=k].windows(2).all(|w| w[1] <= w[0] + eps) && vs[k..].windows(2).all(|w| w[1] >= w[0] - eps)
}

/// Samples the cost structure at a frozen market level `y`.
pub fn check_assumptions<D: Diffusion + ?Sized>(model: &D, cost: &CostModel, y: f64, window: &Window) -> AssumptionReport {
    let xs: Vec<f64> = window.nodes().collect();
    let cs: Vec<f64> = xs.iter().map(|&x| cost.eval(x, y)).collect();
    let p1: Vec<f64> = xs.iter().zip(&cs).map(|(&x, c)| c + cost.q_d * model.drift(x)).collect();
    let p2: Vec<f64> = xs.iter().zip(&cs).map(|(&x, c)| c - cost.q_u * model.drift(x)).collect();

    let scale = |v: &[f64]| 1e-12 * (1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    let (k1, x1) = argmin(&xs, &p1);
    let (k2, x2) = argmin(&xs, &p2);
    let (kc, xc) = argmin(&xs, &cs);
    let min_cost = cs[kc];
    let n = xs.len();
    let tail = (n / 10).max(2);

    let pi1_diverges_right = k1 + 1 < n
        && p1[n - tail..].windows(2).all(|w| w[1] > w[0])
        && p1[n - 1] > p1[k1];
    let pi2_diverges_left = k2 > 0 && p2[..tail].windows(2).all(|w| w[0] > w[1]) && p2[0] > p2[k2];

    let growth_slope = [0, n - 1]
        .iter()
        .filter(|&&i| xs[i] != xc)
        .map(|&i| (cs[i] - min_cost) / (xs[i] - xc).abs())
        .fold(f64::INFINITY, f64::min);

    AssumptionReport {
        y,
        window: *window,
        x1,
        x2,
        pi1_unimodal: unimodal(&p1, k1, scale(&p1)),
        pi2_unimodal: unimodal(&p2, k2, scale(&p2)),
        nonnegative: cs.iter().all(|&c| c >= 0.0),
        min_cost,
        pi1_diverges_right,
        pi2_diverges_left,
        growth_slope,
        linear_growth: growth_slope > 0.0 && growth_slope.is_finite(),
        heuristic: true,
    }
}
