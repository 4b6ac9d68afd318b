//! Monte Carlo for reflected diffusions.
//!
//! Paths follow the projected Euler scheme: an unconstrained Euler step is
//! clipped back into `[a, b]` and the clipped distance is charged to the
//! pushing process at that barrier. Every path owns a ChaCha8 stream keyed by
//! `(seed, role, index)`, and all reductions run in index order, so results
//! do not depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::ThresholdPair;
use crate::error::{Error, Result};
use crate::models::{CostModel, Diffusion, Problem, ScalarFn};
use crate::numerics::Window;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Initial stretch excluded from all averages.
    pub burn_in: f64,
    pub paths: usize,
    pub seed: u64,
    /// Starting state; the interval midpoint when absent.
    pub x0: Option<f64>,
    /// Size of the independent market ensemble; `16 * paths` when absent.
    pub market_paths: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-3,
            t_max: 100.0,
            burn_in: 10.0,
            paths: 64,
            seed: 0,
            x0: None,
            market_paths: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("sim.dt", "must be positive"));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::invalid("sim.t_max", "must be positive"));
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.t_max) {
            return Err(Error::invalid("sim.burn_in", "must lie in [0, t_max)"));
        }
        if self.steps() <= self.burn_steps() {
            return Err(Error::invalid("sim.dt", "no steps left after burn-in"));
        }
        if self.paths == 0 {
            return Err(Error::invalid("sim.paths", "must be positive"));
        }
        if self.market_paths == Some(0) {
            return Err(Error::invalid("sim.market_paths", "must be positive"));
        }
        if self.x0.is_some_and(|x| !x.is_finite()) {
            return Err(Error::invalid("sim.x0", "must be finite"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    pub fn burn_steps(&self) -> usize {
        (self.burn_in / self.dt).round() as usize
    }

    /// Length of the averaging window.
    pub fn horizon(&self) -> f64 {
        (self.steps() - self.burn_steps()) as f64 * self.dt
    }

    pub fn market_size(&self) -> usize {
        self.market_paths.unwrap_or(16 * self.paths)
    }

    /// `dt < (b - a)^2 / sigma_max^2` with `sigma_max` sampled on the interval.
    pub fn step_is_fine<D: Diffusion + ?Sized>(&self, model: &D, interval: ThresholdPair) -> bool {
        let smax = (0..=32)
            .map(|i| model.volatility(interval.a + interval.width() * i as f64 / 32.0).abs())
            .fold(0.0, f64::max);
        smax == 0.0 || self.dt < interval.width().powi(2) / (smax * smax)
    }
}

const ROLE_PATH: u64 = 1;
const ROLE_MARKET: u64 = 2;
const ROLE_PLAYER: u64 = 3;

fn stream(seed: u64, role: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((role << 56) ^ index);
    rng
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Estimate {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std_error = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0) / n).sqrt()
        };
        Estimate { mean, std_error }
    }
}

/// One reflected path on `[a, b]` with its pushing processes.
#[derive(Debug, Clone, Copy)]
struct Reflected {
    a: f64,
    b: f64,
    x: f64,
    u: f64,
    d: f64,
}

impl Reflected {
    /// Starts at `x0`, jumping to the nearest barrier if outside.
    fn start(interval: ThresholdPair, x0: f64) -> Self {
        let (a, b) = (interval.a, interval.b);
        Reflected {
            a,
            b,
            x: x0.clamp(a, b),
            u: (a - x0).max(0.0),
            d: (x0 - b).max(0.0),
        }
    }

    #[inline]
    fn step<D: Diffusion + ?Sized>(&mut self, model: &D, dt: f64, sqrt_dt: f64, xi: f64) {
        let z = self.x + model.drift(self.x) * dt + model.volatility(self.x) * sqrt_dt * xi;
        if z < self.a {
            self.u += self.a - z;
            self.x = self.a;
        } else if z > self.b {
            self.d += z - self.b;
            self.x = self.b;
        } else {
            self.x = z;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    /// Totals over `[0, t_max]`, including any push at time 0.
    pub u_total: f64,
    pub d_total: f64,
    /// Increments over the averaging window.
    pub u_window: f64,
    pub d_window: f64,
    /// Time average of the state over the averaging window.
    pub time_average: f64,
    pub final_state: f64,
    /// States at `t = 0, dt, ..., t_max` (after the initial push), when recorded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectedRun {
    pub interval: ThresholdPair,
    pub x0: f64,
    pub horizon: f64,
    pub seed: u64,
    pub time_average: Estimate,
    #[serde(rename = "U_rate")]
    pub u_rate: Estimate,
    #[serde(rename = "D_rate")]
    pub d_rate: Estimate,
    /// `(U - D) / T` over the averaging window.
    pub net_rate: Estimate,
    pub paths: Vec<PathSummary>,
}

/// Simulates `config.paths` independent reflected paths started at `x0`.
pub fn simulate_reflected<D: Diffusion>(model: &D, interval: ThresholdPair, x0: f64, config: &SimConfig, record: bool) -> Result<ReflectedRun> {
    config.validate()?;
    let (n, nb) = (config.steps(), config.burn_steps());
    let (dt, sqrt_dt) = (config.dt, config.dt.sqrt());
    let horizon = config.horizon();
    let paths: Vec<PathSummary> = (0..config.paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = stream(config.seed, ROLE_PATH, p as u64);
            let mut s = Reflected::start(interval, x0);
            let mut path = record.then(|| {
                let mut v = Vec::with_capacity(n + 1);
                v.push(s.x);
                v
            });
            let (mut u0, mut d0, mut area) = (s.u, s.d, 0.0);
            for k in 0..n {
                if k == nb {
                    u0 = s.u;
                    d0 = s.d;
                }
                if k >= nb {
                    area += s.x * dt;
                }
                s.step(model, dt, sqrt_dt, StandardNormal.sample(&mut rng));
                if let Some(v) = path.as_mut() {
                    v.push(s.x);
                }
            }
            PathSummary {
                u_total: s.u,
                d_total: s.d,
                u_window: s.u - u0,
                d_window: s.d - d0,
                time_average: area / horizon,
                final_state: s.x,
                path,
            }
        })
        .collect();
    let per = |f: &dyn Fn(&PathSummary) -> f64| Estimate::from_samples(&paths.iter().map(f).collect::<Vec<_>>());
    Ok(ReflectedRun {
        interval,
        x0,
        horizon,
        seed: config.seed,
        time_average: per(&|p| p.time_average),
        u_rate: per(&|p| p.u_window / horizon),
        d_rate: per(&|p| p.d_window / horizon),
        net_rate: per(&|p| (p.u_window - p.d_window) / horizon),
        paths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Long-run average of running cost plus push costs.
    pub estimate: f64,
    pub std_error: f64,
    #[serde(rename = "U_rate")]
    pub u_rate: f64,
    #[serde(rename = "D_rate")]
    pub d_rate: f64,
    pub paths_used: usize,
    pub market_paths: usize,
    pub seed: u64,
}

const MARKET_CHUNK: usize = 8;
const MARKET_BATCH: usize = 16;

/// Cross-path mean of `f(Y_s)` at every step for reflection on `market`.
fn market_series<D: Diffusion>(model: &D, f: &ScalarFn, market: ThresholdPair, config: &SimConfig) -> Vec<f64> {
    let n = config.steps();
    let m = config.market_size();
    let (dt, sqrt_dt) = (config.dt, config.dt.sqrt());
    let y0 = 0.5 * (market.a + market.b);
    let chunks: Vec<(usize, usize)> = (0..m).step_by(MARKET_CHUNK).map(|s| (s, (s + MARKET_CHUNK).min(m))).collect();
    let mut total = vec![0.0; n];
    for batch in chunks.chunks(MARKET_BATCH) {
        let sums: Vec<Vec<f64>> = batch
            .par_iter()
            .map(|&(lo, hi)| {
                let mut acc = vec![0.0; n];
                for p in lo..hi {
                    let mut rng = stream(config.seed, ROLE_MARKET, p as u64);
                    let mut s = Reflected::start(market, y0);
                    for slot in acc.iter_mut() {
                        *slot += f.eval(s.x);
                        s.step(model, dt, sqrt_dt, StandardNormal.sample(&mut rng));
                    }
                }
                acc
            })
            .collect();
        for acc in &sums {
            for (t, v) in total.iter_mut().zip(acc) {
                *t += v;
            }
        }
    }
    let inv = 1.0 / m as f64;
    total.iter_mut().for_each(|t| *t *= inv);
    total
}

/// Cost of one reflected path against a given market series.
fn path_cost<D: Diffusion>(model: &D, cost: &CostModel, s: &mut Reflected, rng: &mut ChaCha8Rng, market: &[f64], config: &SimConfig) -> (f64, f64, f64) {
    let nb = config.burn_steps();
    let (dt, sqrt_dt) = (config.dt, config.dt.sqrt());
    let (mut u0, mut d0, mut running) = (s.u, s.d, 0.0);
    for (k, &y) in market.iter().enumerate() {
        if k == nb {
            u0 = s.u;
            d0 = s.d;
        }
        if k >= nb {
            running += cost.eval(s.x, y) * dt;
        }
        s.step(model, dt, sqrt_dt, StandardNormal.sample(rng));
    }
    (running, s.u - u0, s.d - d0)
}

/// Monte Carlo long-run average cost of reflecting on `player` while the
/// market reflects on `market`.
pub fn estimate_ergodic_cost<D: Diffusion>(problem: &Problem<D>, player: ThresholdPair, market: ThresholdPair, config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    if config.paths < 2 {
        return Err(Error::invalid("sim.paths", "need at least 2 paths for an error estimate"));
    }
    let series = market_series(&problem.model, &problem.cost.market_statistic, market, config);
    let x0 = config.x0.unwrap_or(0.5 * (player.a + player.b));
    let horizon = config.horizon();
    let per_path: Vec<(f64, f64, f64)> = (0..config.paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = stream(config.seed, ROLE_PATH, p as u64);
            let mut s = Reflected::start(player, x0);
            let (running, du, dd) = path_cost(&problem.model, &problem.cost, &mut s, &mut rng, &series, config);
            ((running + problem.cost.q_u * du + problem.cost.q_d * dd) / horizon, du / horizon, dd / horizon)
        })
        .collect();
    let est = Estimate::from_samples(&per_path.iter().map(|p| p.0).collect::<Vec<_>>());
    let n = per_path.len() as f64;
    Ok(SimResult {
        estimate: est.mean,
        std_error: est.std_error,
        u_rate: per_path.iter().map(|p| p.1).sum::<f64>() / n,
        d_rate: per_path.iter().map(|p| p.2).sum::<f64>() / n,
        paths_used: per_path.len(),
        market_paths: config.market_size(),
        seed: config.seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NPlayerResult {
    #[serde(rename = "N")]
    pub n: usize,
    /// Cost of a player when everyone reflects at the equilibrium pair.
    pub v_equilibrium: f64,
    /// Smallest cost over the deviation grid, the others staying put.
    pub v_best_deviation: f64,
    pub best_deviation: ThresholdPair,
    pub epsilon_hat: f64,
    /// Standard error of `v_equilibrium` across replications.
    pub std_error: f64,
    /// Paired standard error of `v_equilibrium - v_best_deviation`.
    pub epsilon_std_error: f64,
    pub deviation_grid: Vec<ThresholdPair>,
    pub deviation_values: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
}

/// The equilibrium pair and its shifts by `delta` in either barrier, on a 3 x 3 grid.
pub fn perturbation_grid(equilibrium: ThresholdPair, delta: f64) -> Vec<ThresholdPair> {
    let mut out = vec![equilibrium];
    for da in [-delta, 0.0, delta] {
        for db in [-delta, 0.0, delta] {
            if da == 0.0 && db == 0.0 {
                continue;
            }
            if let Ok(p) = ThresholdPair::new(equilibrium.a + da, equilibrium.b + db) {
                out.push(p);
            }
        }
    }
    out
}

/// Estimates how much a single player can gain by deviating from the
/// symmetric profile in an `n`-player game whose market is the empirical
/// mean of the other players' statistic.
///
/// `config.paths` independent games are simulated. In each one every player
/// is tagged in turn and re-run under every deviation with its own noise, so
/// deviations share random numbers with the equilibrium run.
pub fn nplayer_experiment<D: Diffusion>(problem: &Problem<D>, equilibrium: ThresholdPair, n: usize, deviation_grid: &[ThresholdPair], config: &SimConfig) -> Result<NPlayerResult> {
    config.validate()?;
    if n < 2 {
        return Err(Error::invalid("nplayer.n", "need at least 2 players"));
    }
    if !deviation_grid.iter().any(|p| *p == equilibrium) {
        return Err(Error::invalid("nplayer.deviation_grid", "must contain the equilibrium pair"));
    }
    let (model, cost) = (&problem.model, &problem.cost);
    let f = &cost.market_statistic;
    let steps = config.steps();
    let nb = config.burn_steps();
    let (dt, sqrt_dt) = (config.dt, config.dt.sqrt());
    let horizon = config.horizon();
    let x0 = config.x0.unwrap_or(0.5 * (equilibrium.a + equilibrium.b));
    let g = deviation_grid.len();
    let player_id = |r: usize, j: usize| ((r as u64) << 24) | j as u64;

    // Per replication: mean equilibrium cost and mean cost under each deviation.
    let reps: Vec<(f64, Vec<f64>)> = (0..config.paths)
        .into_par_iter()
        .map(|r| {
            let mut total = vec![0.0; steps];
            for j in 0..n {
                let mut rng = stream(config.seed, ROLE_PLAYER, player_id(r, j));
                let mut s = Reflected::start(equilibrium, x0);
                for slot in total.iter_mut() {
                    *slot += f.eval(s.x);
                    s.step(model, dt, sqrt_dt, StandardNormal.sample(&mut rng));
                }
            }
            let mut eq_cost = 0.0;
            let mut dev_cost = vec![0.0; g];
            let mut own = Vec::with_capacity(g + 1);
            for i in 0..n {
                let mut rng = stream(config.seed, ROLE_PLAYER, player_id(r, i));
                own.clear();
                own.push(Reflected::start(equilibrium, x0));
                own.extend(deviation_grid.iter().map(|&p| Reflected::start(p, x0)));
                let mut marks: Vec<(f64, f64)> = own.iter().map(|s| (s.u, s.d)).collect();
                let mut running = vec![0.0; g + 1];
                for (k, &sum) in total.iter().enumerate() {
                    if k == nb {
                        marks = own.iter().map(|s| (s.u, s.d)).collect();
                    }
                    let y = (sum - f.eval(own[0].x)) / (n - 1) as f64;
                    if k >= nb {
                        for (acc, s) in running.iter_mut().zip(&own) {
                            *acc += cost.eval(s.x, y) * dt;
                        }
                    }
                    let xi: f64 = StandardNormal.sample(&mut rng);
                    for s in own.iter_mut() {
                        s.step(model, dt, sqrt_dt, xi);
                    }
                }
                let value = |idx: usize| {
                    let s = &own[idx];
                    (running[idx] + cost.q_u * (s.u - marks[idx].0) + cost.q_d * (s.d - marks[idx].1)) / horizon
                };
                eq_cost += value(0);
                for (k, d) in dev_cost.iter_mut().enumerate() {
                    *d += value(k + 1);
                }
            }
            let inv = 1.0 / n as f64;
            (eq_cost * inv, dev_cost.into_iter().map(|d| d * inv).collect())
        })
        .collect();

    let eq_samples: Vec<f64> = reps.iter().map(|r| r.0).collect();
    let eq = Estimate::from_samples(&eq_samples);
    let deviation_values: Vec<f64> = (0..g)
        .map(|k| reps.iter().map(|r| r.1[k]).sum::<f64>() / reps.len() as f64)
        .collect();
    let best = deviation_values
        .iter()
        .enumerate()
        .min_by(|p, q| p.1.total_cmp(q.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let paired: Vec<f64> = reps.iter().map(|r| r.0 - r.1[best]).collect();
    Ok(NPlayerResult {
        n,
        v_equilibrium: eq.mean,
        v_best_deviation: deviation_values[best],
        best_deviation: deviation_grid[best],
        epsilon_hat: (eq.mean - deviation_values[best]).max(0.0),
        std_error: eq.std_error,
        epsilon_std_error: Estimate::from_samples(&paired).std_error,
        deviation_grid: deviation_grid.to_vec(),
        deviation_values,
        replications: reps.len(),
        seed: config.seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub pass: bool,
    /// Largest `|c(x, y1) - c(x, y2)| - F(|x|) |g(y1) - g(y2)|` seen; negative when all bounds hold with room.
    pub worst_excess: f64,
    /// `(x, y1, y2)` attaining the worst excess.
    pub witness: (f64, f64, f64),
    pub samples: usize,
}

/// Samples the Lipschitz envelope of the cost on `window^3`.
pub fn check_envelope(cost: &CostModel, window: &Window) -> Result<EnvelopeReport> {
    let env = cost
        .envelope
        .as_ref()
        .ok_or_else(|| Error::invalid("cost.envelope", "no envelope declared"))?;
    window.validate()?;
    let nodes: Vec<f64> = window.nodes().collect();
    let rows: Vec<(f64, (f64, f64, f64), bool)> = nodes
        .par_iter()
        .map(|&x| {
            let scale = env.outer.eval(x.abs());
            let mut worst = (f64::NEG_INFINITY, (x, x, x), true);
            for (i, &y1) in nodes.iter().enumerate() {
                for &y2 in &nodes[i + 1..] {
                    let lhs = (cost.eval(x, y1) - cost.eval(x, y2)).abs();
                    let rhs = scale * (env.inner.eval(y1) - env.inner.eval(y2)).abs();
                    let excess = lhs - rhs;
                    if excess > 1e-12 * (1.0 + lhs) {
                        worst.2 = false;
                    }
                    if excess > worst.0 {
                        worst.0 = excess;
                        worst.1 = (x, y1, y2);
                    }
                }
            }
            worst
        })
        .collect();
    let pass = rows.iter().all(|r| r.2);
    let (worst_excess, witness) = rows
        .iter()
        .fold((f64::NEG_INFINITY, (0.0, 0.0, 0.0)), |acc, r| if r.0 > acc.0 { (r.0, r.1) } else { acc });
    Ok(EnvelopeReport {
        pass,
        worst_excess,
        witness,
        samples: nodes.len() * nodes.len() * (nodes.len() - 1) / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{CostModel, DiffusionModel};

    fn short(paths: usize, seed: u64) -> SimConfig {
        SimConfig {
            dt: 1e-3,
            t_max: 20.0,
            burn_in: 2.0,
            paths,
            seed,
            x0: None,
            market_paths: Some(32),
        }
    }

    #[test]
    fn still_path_is_constant() {
        let m = DiffusionModel::custom_poly(vec![0.0], vec![0.0]);
        let run = simulate_reflected(&m, ThresholdPair::new(-1.0, 1.0).unwrap(), 0.3, &short(3, 1), true).unwrap();
        for p in &run.paths {
            assert_eq!(p.u_total, 0.0);
            assert_eq!(p.d_total, 0.0);
            assert!(p.path.as_ref().unwrap().iter().all(|&x| x == 0.3));
        }
    }

    #[test]
    fn states_stay_inside_and_pushes_grow() {
        let m = DiffusionModel::bm_drift(-1.0, 1.0);
        let k = ThresholdPair::new(0.0, 1.0).unwrap();
        let run = simulate_reflected(&m, k, 0.5, &short(4, 9), true).unwrap();
        for p in &run.paths {
            let path = p.path.as_ref().unwrap();
            assert!(path.iter().all(|&x| k.contains(x)));
            assert!(p.u_total >= p.u_window && p.u_window >= 0.0);
        }
    }

    #[test]
    fn start_outside_pays_the_jump() {
        let m = DiffusionModel::custom_poly(vec![0.0], vec![0.0]);
        let k = ThresholdPair::new(-1.0, 1.0).unwrap();
        let run = simulate_reflected(&m, k, 3.0, &short(2, 0), true).unwrap();
        assert_eq!(run.paths[0].d_total, 2.0);
        assert_eq!(run.paths[0].path.as_ref().unwrap()[0], 1.0);
        let run = simulate_reflected(&m, k, -1.5, &short(2, 0), false).unwrap();
        assert_eq!(run.paths[0].u_total, 0.5);
    }

    #[test]
    fn same_seed_same_result() {
        let p = Problem::new(DiffusionModel::ou(0.4, 2.0), CostModel::mult_maxlin(1.0, 1.0, 0.1, 0.1));
        let k = ThresholdPair::new(-0.65, 0.65).unwrap();
        let r1 = estimate_ergodic_cost(&p, k, k, &short(4, 42)).unwrap();
        let r2 = estimate_ergodic_cost(&p, k, k, &short(4, 42)).unwrap();
        assert_eq!(r1, r2);
        let r3 = estimate_ergodic_cost(&p, k, k, &short(4, 43)).unwrap();
        assert_ne!(r1.estimate, r3.estimate);
    }

    #[test]
    fn single_point_grid_has_zero_epsilon() {
        let p = Problem::new(DiffusionModel::ou(0.4, 2.0), CostModel::mult_maxlin(1.0, 1.0, 0.1, 0.1));
        let k = ThresholdPair::new(-0.65, 0.65).unwrap();
        let cfg = SimConfig {
            t_max: 5.0,
            burn_in: 1.0,
            ..short(3, 5)
        };
        let res = nplayer_experiment(&p, k, 3, &[k], &cfg).unwrap();
        assert_eq!(res.epsilon_hat, 0.0);
        assert_eq!(res.v_best_deviation, res.v_equilibrium);
    }

    #[test]
    fn grid_without_equilibrium_is_rejected() {
        let p = Problem::new(DiffusionModel::ou(0.4, 2.0), CostModel::abs_diff(0.1, 0.1));
        let k = ThresholdPair::new(-0.65, 0.65).unwrap();
        let other = ThresholdPair::new(-0.5, 0.65).unwrap();
        assert!(nplayer_experiment(&p, k, 4, &[other], &short(2, 0)).is_err());
        assert!(nplayer_experiment(&p, k, 1, &[k], &short(2, 0)).is_err());
    }

    #[test]
    fn perturbation_grid_contains_centre() {
        let k = ThresholdPair::new(-0.65, 0.65).unwrap();
        let g = perturbation_grid(k, 0.3);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], k);
    }

    #[test]
    fn envelopes() {
        let w = Window::new(-3.0, 3.0, 31).unwrap();
        let abs = CostModel::abs_diff(0.1, 0.1).with_envelope(ScalarFn::constant(1.0), ScalarFn::Identity);
        assert!(check_envelope(&abs, &w).unwrap().pass);
        let mult = CostModel::mult_maxlin(2.0, 1.5, 0.1, 0.1).with_envelope(
            ScalarFn::AbsPow {
                scale: 2.0,
                beta: 1.0,
                offset: 0.0,
            },
            ScalarFn::AbsPow {
                scale: 1.0,
                beta: 1.5,
                offset: 1.0,
            },
        );
        assert!(check_envelope(&mult, &w).unwrap().pass);
        let wrong = CostModel::abs_diff(0.1, 0.1).with_envelope(ScalarFn::constant(0.0), ScalarFn::Identity);
        let rep = check_envelope(&wrong, &w).unwrap();
        assert!(!rep.pass);
        let (_, y1, y2) = rep.witness;
        assert_ne!(y1, y2);
        assert!(check_envelope(&CostModel::abs_diff(0.1, 0.1), &w).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig { burn_in: 200.0, ..SimConfig::default() }.validate().is_err());
        assert!(SimConfig { dt: 0.0, ..SimConfig::default() }.validate().is_err());
        assert!(SimConfig { paths: 0, ..SimConfig::default() }.validate().is_err());
        assert!(SimConfig::default().validate().is_ok());
    }
}
