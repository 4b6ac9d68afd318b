//! Monte Carlo checks against exact stationary facts.

use ergomfg::sim::*;
use ergomfg::*;

fn config(paths: usize, seed: u64) -> SimConfig {
    SimConfig {
        dt: 1e-3,
        t_max: 100.0,
        burn_in: 5.0,
        paths,
        seed,
        x0: None,
        market_paths: None,
    }
}

#[test]
fn driftless_motion_averages_to_the_centre() {
    let m = DiffusionModel::bm_drift(0.0, 1.0);
    let run = simulate_reflected(&m, ThresholdPair::new(-1.0, 1.0).unwrap(), 0.0, &config(32, 11), false).unwrap();
    let est = run.time_average;
    assert!(est.mean.abs() < 3.0 * est.std_error, "{est:?}");
}

#[test]
fn net_push_cancels_the_drift() {
    // Stationarity: E(U_T - D_T) / T = -mu.
    let m = DiffusionModel::bm_drift(-1.0, 1.0);
    let run = simulate_reflected(&m, ThresholdPair::new(0.0, 1.0).unwrap(), 0.5, &config(32, 12), false).unwrap();
    let est = run.net_rate;
    assert!((est.mean - 1.0).abs() < 3.0 * est.std_error, "{est:?}");
}

#[test]
fn paths_are_contained_and_pushes_monotone() {
    let m = DiffusionModel::ou(3.0, 2.0);
    let k = ThresholdPair::new(-0.5, 0.7).unwrap();
    let cfg = SimConfig { t_max: 5.0, burn_in: 0.0, ..config(4, 3) };
    let run = simulate_reflected(&m, k, 2.0, &cfg, true).unwrap();
    for p in &run.paths {
        assert!(p.path.as_ref().unwrap().iter().all(|&x| k.contains(x)));
        assert!(p.d_total >= 1.3);
        assert!(p.u_total >= 0.0);
    }
}

#[test]
fn driftless_abs_cost_matches_quadrature() {
    let p = Problem::new(DiffusionModel::bm_drift(0.0, 1.0), CostModel::abs_diff(0.1, 0.1));
    let k = ThresholdPair::new(-1.0, 1.0).unwrap();
    let exact = ergodic_cost(&p, k, 0.0).unwrap();
    // The clipped scheme carries an O(sqrt(dt)) boundary bias; at this step it is below the noise.
    let est = estimate_ergodic_cost(&p, k, k, &SimConfig { dt: 2.5e-4, ..config(32, 5) }).unwrap();
    assert!((est.estimate - exact).abs() < 3.0 * est.std_error, "{} vs {exact} ({})", est.estimate, est.std_error);
    assert_eq!(est.paths_used, 32);
}

#[test]
fn results_are_reproducible() {
    let p = Problem::new(DiffusionModel::ou(0.4, 2.0), CostModel::mult_maxlin(1.0, 1.0, 0.1, 0.1));
    let k = ThresholdPair::new(-0.65, 0.65).unwrap();
    let cfg = SimConfig { t_max: 10.0, burn_in: 1.0, ..config(4, 99) };
    let a = estimate_ergodic_cost(&p, k, k, &cfg).unwrap();
    let b = estimate_ergodic_cost(&p, k, k, &cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let grid = perturbation_grid(k, 0.3);
    let n1 = nplayer_experiment(&p, k, 3, &grid, &cfg).unwrap();
    let n2 = nplayer_experiment(&p, k, 3, &grid, &cfg).unwrap();
    assert_eq!(n1, n2);
    assert!(n1.epsilon_hat >= 0.0);
}

#[test]
fn halving_the_step_is_within_noise() {
    let p = Problem::new(DiffusionModel::ou(3.0, 2.0), CostModel::abs_diff(0.1, 0.1));
    let k = ThresholdPair::new(-0.78, 0.78).unwrap();
    let coarse = estimate_ergodic_cost(&p, k, k, &SimConfig { dt: 2e-3, ..config(32, 21) }).unwrap();
    let fine = estimate_ergodic_cost(&p, k, k, &SimConfig { dt: 1e-3, ..config(32, 22) }).unwrap();
    let se = coarse.std_error.hypot(fine.std_error);
    assert!((coarse.estimate - fine.estimate).abs() < 2.0 * se, "{} vs {} ({se})", coarse.estimate, fine.estimate);
}
