//! Structural properties of the deterministic solvers over random inputs.

use ergomfg::hjb::solve_fbp;
use ergomfg::mfg::{equilibrium_residuals, stationary_mean, stationary_mean_of};
use ergomfg::models::ScalarFn;
use ergomfg::*;
use proptest::prelude::*;

fn model_strategy() -> impl Strategy<Value = DiffusionModel> {
    prop_oneof![
        (-1.5f64..1.5, 0.5f64..2.5).prop_map(|(mu, s)| DiffusionModel::bm_drift(mu, s)),
        (0.2f64..3.0, 0.5f64..2.5).prop_map(|(t, s)| DiffusionModel::ou(t, s)),
    ]
}

fn pair_strategy() -> impl Strategy<Value = ThresholdPair> {
    (-2.5f64..2.0, 0.05f64..2.5).prop_map(|(a, w)| ThresholdPair::new(a, a + w).unwrap())
}

fn cost_strategy() -> impl Strategy<Value = CostModel> {
    (0.01f64..1.0, 0.01f64..1.0, any::<bool>()).prop_map(|(qu, qd, mult)| {
        if mult {
            CostModel::mult_maxlin(1.0, 1.0, qu, qd)
        } else {
            CostModel::abs_diff(qu, qd)
        }
    })
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / (1.0 + y.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reference_point_does_not_move_results(m in model_strategy(), c in cost_strategy(), k in pair_strategy(), x0 in -2.0f64..2.0, y in -1.0f64..1.0) {
        let p0 = Problem::new(m.clone(), c.clone());
        let p1 = Problem::new(m.with_reference_point(x0), c);
        prop_assert!(rel(ergodic_cost(&p0, k, y).unwrap(), ergodic_cost(&p1, k, y).unwrap()) < 1e-9);
        let r0 = equilibrium_residuals(&p0, k).unwrap();
        let r1 = equilibrium_residuals(&p1, k).unwrap();
        prop_assert!((r0.residual_i - r1.residual_i).abs() < 1e-9);
        prop_assert!((r0.residual_ii - r1.residual_ii).abs() < 1e-9);
    }

    #[test]
    fn closed_form_mean_matches_quadrature(m in model_strategy(), k in pair_strategy()) {
        let p = Problem::new(m.clone(), CostModel::abs_diff(0.1, 0.1));
        let closed = stationary_mean(&p, k).unwrap();
        let quad = stationary_mean_of(&m, &ScalarFn::Identity, k, &p.tol).unwrap();
        prop_assert!((closed - quad).abs() < 1e-8, "{closed} vs {quad}");
        prop_assert!(k.a <= closed && closed <= k.b);
    }

    #[test]
    fn shooting_value_is_the_ergodic_cost(m in model_strategy(), c in cost_strategy(), k in pair_strategy(), y in -1.0f64..1.0) {
        let p = Problem::new(m, c);
        let lambda = solve_fbp(&p, k, y, 8192).unwrap().lambda;
        let g = ergodic_cost(&p, k, y).unwrap();
        prop_assert!((lambda - g).abs() < 1e-6 * g.abs().max(1e-3), "{lambda} vs {g}");
    }

    #[test]
    fn ergodic_cost_dominates_the_cheapest_state(m in model_strategy(), c in cost_strategy(), k in pair_strategy(), y in -1.0f64..1.0) {
        let p = Problem::new(m, c.clone());
        let g = ergodic_cost(&p, k, y).unwrap();
        let floor = (0..=200).map(|i| c.eval(k.a + k.width() * i as f64 / 200.0, y)).fold(f64::INFINITY, f64::min);
        prop_assert!(g >= floor - 1e-9);
    }

    #[test]
    fn mirror_image_swaps_prices(theta in 0.2f64..3.0, s in 0.5f64..2.5, qu in 0.01f64..1.0, qd in 0.01f64..1.0, k in pair_strategy(), y in -1.0f64..1.0) {
        let p = Problem::new(DiffusionModel::ou(theta, s), CostModel::abs_diff(qu, qd));
        let q = Problem::new(DiffusionModel::ou(theta, s), CostModel::abs_diff(qd, qu));
        let mirrored = ThresholdPair::new(-k.b, -k.a).unwrap();
        prop_assert!(rel(ergodic_cost(&p, k, y).unwrap(), ergodic_cost(&q, mirrored, -y).unwrap()) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn symmetric_problems_have_symmetric_barriers(theta in 0.3f64..3.0, s in 0.5f64..2.5, q in 0.02f64..0.5, mult in any::<bool>()) {
        let cost = if mult { CostModel::mult_maxlin(1.0, 1.0, q, q) } else { CostModel::abs_diff(q, q) };
        let p = Problem::new(DiffusionModel::ou(theta, s), cost);
        let sol = solve_control(&p, 0.0, &Window::new(-4.0, 4.0, 161).unwrap()).unwrap();
        prop_assert!((sol.thresholds.a + sol.thresholds.b).abs() < 1e-6, "{:?}", sol.thresholds);
    }

    #[test]
    fn brownian_residuals_are_translation_invariant(mu in -1.5f64..-0.1, q in 0.02f64..0.5, a in -4.0f64..4.0, w in 0.1f64..1.5, shift in -3.0f64..3.0) {
        let p = Problem::new(DiffusionModel::bm_drift(mu, 1.0), CostModel::abs_diff(q, q));
        let r0 = equilibrium_residuals(&p, ThresholdPair::new(a, a + w).unwrap()).unwrap();
        let r1 = equilibrium_residuals(&p, ThresholdPair::new(a + shift, a + shift + w).unwrap()).unwrap();
        prop_assert!((r0.residual_i - r1.residual_i).abs() < 1e-9);
        prop_assert!((r0.residual_ii - r1.residual_ii).abs() < 1e-9);
    }
}
