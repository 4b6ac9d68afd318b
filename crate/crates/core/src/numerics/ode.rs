use crate::error::{Error, Result};

fn rk4_step<const N: usize, F>(rhs: &F, x: f64, h: f64, y: &[f64; N]) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let axpy = |base: &[f64; N], k: &[f64; N], s: f64| -> [f64; N] {
        let mut out = *base;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += s * ki;
        }
        out
    };
    let k1 = rhs(x, y);
    let k2 = rhs(x + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = rhs(x + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = rhs(x + h, &axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Classical fourth-order Runge-Kutta from `x0` to `x1` in `steps` equal steps,
/// returning every grid point `(x, state)` including both ends.
pub fn shoot_ode_trajectory<const N: usize, F>(rhs: F, x0: f64, x1: f64, state0: [f64; N], steps: usize) -> Result<Vec<(f64, [f64; N])>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if steps == 0 {
        return Err(Error::invalid("steps", "must be positive"));
    }
    let h = (x1 - x0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = state0;
    out.push((x0, y));
    for i in 0..steps {
        let x = x0 + h * i as f64;
        y = rk4_step(&rhs, x, h, &y);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { x: x + h });
        }
        let xn = if i + 1 == steps { x1 } else { x0 + h * (i + 1) as f64 };
        out.push((xn, y));
    }
    Ok(out)
}

/// Like [`shoot_ode_trajectory`] but keeps only the terminal state.
pub fn shoot_ode<const N: usize, F>(rhs: F, x0: f64, x1: f64, state0: [f64; N], steps: usize) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if steps == 0 {
        return Err(Error::invalid("steps", "must be positive"));
    }
    let h = (x1 - x0) / steps as f64;
    let mut y = state0;
    for i in 0..steps {
        let x = x0 + h * i as f64;
        y = rk4_step(&rhs, x, h, &y);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { x: x + h });
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn linear_solution_is_exact() {
        let y = shoot_ode(|_, s: &[f64; 2]| [s[1], 0.0], 0.0, 2.0, [0.0, 1.0], 16).unwrap();
        assert!((y[0] - 2.0).abs() < 1e-14);
        assert!((y[1] - 1.0).abs() < 1e-14);
    }

    fn sine_error(steps: usize) -> f64 {
        let y = shoot_ode(|_, s: &[f64; 2]| [s[1], -s[0]], 0.0, FRAC_PI_2, [0.0, 1.0], steps).unwrap();
        // The position error is superconvergent at the quarter period; the
        // slope error carries the phase error.
        (y[0] - 1.0).abs().max(y[1].abs())
    }

    #[test]
    fn sine_at_quarter_period() {
        assert!(sine_error(2048) < 1e-8);
    }

    #[test]
    fn fourth_order_convergence() {
        let e1 = sine_error(16);
        let e2 = sine_error(32);
        let e3 = sine_error(64);
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
        assert!((e2 / e3).log2() >= 3.5);
    }

    #[test]
    fn blow_up_is_reported() {
        let err = shoot_ode(|_, s: &[f64; 1]| [s[0] * s[0]], 0.0, 2.0, [1.0], 64).unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { .. }));
    }

    #[test]
    fn trajectory_ends_match_shoot() {
        let traj = shoot_ode_trajectory(|x, s: &[f64; 1]| [x * s[0]], 0.0, 1.0, [1.0], 100).unwrap();
        let end = shoot_ode(|x, s: &[f64; 1]| [x * s[0]], 0.0, 1.0, [1.0], 100).unwrap();
        assert_eq!(traj.len(), 101);
        assert_eq!(traj.last().unwrap().0, 1.0);
        assert_eq!(traj.last().unwrap().1, end);
    }
}
