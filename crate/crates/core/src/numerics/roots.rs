use serde::{Deserialize, Serialize};

use super::{Tolerance, Window};

/// Roots found by scanning a grid for sign changes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    /// Strictly increasing.
    pub roots: Vec<f64>,
    /// Grid cell in which each root was refined.
    pub brackets: Vec<(f64, f64)>,
    /// `fn(root)` at each returned root.
    pub residuals: Vec<f64>,
}

impl RootSet {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    fn push(&mut self, root: f64, bracket: (f64, f64), residual: f64) {
        if let Some(&last) = self.roots.last() {
            if root <= last {
                return;
            }
        }
        self.roots.push(root);
        self.brackets.push(bracket);
        self.residuals.push(residual);
    }
}

/// Brent's method (inverse quadratic interpolation safeguarded by bisection)
/// on a bracket with `f(lo) * f(hi) <= 0`. Returns `None` when the bracket is
/// invalid or the function produces a non-finite value.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, f_lo: f64, f_hi: f64, xtol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    const MAX_ITER: usize = 200;
    let rtol = 4.0 * f64::EPSILON;
    if !(f_lo.is_finite() && f_hi.is_finite()) {
        return None;
    }
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }

    let (mut xpre, mut xcur, mut fpre, mut fcur) = (lo, hi, f_lo, f_hi);
    let (mut xblk, mut fblk) = (0.0, 0.0);
    let (mut spre, mut scur) = (0.0, 0.0);

    for _ in 0..MAX_ITER {
        if fpre * fcur < 0.0 {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }

        let delta = 0.5 * (xtol + rtol * xcur.abs());
        let sbis = 0.5 * (xblk - xcur);
        if fcur == 0.0 || sbis.abs() < delta {
            return Some(xcur);
        }

        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }

        xpre = xcur;
        fpre = fcur;
        if scur.abs() > delta {
            xcur += scur;
        } else {
            xcur += if sbis > 0.0 { delta } else { -delta };
        }
        fcur = f(xcur);
        if !fcur.is_finite() {
            return None;
        }
    }
    Some(xcur)
}

/// Scans `window` for sign changes of `f` and refines each with Brent's method.
///
/// A zero exactly on a grid node is reported once, attached to the cell on its
/// left. Cells touching a non-finite sample are skipped, and sign changes whose
/// refined residual stays large relative to the bracket values (jumps, poles)
/// are discarded. Tangential roots without a sign change are not detected.
pub fn find_roots<F>(mut f: F, window: &Window, tol: &Tolerance) -> RootSet
where
    F: FnMut(f64) -> f64,
{
    let mut out = RootSet::default();
    if window.grid_n < 2 || !(window.hi > window.lo) {
        return out;
    }
    let xs: Vec<f64> = window.nodes().collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    if fs[0] == 0.0 {
        out.push(xs[0], (xs[0], xs[1]), 0.0);
    }
    for i in 0..xs.len() - 1 {
        let (x0, x1, f0, f1) = (xs[i], xs[i + 1], fs[i], fs[i + 1]);
        if !(f0.is_finite() && f1.is_finite()) {
            continue;
        }
        if f1 == 0.0 {
            out.push(x1, (x0, x1), 0.0);
            continue;
        }
        if f0 == 0.0 || f0.signum() == f1.signum() {
            continue;
        }
        let xtol = 1e-15_f64.max(1e-3 * tol.abs_tol);
        if let Some(r) = brent(&mut f, x0, x1, f0, f1, xtol) {
            let fr = f(r);
            let accept = tol.abs_tol.max(1e-6 * f0.abs().max(f1.abs()));
            if fr.is_finite() && fr.abs() <= accept {
                out.push(r, (x0, x1), fr);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn quadratic_has_two_roots() {
        let w = Window::new(-3.0, 3.0, 64).unwrap();
        let rs = find_roots(|x| x * x - 1.0, &w, &tol());
        assert_eq!(rs.len(), 2);
        assert!((rs.roots[0] + 1.0).abs() < 1e-12);
        assert!((rs.roots[1] - 1.0).abs() < 1e-12);
        for (r, (lo, hi)) in rs.roots.iter().zip(&rs.brackets) {
            assert!(lo <= r && r <= hi);
        }
    }

    #[test]
    fn no_real_roots() {
        let w = Window::new(-3.0, 3.0, 64).unwrap();
        assert!(find_roots(|x| x * x + 1.0, &w, &tol()).is_empty());
    }

    #[test]
    fn root_on_node_is_reported_once_in_left_cell() {
        let w = Window::new(-1.0, 1.0, 5).unwrap();
        let rs = find_roots(|x| x, &w, &tol());
        assert_eq!(rs.roots, vec![0.0]);
        assert_eq!(rs.brackets, vec![(-0.5, 0.0)]);
    }

    #[test]
    fn jump_is_not_a_root() {
        let w = Window::new(-1.0, 1.0, 10).unwrap();
        let rs = find_roots(|x| if x < 0.05 { -1.0 } else { 1.0 }, &w, &tol());
        assert!(rs.is_empty());
    }

    #[test]
    fn nan_cells_are_skipped() {
        let w = Window::new(-2.0, 2.0, 41).unwrap();
        let rs = find_roots(|x| if x < 0.0 { f64::NAN } else { x - 1.0 }, &w, &tol());
        assert_eq!(rs.len(), 1);
        assert!((rs.roots[0] - 1.0).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn roots_sorted_with_small_residuals(c in -2.5f64..2.5, k in 1.0f64..6.0) {
            let w = Window::new(-3.0, 3.0, 97).unwrap();
            let f = |x: f64| (k * (x - c)).sin();
            let rs = find_roots(f, &w, &tol());
            prop_assert!(rs.roots.windows(2).all(|p| p[0] < p[1]));
            for &r in &rs.roots {
                prop_assert!(f(r).abs() < tol().abs_tol);
            }
            prop_assert!(!rs.is_empty());
        }
    }
}
