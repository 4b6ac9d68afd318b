use rayon::prelude::*;

use super::{brent, find_roots, Tolerance, Window};

/// Samples the zero set of `f(a, b)`: for every grid column `a` of `window_a`,
/// all roots in `b` over `window_b`. Output is ordered by `a`, then `b`.
pub fn trace_implicit<F>(f: F, window_a: &Window, window_b: &Window, tol: &Tolerance) -> Vec<(f64, f64)>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let columns: Vec<Vec<(f64, f64)>> = (0..window_a.grid_n)
        .into_par_iter()
        .map(|i| {
            let a = window_a.node(i);
            find_roots(|b| f(a, b), window_b, tol)
                .roots
                .into_iter()
                .map(|b| (a, b))
                .collect()
        })
        .collect();
    columns.into_iter().flatten().collect()
}

/// Grid of `b` values above the diagonal for column `a`: the point `a + gap`
/// followed by every window node beyond it.
pub(crate) fn upper_column(a: f64, window: &Window, gap: f64) -> Option<Window> {
    let start = a + gap;
    if start >= window.hi {
        return None;
    }
    let n = ((window.hi - start) / window.spacing()).ceil() as usize + 1;
    Some(Window {
        lo: start,
        hi: window.hi,
        grid_n: n.max(2),
    })
}

/// Locates points where `secondary` vanishes along the zero set of `primary`
/// inside the region `b > a + gap` of `window x window`.
///
/// The zero set of `primary` is sampled column by column, neighbouring
/// columns are linked into curve segments, and each segment across which
/// `secondary` changes sign is refined by Brent's method in `a`, re-solving
/// `primary(a, .) = 0` near the segment at every step. Returned points are
/// candidates; callers verify residuals.
pub fn intersect_on_curve<P, S>(primary: P, secondary: S, window: &Window, gap: f64, tol: &Tolerance) -> Vec<(f64, f64)>
where
    P: Fn(f64, f64) -> f64 + Sync,
    S: Fn(f64, f64) -> f64 + Sync,
{
    let db = window.spacing();
    let columns: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..window.grid_n)
        .into_par_iter()
        .map(|i| {
            let a = window.node(i);
            let roots = match upper_column(a, window, gap) {
                Some(col) => find_roots(|b| primary(a, b), &col, tol).roots,
                None => Vec::new(),
            };
            let sec = roots.iter().map(|&b| secondary(a, b)).collect();
            (a, roots, sec)
        })
        .collect();

    let mut links = Vec::new();
    for pair in columns.windows(2) {
        let (a0, b0s, s0s) = &pair[0];
        let (a1, b1s, s1s) = &pair[1];
        for (j0, j1) in link_columns(b0s, b1s) {
            links.push((*a0, b0s[j0], s0s[j0], *a1, b1s[j1], s1s[j1]));
        }
    }

    let refined: Vec<Option<(f64, f64)>> = links
        .par_iter()
        .map(|&(a0, b0, s0, a1, b1, s1)| {
            if !(s0.is_finite() && s1.is_finite()) {
                return None;
            }
            if s0 == 0.0 {
                return Some((a0, b0));
            }
            if s0.signum() == s1.signum() {
                return None;
            }
            let follow = |a: f64| -> Option<f64> {
                let t = (a - a0) / (a1 - a0);
                let guess = b0 + t * (b1 - b0);
                let span = (b1 - b0).abs() + 2.0 * db;
                let lo = (guess - span).max(a + gap);
                let hi = (guess + span).min(window.hi);
                if hi <= lo {
                    return None;
                }
                let local = Window { lo, hi, grid_n: 17 };
                find_roots(|b| primary(a, b), &local, tol)
                    .roots
                    .into_iter()
                    .min_by(|x, y| (x - guess).abs().total_cmp(&(y - guess).abs()))
            };
            let phi = |a: f64| follow(a).map_or(f64::NAN, |b| secondary(a, b));
            let a_star = brent(phi, a0, a1, s0, s1, 1e-13)?;
            follow(a_star).map(|b| (a_star, b))
        })
        .collect();

    refined.into_iter().flatten().collect()
}

/// Pairs roots of neighbouring columns: by index when the counts agree,
/// otherwise by mutual nearest neighbour.
fn link_columns(left: &[f64], right: &[f64]) -> Vec<(usize, usize)> {
    if left.is_empty() || right.is_empty() {
        return Vec::new();
    }
    if left.len() == right.len() {
        return (0..left.len()).map(|j| (j, j)).collect();
    }
    let nearest = |x: f64, ys: &[f64]| -> usize {
        ys.iter()
            .enumerate()
            .min_by(|p, q| (p.1 - x).abs().total_cmp(&(q.1 - x).abs()))
            .map(|(k, _)| k)
            .unwrap_or(0)
    };
    left.iter()
        .enumerate()
        .filter_map(|(i, &x)| {
            let j = nearest(x, right);
            (nearest(right[j], left) == i).then_some((i, j))
        })
        .collect()
}
