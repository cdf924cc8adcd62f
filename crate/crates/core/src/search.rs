//! One-dimensional grid scans with ternary-search polishing.
//!
//! Every definitional infimum in this crate is a per-coordinate minimization
//! of a function that is convex in `ln θ` (or concave in an angle near its
//! maximum). The scan locates the best grid cell; ternary search then shrinks
//! the bracket formed by the two neighbouring grid points. Every value
//! returned was actually evaluated at a feasible parameter, so a minimum is
//! always an upper bound of the true infimum (and a maximum a lower bound of
//! the true supremum).

/// Ternary search on `[lo, hi]` for a function convex on that interval.
///
/// Returns the smallest value evaluated and the point where it was seen.
pub fn ternary_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut best_x = lo;
    let mut best = f(lo);
    let fh = f(hi);
    if fh < best {
        best = fh;
        best_x = hi;
    }
    for _ in 0..iters {
        let third = (hi - lo) / 3.0;
        let m1 = lo + third;
        let m2 = hi - third;
        let f1 = f(m1);
        let f2 = f(m2);
        if f1 < best {
            best = f1;
            best_x = m1;
        }
        if f2 < best {
            best = f2;
            best_x = m2;
        }
        if f1 <= f2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    if fm < best {
        best = fm;
        best_x = mid;
    }
    (best_x, best)
}

/// Minimum of `f(θ)` over the sorted positive grid `thetas`, polished by
/// ternary search in `ln θ` between the neighbours of the best grid point.
pub fn scan_refine_log_min<F: Fn(f64) -> f64>(f: F, thetas: &[f64], iters: usize) -> f64 {
    scan_refine_log_argmin(f, thetas, iters).1
}

/// Like [`scan_refine_log_min`] but also returns the minimizing `θ`.
pub fn scan_refine_log_argmin<F: Fn(f64) -> f64>(f: F, thetas: &[f64], iters: usize) -> (f64, f64) {
    assert!(!thetas.is_empty(), "empty parameter grid");
    let (idx, best) = scan(&f, thetas);
    let lo = thetas[idx.saturating_sub(1)];
    let hi = thetas[(idx + 1).min(thetas.len() - 1)];
    if iters == 0 || lo == hi {
        return (thetas[idx], best);
    }
    let (s, refined) = ternary_min(|s| f(s.exp()), lo.ln(), hi.ln(), iters);
    if refined < best {
        (s.exp(), refined)
    } else {
        (thetas[idx], best)
    }
}

/// Maximum of a `2π`-periodic `f` over `angles` (uniform on `[0, 2π)`),
/// polished by ternary search on the two neighbouring cells.
pub fn scan_refine_angle_max<F: Fn(f64) -> f64>(f: F, angles: &[f64], iters: usize) -> f64 {
    assert!(!angles.is_empty(), "empty angle grid");
    let neg = |x: f64| -f(x);
    let (idx, best) = scan(&neg, angles);
    if iters == 0 || angles.len() < 2 {
        return -best;
    }
    let h = angles[1] - angles[0];
    let centre = angles[idx];
    let (_, refined) = ternary_min(neg, centre - h, centre + h, iters);
    -refined.min(best)
}

fn scan<F: Fn(f64) -> f64>(f: &F, pts: &[f64]) -> (usize, f64) {
    let mut idx = 0;
    let mut best = f64::INFINITY;
    for (i, &x) in pts.iter().enumerate() {
        let v = f(x);
        if v < best {
            best = v;
            idx = i;
        }
    }
    (idx, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GridConfig;

    #[test]
    fn ternary_finds_parabola_vertex() {
        let (x, v) = ternary_min(|x| (x - 1.3) * (x - 1.3) + 2.0, -10.0, 10.0, 80);
        assert!((x - 1.3).abs() < 1e-8);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ternary_handles_boundary_minimum() {
        let (x, v) = ternary_min(|x| x, 0.0, 1.0, 40);
        assert_eq!(x, 0.0);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn log_scan_reaches_am_gm_bound() {
        let grid = GridConfig::default().theta_grid();
        // inf over θ of θ·4 + 9/θ is 2·sqrt(36) = 12 at θ = 1.5
        let (theta, v) = scan_refine_log_argmin(|t| 4.0 * t + 9.0 / t, &grid, 60);
        assert!((v - 12.0).abs() < 1e-12);
        assert!((theta - 1.5).abs() < 1e-5);
    }

    #[test]
    fn log_scan_without_refinement_is_grid_minimum() {
        let grid = [0.5, 1.0, 2.0];
        assert_eq!(scan_refine_log_min(|t| (t - 1.1).abs(), &grid, 0), 0.10000000000000009);
    }

    #[test]
    fn angle_scan_finds_phase() {
        let cfg = GridConfig {
            theta_points: 16,
            ..Default::default()
        };
        let v = scan_refine_angle_max(|t| 3.0 * t.cos() + 4.0 * t.sin(), &cfg.angle_grid(), 60);
        assert!((v - 5.0).abs() < 1e-12);
    }
}
