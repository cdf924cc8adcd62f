//! Resolution and tolerance settings shared by every definitional evaluator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ScalarField;

/// Lower end of the log-spaced parameter grid.
pub const THETA_MIN: f64 = 1e-6;
/// Upper end of the log-spaced parameter grid.
pub const THETA_MAX: f64 = 1e6;

/// Grid resolution and tolerances for the definitional (optimization) paths.
///
/// The `lambda_points` setting only applies to complex-field inputs; over the
/// reals the unit sphere is `{+1, -1}` and both points are always used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub theta_points: usize,
    pub lambda_points: usize,
    pub refine_iters: usize,
    pub abs_tol: f64,
    pub grid_tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            theta_points: 4096,
            lambda_points: 1024,
            refine_iters: 60,
            abs_tol: 1e-9,
            grid_tol: 1e-4,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.theta_points < 2 {
            return Err(Error::InvalidGrid("theta_points must be at least 2".into()));
        }
        if self.lambda_points < 2 {
            return Err(Error::InvalidGrid("lambda_points must be at least 2".into()));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol >= 0.0) {
            return Err(Error::InvalidGrid("abs_tol must be finite and nonnegative".into()));
        }
        if !(self.grid_tol.is_finite() && self.grid_tol >= 0.0) {
            return Err(Error::InvalidGrid("grid_tol must be finite and nonnegative".into()));
        }
        Ok(())
    }

    /// Same settings with `theta_points` doubled.
    pub fn doubled(&self) -> Self {
        Self {
            theta_points: self.theta_points * 2,
            ..*self
        }
    }

    /// `abs_tol` scaled by `1 + magnitude`, the tolerance for float identities.
    pub fn scaled_tol(&self, magnitude: f64) -> f64 {
        self.abs_tol * (1.0 + magnitude.abs())
    }

    /// Log-spaced points on `[THETA_MIN, THETA_MAX]`, endpoints exact.
    pub fn theta_grid(&self) -> Vec<f64> {
        let n = self.theta_points.max(2);
        let lo = THETA_MIN.ln();
        let step = (THETA_MAX.ln() - lo) / (n - 1) as f64;
        let mut grid: Vec<f64> = (0..n).map(|i| (lo + step * i as f64).exp()).collect();
        grid[0] = THETA_MIN;
        grid[n - 1] = THETA_MAX;
        grid
    }

    /// `theta_points` uniformly spaced angles on `[0, 2π)`.
    pub fn angle_grid(&self) -> Vec<f64> {
        let n = self.theta_points.max(2);
        (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
    }

    /// Sample of the unit sphere `{λ ∈ K : |λ| = 1}` for the given field.
    pub fn unit_sphere(&self, field: ScalarField) -> Vec<Complex64> {
        match field {
            ScalarField::Real => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            ScalarField::Complex => {
                let n = self.lambda_points.max(2);
                let mut pts: Vec<Complex64> = (0..n)
                    .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
                    .collect();
                pts[0] = Complex64::new(1.0, 0.0);
                pts
            }
        }
    }
}
