//! Coordinatewise Archimedean vector lattices `Rⁿ` and `Cⁿ = Rⁿ + iRⁿ`.
//!
//! Order, infima and suprema are coordinatewise: the infimum of a set in the
//! product order is the element whose coordinates are the coordinate infima.
//! Every parameter-family infimum (square mean, geometric mean, modulus) is
//! therefore evaluated one coordinate at a time, both as a grid optimization
//! over the defining family and by its closed form.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::GridConfig;
use crate::error::{Error, Result};
use crate::search::{scan_refine_angle_max, scan_refine_log_min};

/// The scalar field `K`, either `R` or `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Real => f.write_str("real"),
            ScalarField::Complex => f.write_str("complex"),
        }
    }
}

/// An element of `Kⁿ` with the coordinatewise order on its real part.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeElement {
    field: ScalarField,
    coords: Vec<Complex64>,
}

impl LatticeElement {
    pub fn new(field: ScalarField, coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyElement);
        }
        for (i, z) in coords.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(i));
            }
            if field == ScalarField::Real && z.im != 0.0 {
                return Err(Error::ImaginaryInRealField(i));
            }
        }
        Ok(Self { field, coords })
    }

    pub fn real(values: &[f64]) -> Result<Self> {
        Self::new(
            ScalarField::Real,
            values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn complex(values: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            ScalarField::Complex,
            values.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
        )
    }

    /// Real coordinates placed in the given field.
    pub fn from_reals(field: ScalarField, values: &[f64]) -> Result<Self> {
        Self::new(field, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(field: ScalarField, dim: usize) -> Result<Self> {
        Self::new(field, vec![Complex64::new(0.0, 0.0); dim])
    }

    /// The unit `e` of the coordinatewise Φ-algebra.
    pub fn unit(field: ScalarField, dim: usize) -> Result<Self> {
        Self::new(field, vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// Real parts of the coordinates.
    pub fn re(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.re).collect()
    }

    /// `|f| = f` holds exactly: every coordinate real and nonnegative.
    pub fn is_positive(&self) -> bool {
        self.coords.iter().all(|z| z.im == 0.0 && z.re >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Largest coordinate modulus.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Fails unless the element lies in the positive cone.
    pub fn require_positive(&self) -> Result<()> {
        match self.coords.iter().position(|z| !(z.im == 0.0 && z.re >= 0.0)) {
            Some(i) => Err(Error::NotPositive(i)),
            None => Ok(()),
        }
    }

    pub(crate) fn require_compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Builds a same-field element coordinate by coordinate.
    pub(crate) fn map_coords(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(self.field, self.coords.iter().map(|&z| f(z)).collect())
    }

    pub(crate) fn zip_coords(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.require_compatible(other)?;
        Self::new(
            self.field,
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub(crate) fn from_reals_unchecked(field: ScalarField, values: Vec<f64>) -> Self {
        Self {
            field,
            coords: values.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip_coords(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip_coords(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        Self {
            field: self.field,
            coords: self.coords.iter().map(|z| -z).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        self.map_coords(|z| z * s)
    }

    pub fn conj(&self) -> Self {
        Self {
            field: self.field,
            coords: self.coords.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `f + i g` in the complexification, for real-field `f`, `g`.
    pub fn complexify(re: &Self, im: &Self) -> Result<Self> {
        if re.field != ScalarField::Real || im.field != ScalarField::Real {
            return Err(Error::FieldMismatch);
        }
        re.require_compatible(im)?;
        Self::new(
            ScalarField::Complex,
            re.coords
                .iter()
                .zip(&im.coords)
                .map(|(a, b)| Complex64::new(a.re, b.re))
                .collect(),
        )
    }

    /// `f ≤ g` in the order of the real part; requires both imaginary parts equal.
    pub fn le(&self, other: &Self) -> Result<bool> {
        self.require_compatible(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .all(|(a, b)| a.im == b.im && a.re <= b.re))
    }

    /// Largest coordinatewise distance `max_j |f_j − g_j|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.require_compatible(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest amount by which a coordinate of `self` exceeds `other` (≥ 0).
    pub fn max_excess_over(&self, other: &Self) -> Result<f64> {
        self.require_compatible(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a.re - b.re).max(0.0))
            .fold(0.0, f64::max))
    }

    /// Coordinates as `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.coords.iter().map(|z| [z.re, z.im]).collect()
    }
}

impl fmt::Display for LatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, z) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match self.field {
                ScalarField::Real => write!(f, "{}", z.re)?,
                ScalarField::Complex => write!(f, "{}{:+}i", z.re, z.im)?,
            }
        }
        f.write_str(")")
    }
}

/// A lattice quantity computed twice: by optimizing over its defining
/// parameter family on a finite grid, and by its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub definitional: LatticeElement,
    pub closed: LatticeElement,
}

impl Evaluation {
    /// `max_j |definitional_j − closed_j|`.
    pub fn discrepancy(&self) -> f64 {
        self.definitional
            .max_abs_diff(&self.closed)
            .expect("both routes share field and dimension")
    }
}

fn require_real_pair(f: &LatticeElement, g: &LatticeElement) -> Result<()> {
    f.require_compatible(g)?;
    if f.field != ScalarField::Real {
        return Err(Error::ComplexOrder);
    }
    Ok(())
}

/// Coordinatewise maximum `f ∨ g` of two real-field elements.
pub fn join(f: &LatticeElement, g: &LatticeElement) -> Result<LatticeElement> {
    require_real_pair(f, g)?;
    f.zip_coords(g, |a, b| Complex64::new(a.re.max(b.re), 0.0))
}

/// Coordinatewise minimum `f ∧ g` of two real-field elements.
pub fn meet(f: &LatticeElement, g: &LatticeElement) -> Result<LatticeElement> {
    require_real_pair(f, g)?;
    f.zip_coords(g, |a, b| Complex64::new(a.re.min(b.re), 0.0))
}

/// The coordinatewise Euclidean length `sqrt(x² + y²)`; also the closed form of `⊞`.
pub(crate) fn planar_length(x: f64, y: f64) -> f64 {
    (x * x + y * y).sqrt()
}

/// Closed-form modulus only.
pub fn modulus_closed(f: &LatticeElement) -> LatticeElement {
    LatticeElement::from_reals_unchecked(
        f.field,
        f.coords.iter().map(|z| planar_length(z.re, z.im)).collect(),
    )
}

/// `|f| = sup{Re(λf) : |λ| = 1}`.
///
/// The definitional route maximizes `Re(λ f_j)` over the sampled unit sphere
/// (refined between neighbouring angles for complex inputs).
pub fn modulus(f: &LatticeElement, cfg: &GridConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let closed = modulus_closed(f);
    let definitional = match f.field {
        ScalarField::Real => {
            let sphere = cfg.unit_sphere(ScalarField::Real);
            f.coords
                .iter()
                .map(|&z| sphere.iter().map(|l| (l * z).re).fold(f64::NEG_INFINITY, f64::max))
                .collect()
        }
        ScalarField::Complex => {
            let angles: Vec<f64> = (0..cfg.lambda_points)
                .map(|k| 2.0 * std::f64::consts::PI * k as f64 / cfg.lambda_points as f64)
                .collect();
            f.coords
                .iter()
                .map(|&z| {
                    // Re(e^{iφ} z) = re·cos φ − im·sin φ
                    scan_refine_angle_max(
                        |phi| z.re * phi.cos() - z.im * phi.sin(),
                        &angles,
                        cfg.refine_iters,
                    )
                })
                .collect()
        }
    };
    Ok(Evaluation {
        definitional: LatticeElement::from_reals_unchecked(f.field, definitional),
        closed,
    })
}

/// Square mean `f ⊞ g = sup{cos θ·f + sin θ·g : θ ∈ [0, 2π]}`.
pub fn square_mean(f: &LatticeElement, g: &LatticeElement, cfg: &GridConfig) -> Result<Evaluation> {
    cfg.validate()?;
    require_real_pair(f, g)?;
    let angles = cfg.angle_grid();
    let mut definitional = Vec::with_capacity(f.dim());
    let mut closed = Vec::with_capacity(f.dim());
    for (a, b) in f.coords.iter().zip(&g.coords) {
        let (x, y) = (a.re, b.re);
        definitional.push(scan_refine_angle_max(
            |t| t.cos() * x + t.sin() * y,
            &angles,
            cfg.refine_iters,
        ));
        closed.push(planar_length(x, y));
    }
    Ok(Evaluation {
        definitional: LatticeElement::from_reals_unchecked(ScalarField::Real, definitional),
        closed: LatticeElement::from_reals_unchecked(ScalarField::Real, closed),
    })
}

/// Closed-form geometric mean `(fg)^{1/2}` of two positive elements.
pub fn geometric_mean_closed(f: &LatticeElement, g: &LatticeElement) -> Result<LatticeElement> {
    f.require_compatible(g)?;
    f.require_positive()?;
    g.require_positive()?;
    Ok(LatticeElement::from_reals_unchecked(
        f.field,
        f.coords
            .iter()
            .zip(&g.coords)
            .map(|(a, b)| (a.re * b.re).sqrt())
            .collect(),
    ))
}

/// Geometric mean `f ⊠ g = ½·inf{θf + θ⁻¹g : θ > 0}` on the positive cone.
///
/// `θ ↦ θx + y/θ` is convex on `(0, ∞)`, so the log-grid scan is polished by
/// ternary search. When a coordinate of `f` or `g` is zero the infimum is a
/// limit at the edge of the grid and the definitional value carries the
/// corresponding boundary error.
pub fn geometric_mean(f: &LatticeElement, g: &LatticeElement, cfg: &GridConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let closed = geometric_mean_closed(f, g)?;
    let thetas = cfg.theta_grid();
    let definitional = f
        .coords
        .iter()
        .zip(&g.coords)
        .map(|(a, b)| {
            let (x, y) = (a.re, b.re);
            0.5 * scan_refine_log_min(|t| t * x + y / t, &thetas, cfg.refine_iters)
        })
        .collect();
    Ok(Evaluation {
        definitional: LatticeElement::from_reals_unchecked(f.field, definitional),
        closed,
    })
}
