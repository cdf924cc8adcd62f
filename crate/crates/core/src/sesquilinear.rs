//! Sesquilinear maps `T: Kᵐ × Kᵐ → Kⁿ` and the lattice-valued
//! Cauchy–Schwarz gap.
//!
//! A conjugate-symmetric sesquilinear map into the coordinatewise lattice is
//! a family of Hermitian `m × m` matrices `A_j`, one per codomain coordinate,
//! with `T(u, v)_j = Σ_{p,q} A_j[p][q] · u_p · conj(v_q)`.
//!
//! The gap `inf{|z|⁻¹ T(zu − v, zu − v) : z ≠ 0}` is computed per coordinate.
//! Writing `z = θλ` with `θ > 0`, `|λ| = 1`, sesquilinearity and conjugate
//! symmetry give
//!
//! ```text
//! |z|⁻¹ T(zu − v, zu − v) = θ·T(u,u) + θ⁻¹·T(v,v) − 2·Re(λ·T(u,v))
//! ```
//!
//! so the infimum over the `θ × λ` product grid splits into a `θ` scan and a
//! `λ` scan. The closed form is `2·(sqrt(T(u,u)·T(v,v)) − |T(u,v)|)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::GridConfig;
use crate::error::{Error, Result};
use crate::lattice::{modulus_closed, Evaluation, LatticeElement, ScalarField};
use crate::power::{multiply, nth_root};
use crate::report::{InstanceOutcome, Relation, ReportBuilder, VerificationReport};
use crate::search::scan_refine_log_min;

/// Threshold on the definitional gap below which a coordinate counts as
/// attaining equality, scaled by `1 + max(T(u,u)_j, T(v,v)_j)`. Separate from
/// `abs_tol` because the grid gap carries discretization error: when one of
/// `T(u,u)_j`, `T(v,v)_j` vanishes the infimum is a limit at an end of the
/// grid, reached only up to `THETA_MIN` times the other one.
pub const EQUALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SesquilinearForm {
    field: ScalarField,
    domain_dim: usize,
    matrices: Vec<DMatrix<Complex64>>,
}

impl SesquilinearForm {
    pub fn new(field: ScalarField, matrices: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::MalformedMatrix("form has no matrices".into()))?;
        let m = first.nrows();
        if m == 0 {
            return Err(Error::MalformedMatrix("empty matrix".into()));
        }
        for (j, a) in matrices.iter().enumerate() {
            if a.nrows() != m || a.ncols() != m {
                return Err(Error::MalformedMatrix(format!(
                    "matrix {j} is {}x{}, expected {m}x{m}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::MalformedMatrix(format!("matrix {j} has a non-finite entry")));
            }
            if field == ScalarField::Real && a.iter().any(|z| z.im != 0.0) {
                return Err(Error::MalformedMatrix(format!(
                    "matrix {j} has a complex entry in a real form"
                )));
            }
        }
        Ok(Self {
            field,
            domain_dim: m,
            matrices,
        })
    }

    /// Builds a form from row-major nested entries.
    pub fn from_rows(field: ScalarField, rows: &[Vec<Vec<Complex64>>]) -> Result<Self> {
        let mut mats = Vec::with_capacity(rows.len());
        for (j, a) in rows.iter().enumerate() {
            let m = a.len();
            if a.iter().any(|row| row.len() != m) {
                return Err(Error::MalformedMatrix(format!("matrix {j} is not square")));
            }
            mats.push(DMatrix::from_fn(m, m, |p, q| a[p][q]));
        }
        Self::new(field, mats)
    }

    /// Diagonal family `A_j = diag(diagonals[j])`.
    pub fn diagonal(field: ScalarField, diagonals: &[Vec<f64>]) -> Result<Self> {
        let mats = diagonals
            .iter()
            .map(|d| {
                DMatrix::from_fn(d.len(), d.len(), |p, q| {
                    Complex64::new(if p == q { d[p] } else { 0.0 }, 0.0)
                })
            })
            .collect();
        Self::new(field, mats)
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.matrices
    }

    /// Largest entry modulus over the family.
    pub fn max_entry(&self) -> f64 {
        self.matrices
            .iter()
            .flat_map(|a| a.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `max |A_j − A_jᴴ|` over all entries.
    pub fn hermitian_defect(&self) -> f64 {
        self.matrices
            .iter()
            .map(|a| (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Minimum eigenvalue of the Hermitian part of each matrix.
    pub fn min_eigenvalues(&self) -> Vec<f64> {
        self.matrices
            .iter()
            .map(|a| {
                let h = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
                h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Smallest value of `Re(wᴴ A_j w)` over the probe set of basis vectors
    /// and pairwise sums `e_p + e_q` (and `e_p + i·e_q` over `C`).
    pub fn min_probe_value(&self) -> f64 {
        let m = self.domain_dim;
        let one = Complex64::new(1.0, 0.0);
        let mut probes: Vec<Vec<Complex64>> = Vec::new();
        for p in 0..m {
            let mut e = vec![Complex64::new(0.0, 0.0); m];
            e[p] = one;
            probes.push(e);
            for q in p + 1..m {
                let mut w = vec![Complex64::new(0.0, 0.0); m];
                w[p] = one;
                w[q] = one;
                probes.push(w.clone());
                w[q] = -one;
                probes.push(w.clone());
                if self.field == ScalarField::Complex {
                    w[q] = Complex64::new(0.0, 1.0);
                    probes.push(w);
                }
            }
        }
        let mut min = f64::INFINITY;
        for w in &probes {
            for c in self.evaluate_unchecked(w, w) {
                min = min.min(c.re);
            }
        }
        min
    }

    /// Checks conjugate symmetry and positive semidefiniteness.
    pub fn validate(&self, cfg: &GridConfig) -> Result<()> {
        let tol = cfg.scaled_tol(self.max_entry());
        for (j, a) in self.matrices.iter().enumerate() {
            let defect = (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if defect > tol {
                return Err(Error::NotHermitian(j));
            }
        }
        for (j, ev) in self.min_eigenvalues().into_iter().enumerate() {
            if ev < -tol {
                return Err(Error::NotPositiveSemidefinite {
                    index: j,
                    min_eigenvalue: ev,
                });
            }
        }
        let probe = self.min_probe_value();
        if probe < -tol {
            return Err(Error::NotPositiveSemidefinite {
                index: 0,
                min_eigenvalue: probe,
            });
        }
        Ok(())
    }

    fn check_vector(&self, w: &[Complex64]) -> Result<()> {
        if w.len() != self.domain_dim {
            return Err(Error::DimensionMismatch {
                expected: self.domain_dim,
                found: w.len(),
            });
        }
        if self.field == ScalarField::Real && w.iter().any(|z| z.im != 0.0) {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// `T(u, v)` as an element of the codomain lattice.
    pub fn evaluate(&self, u: &[Complex64], v: &[Complex64]) -> Result<LatticeElement> {
        self.check_vector(u)?;
        self.check_vector(v)?;
        LatticeElement::new(self.field, self.evaluate_unchecked(u, v))
    }

    // Diagonal terms first, then the (p, q)/(q, p) pairs: with this order
    // T(v, u) is the exact conjugate of T(u, v) for Hermitian families.
    fn evaluate_unchecked(&self, u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
        let m = self.domain_dim;
        self.matrices
            .iter()
            .map(|a| {
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..m {
                    acc += a[(p, p)] * (u[p] * v[p].conj());
                }
                for p in 0..m {
                    for q in p + 1..m {
                        acc += a[(p, q)] * (u[p] * v[q].conj()) + a[(q, p)] * (u[q] * v[p].conj());
                    }
                }
                acc
            })
            .collect()
    }
}

/// `T(u,u)`, `T(u,v)`, `T(v,v)` for a validated form.
struct GapTerms {
    uu: Vec<f64>,
    uv: Vec<Complex64>,
    vv: Vec<f64>,
}

impl GapTerms {
    fn new(form: &SesquilinearForm, u: &[Complex64], v: &[Complex64], cfg: &GridConfig) -> Result<Self> {
        cfg.validate()?;
        form.validate(cfg)?;
        // T(w, w) ≥ 0 for PSD forms; rounding noise below zero is clamped
        let uu = form.evaluate(u, u)?.re().into_iter().map(|x| x.max(0.0)).collect();
        let vv = form.evaluate(v, v)?.re().into_iter().map(|x| x.max(0.0)).collect();
        let uv = form.evaluate(u, v)?.coords().to_vec();
        Ok(Self { uu, uv, vv })
    }

    fn scale(&self) -> f64 {
        self.uu.iter().chain(&self.vv).cloned().fold(0.0, f64::max)
    }

    fn closed_gap(&self) -> Vec<f64> {
        self.uu
            .iter()
            .zip(&self.vv)
            .zip(&self.uv)
            .map(|((&a, &c), b)| (2.0 * ((a * c).sqrt() - b.norm())).max(0.0))
            .collect()
    }

    fn definitional_gap(&self, field: ScalarField, cfg: &GridConfig) -> Vec<f64> {
        let thetas = cfg.theta_grid();
        let sphere = cfg.unit_sphere(field);
        self.uu
            .iter()
            .zip(&self.vv)
            .zip(&self.uv)
            .map(|((&a, &c), &b)| {
                let radial = scan_refine_log_min(|t| t * a + c / t, &thetas, cfg.refine_iters);
                // phase alignment λ·b = |b| seeds the sphere scan
                let seed = if b.norm() > 0.0 { b.conj() / b.norm() } else { Complex64::new(1.0, 0.0) };
                let angular = sphere
                    .iter()
                    .chain(std::iter::once(&seed))
                    .filter(|l| field == ScalarField::Complex || l.im == 0.0)
                    .map(|l| -2.0 * (l * b).re)
                    .fold(f64::INFINITY, f64::min);
                radial + angular
            })
            .collect()
    }
}

/// The Cauchy–Schwarz gap `inf{|z|⁻¹ T(zu − v, zu − v) : z ∈ K∖{0}}`, by
/// grid minimization over `z = θλ` and in closed form.
pub fn cs_gap(form: &SesquilinearForm, u: &[Complex64], v: &[Complex64], cfg: &GridConfig) -> Result<Evaluation> {
    let terms = GapTerms::new(form, u, v, cfg)?;
    Ok(Evaluation {
        definitional: LatticeElement::from_reals_unchecked(form.field, terms.definitional_gap(form.field, cfg)),
        closed: LatticeElement::from_reals_unchecked(form.field, terms.closed_gap()),
    })
}

/// Both sides of `|T(u,v)| = T(u,u) ⊠ T(v,v) − ½·gap` and the equality verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchySchwarzReport {
    /// `|T(u, v)|`
    pub lhs: LatticeElement,
    /// `T(u, u) ⊠ T(v, v)`
    pub rhs: LatticeElement,
    /// Definitional (grid) gap.
    pub gap: LatticeElement,
    pub closed_gap: LatticeElement,
    /// `max_j | lhs_j − (rhs_j − gap_j / 2) |`
    pub identity_residual: f64,
    /// `max_j (lhs_j − rhs_j)⁺`
    pub inequality_violation: f64,
    /// Every coordinate of `gap` is at most
    /// `equality_tol · (1 + max(T(u,u)_j, T(v,v)_j))`.
    pub equality: bool,
    pub equality_tol: f64,
}

pub fn cauchy_schwarz_report(
    form: &SesquilinearForm,
    u: &[Complex64],
    v: &[Complex64],
    cfg: &GridConfig,
) -> Result<CauchySchwarzReport> {
    let terms = GapTerms::new(form, u, v, cfg)?;
    let field = form.field;
    let gap = terms.definitional_gap(field, cfg);
    let lhs: Vec<f64> = terms.uv.iter().map(|b| b.norm()).collect();
    let rhs: Vec<f64> = terms.uu.iter().zip(&terms.vv).map(|(a, c)| (a * c).sqrt()).collect();
    let identity_residual = lhs
        .iter()
        .zip(&rhs)
        .zip(&gap)
        .map(|((l, r), g)| (l - (r - 0.5 * g)).abs())
        .fold(0.0, f64::max);
    let inequality_violation = lhs.iter().zip(&rhs).map(|(l, r)| (l - r).max(0.0)).fold(0.0, f64::max);
    let equality = gap
        .iter()
        .zip(terms.uu.iter().zip(&terms.vv))
        .all(|(&g, (&a, &c))| g <= EQUALITY_TOL * (1.0 + a.max(c)));
    Ok(CauchySchwarzReport {
        lhs: LatticeElement::from_reals_unchecked(field, lhs),
        rhs: LatticeElement::from_reals_unchecked(field, rhs),
        gap: LatticeElement::from_reals_unchecked(field, gap),
        closed_gap: LatticeElement::from_reals_unchecked(field, terms.closed_gap()),
        identity_residual,
        inequality_violation,
        equality,
        equality_tol: EQUALITY_TOL,
    })
}

pub(crate) fn operands_json(form: &SesquilinearForm, u: &[Complex64], v: &[Complex64]) -> serde_json::Value {
    let pairs = |w: &[Complex64]| w.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
    let mats: Vec<Vec<Vec<[f64; 2]>>> = form
        .matrices
        .iter()
        .map(|a| {
            (0..a.nrows())
                .map(|p| (0..a.ncols()).map(|q| [a[(p, q)].re, a[(p, q)].im]).collect())
                .collect()
        })
        .collect();
    json!({ "field": form.field, "form": mats, "u": pairs(u), "v": pairs(v) })
}

/// Outcome of the Cauchy–Schwarz identity and inequality checks.
pub(crate) fn cauchy_schwarz_outcome(
    form: &SesquilinearForm,
    u: &[Complex64],
    v: &[Complex64],
    cfg: &GridConfig,
) -> Result<(InstanceOutcome, CauchySchwarzReport)> {
    let rep = cauchy_schwarz_report(form, u, v, cfg)?;
    let scale = rep.rhs.max_abs();
    let outcome = InstanceOutcome::new(operands_json(form, u, v))
        .with(Relation::new("identity", rep.identity_residual, cfg.grid_tol))
        .with(Relation::new("inequality", rep.inequality_violation, cfg.scaled_tol(scale)))
        .with(Relation::new(
            "gap_lower_bound",
            rep.closed_gap.max_excess_over(&rep.gap)?,
            cfg.scaled_tol(scale),
        ))
        .with_residual(rep.gap.max_abs_diff(&rep.closed_gap)?);
    Ok((outcome, rep))
}

pub(crate) fn corollary_outcome(
    form: &SesquilinearForm,
    u: &[Complex64],
    v: &[Complex64],
    cfg: &GridConfig,
) -> Result<InstanceOutcome> {
    let terms = GapTerms::new(form, u, v, cfg)?;
    let field = form.field;
    let gap = LatticeElement::from_reals_unchecked(field, terms.definitional_gap(field, cfg));
    let uu = LatticeElement::from_reals_unchecked(field, terms.uu.clone());
    let vv = LatticeElement::from_reals_unchecked(field, terms.vv.clone());
    let uv = LatticeElement::new(field, terms.uv.clone())?;

    let abs_uv = modulus_closed(&uv);
    let lhs = multiply(&abs_uv, &abs_uv)?;
    let product = multiply(&uu, &vv)?;
    let root = nth_root(&product, 2)?;
    let inner = root.checked_sub(&gap.scale(0.5)?)?;
    let rhs = multiply(&inner, &inner)?;

    let identity = lhs.max_abs_diff(&rhs)?;
    let inequality = lhs.max_excess_over(&product)?;
    Ok(InstanceOutcome::new(operands_json(form, u, v))
        .with(Relation::new("identity", identity, cfg.grid_tol * (1.0 + root.max_abs())))
        .with(Relation::new("inequality", inequality, cfg.scaled_tol(product.max_abs())))
        .with_residual(identity))
}

/// Checks `|T(u,v)|² = ((T(u,u)T(v,v))^{1/2} − ½·gap)²` and
/// `|T(u,v)|² ≤ T(u,u)T(v,v)` in the f-algebra codomain.
pub fn corollary_fsquare_report(
    form: &SesquilinearForm,
    u: &[Complex64],
    v: &[Complex64],
    cfg: &GridConfig,
) -> Result<VerificationReport> {
    let outcome = corollary_outcome(form, u, v, cfg)?;
    let mut b = ReportBuilder::new("cs-corollary", cfg, 0);
    b.push(outcome);
    Ok(b.finish())
}

/// Searches for scalars `(α, β) ≠ (0, 0)` with `T(βu + αv, βu + αv) = 0`.
///
/// Candidates are the trivial directions `u` and `v`, the per-coordinate
/// minimizers of the gap objective, and `probe_count` directions on the unit
/// sphere of `K²` (a grid whose phase offset depends on `seed`). A returned
/// witness is normalized so that `α = 1` when `α ≠ 0`, and is confirmed by
/// direct evaluation.
pub fn classical_equality_witness_search(
    form: &SesquilinearForm,
    u: &[Complex64],
    v: &[Complex64],
    probe_count: usize,
    seed: u64,
    cfg: &GridConfig,
) -> Result<Option<(Complex64, Complex64)>> {
    let terms = GapTerms::new(form, u, v, cfg)?;
    let tol = cfg.scaled_tol(terms.scale());
    let field = form.field;

    // T(βu + αv, βu + αv)_j = |β|²·T(u,u) + 2·Re(β·conj(α)·T(u,v)) + |α|²·T(v,v)
    let vanishes = |alpha: Complex64, beta: Complex64| {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if n == 0.0 {
            return false;
        }
        let (alpha, beta) = (alpha / n, beta / n);
        terms.uu.iter().zip(&terms.vv).zip(&terms.uv).all(|((&a, &c), &b)| {
            beta.norm_sqr() * a + 2.0 * (beta * alpha.conj() * b).re + alpha.norm_sqr() * c <= tol
        })
    };

    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut candidates = vec![(zero, one), (one, zero)];
    for ((&a, &c), &b) in terms.uu.iter().zip(&terms.vv).zip(&terms.uv) {
        if a > 0.0 && c > 0.0 {
            let phase = if b.norm() > 0.0 { b.conj() / b.norm() } else { one };
            candidates.push((-one, phase * (c / a).sqrt()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rng.random();
    let probes: Box<dyn Iterator<Item = (Complex64, Complex64)>> = match field {
        ScalarField::Real => Box::new((0..probe_count).map(move |t| {
            let phi = std::f64::consts::PI * (t as f64 + offset) / probe_count as f64;
            (Complex64::new(phi.cos(), 0.0), Complex64::new(phi.sin(), 0.0))
        })),
        ScalarField::Complex => {
            let n_phase = ((probe_count as f64).sqrt().ceil() as usize).max(1);
            let n_mag = probe_count.div_ceil(n_phase).max(2);
            Box::new((0..probe_count).map(move |t| {
                let (i, k) = (t / n_phase, t % n_phase);
                let phi = std::f64::consts::FRAC_PI_2 * i as f64 / (n_mag - 1) as f64;
                let psi = 2.0 * std::f64::consts::PI * (k as f64 + offset) / n_phase as f64;
                (
                    Complex64::new(phi.cos(), 0.0),
                    Complex64::from_polar(phi.sin(), psi),
                )
            }))
        }
    };

    for (alpha, beta) in candidates.into_iter().chain(probes) {
        if !vanishes(alpha, beta) {
            continue;
        }
        let (alpha, beta) = if alpha.norm() > 0.0 { (one, beta / alpha) } else { (zero, one) };
        let w: Vec<Complex64> = u.iter().zip(v).map(|(x, y)| beta * x + alpha * y).collect();
        let n2 = alpha.norm_sqr() + beta.norm_sqr();
        let direct = form.evaluate(&w, &w)?;
        if direct.coords().iter().all(|z| z.re <= tol * n2) {
            return Ok(Some((alpha, beta)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reals(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn example_form(field: ScalarField) -> SesquilinearForm {
        SesquilinearForm::diagonal(field, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let t = example_form(ScalarField::Complex);
        let e = t.evaluate(&reals(&[1.0, 0.0]), &reals(&[0.0, 1.0])).unwrap();
        assert!(e.is_zero());

        let t = SesquilinearForm::diagonal(ScalarField::Complex, &[vec![2.0, 1.0], vec![0.5, 3.0]]).unwrap();
        assert!(t.evaluate(&reals(&[0.0, 0.0]), &[c(1.0, 2.0), c(-3.0, 0.5)]).unwrap().is_zero());

        let t = SesquilinearForm::diagonal(ScalarField::Complex, &[vec![1.0]]).unwrap();
        let e = t.evaluate(&[c(2.0, 0.0)], &[c(0.0, 3.0)]).unwrap();
        assert_eq!(e.coords(), &[c(0.0, -6.0)]);
    }

    #[test]
    fn evaluate_rejects_bad_vectors() {
        let t = example_form(ScalarField::Real);
        assert!(matches!(
            t.evaluate(&reals(&[1.0]), &reals(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            t.evaluate(&[c(1.0, 1.0), c(0.0, 0.0)], &reals(&[1.0, 0.0])),
            Err(Error::FieldMismatch)
        );
    }

    #[test]
    fn conjugate_symmetry_is_exact() {
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0), c(0.3, -1.1), c(-0.7, 0.2),
                c(0.3, 1.1), c(1.5, 0.0), c(0.9, 0.4),
                c(-0.7, -0.2), c(0.9, -0.4), c(3.1, 0.0),
            ],
        );
        let t = SesquilinearForm::new(ScalarField::Complex, vec![a]).unwrap();
        let u = [c(0.1, -2.3), c(1.7, 0.4), c(-0.9, 0.33)];
        let v = [c(-1.2, 0.8), c(0.05, 1.9), c(2.2, -0.6)];
        assert_eq!(t.evaluate(&u, &v).unwrap().coords(), t.evaluate(&v, &u).unwrap().conj().coords());
        assert_eq!(t.evaluate(&u, &u).unwrap().coords()[0].im, 0.0);
    }

    #[test]
    fn gap_objective_matches_direct_evaluation() {
        let a = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(1.0, 0.0)]);
        let t = SesquilinearForm::new(ScalarField::Complex, vec![a]).unwrap();
        let u = [c(1.0, -0.5), c(0.25, 2.0)];
        let v = [c(-0.3, 0.7), c(1.1, 0.0)];
        let uu = t.evaluate(&u, &u).unwrap().coords()[0].re;
        let vv = t.evaluate(&v, &v).unwrap().coords()[0].re;
        let uv = t.evaluate(&u, &v).unwrap().coords()[0];
        for &(theta, phase) in &[(0.3, 0.1), (1.0, 2.0), (4.5, -1.3)] {
            let lambda = Complex64::from_polar(1.0, phase);
            let z = lambda * theta;
            let w: Vec<Complex64> = u.iter().zip(&v).map(|(x, y)| z * x - y).collect();
            let direct = t.evaluate(&w, &w).unwrap().coords()[0].re / theta;
            let expanded = theta * uu + vv / theta - 2.0 * (lambda * uv).re;
            assert!((direct - expanded).abs() < 1e-12, "{direct} vs {expanded}");
        }
    }

    #[test]
    fn validation_rejects_non_hermitian_and_indefinite() {
        let cfg = GridConfig::default();
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let t = SesquilinearForm::new(ScalarField::Real, vec![a]).unwrap();
        assert_eq!(t.validate(&cfg), Err(Error::NotHermitian(0)));

        let t = SesquilinearForm::diagonal(ScalarField::Real, &[vec![1.0, -0.5]]).unwrap();
        assert!(matches!(t.validate(&cfg), Err(Error::NotPositiveSemidefinite { index: 0, .. })));
        assert!(cs_gap(&t, &reals(&[1.0, 0.0]), &reals(&[0.0, 1.0]), &cfg).is_err());

        let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let t = SesquilinearForm::new(ScalarField::Real, vec![a]).unwrap();
        assert!(t.validate(&cfg).is_err());
        assert!(t.min_probe_value() < 0.0);
    }

    #[test]
    fn real_form_rejects_complex_entries() {
        let a = DMatrix::from_row_slice(1, 1, &[c(1.0, 0.5)]);
        assert!(SesquilinearForm::new(ScalarField::Real, vec![a]).is_err());
        assert!(SesquilinearForm::new(ScalarField::Real, vec![]).is_err());
    }

    #[test]
    fn gap_on_counterexample_form() {
        let cfg = GridConfig::default();
        for field in [ScalarField::Real, ScalarField::Complex] {
            let t = example_form(field);
            let g = cs_gap(&t, &reals(&[1.0, 0.0]), &reals(&[0.0, 1.0]), &cfg).unwrap();
            assert_eq!(g.closed.re(), vec![0.0, 0.0]);
            assert!(g.definitional.re().iter().all(|&x| (0.0..=EQUALITY_TOL).contains(&x)));
        }
    }

    #[test]
    fn gap_of_parallel_scalars_is_zero() {
        let cfg = GridConfig::default();
        let t = SesquilinearForm::diagonal(ScalarField::Real, &[vec![1.0]]).unwrap();
        let g = cs_gap(&t, &reals(&[1.0]), &reals(&[2.0]), &cfg).unwrap();
        assert_eq!(g.closed.re(), vec![0.0]);
        assert!(g.definitional.re()[0].abs() < 1e-12);
    }

    #[test]
    fn gap_of_orthonormal_pair_by_brute_force() {
        // oracle: brute-force minimum over a dense z grid, direct evaluation
        let cfg = GridConfig::default();
        let t = SesquilinearForm::diagonal(ScalarField::Complex, &[vec![1.0, 1.0]]).unwrap();
        let (u, v) = (reals(&[1.0, 0.0]), reals(&[0.0, 1.0]));
        let mut brute = f64::INFINITY;
        for i in 0..400 {
            let theta = (-3.0 + 6.0 * i as f64 / 399.0f64).exp();
            for k in 0..64 {
                let z = Complex64::from_polar(theta, 2.0 * std::f64::consts::PI * k as f64 / 64.0);
                let w: Vec<Complex64> = u.iter().zip(&v).map(|(x, y)| z * x - y).collect();
                brute = brute.min(t.evaluate(&w, &w).unwrap().coords()[0].re / theta);
            }
        }
        assert!((brute - 2.0).abs() < 1e-3);
        let g = cs_gap(&t, &u, &v, &cfg).unwrap();
        assert_eq!(g.closed.re(), vec![2.0]);
        assert!((g.definitional.re()[0] - 2.0).abs() <= cfg.grid_tol);
        assert!(g.definitional.re()[0] <= brute + 1e-12);
    }

    #[test]
    fn report_on_counterexample() {
        let cfg = GridConfig::default();
        let t = example_form(ScalarField::Complex);
        let rep = cauchy_schwarz_report(&t, &reals(&[1.0, 0.0]), &reals(&[0.0, 1.0]), &cfg).unwrap();
        assert!(rep.equality);
        assert!(rep.lhs.is_zero() && rep.rhs.is_zero());
        assert_eq!(rep.inequality_violation, 0.0);
    }

    #[test]
    fn equality_survives_scaling_of_the_counterexample() {
        // the grid only reaches THETA_MIN · T(u,u), which grows with the scale
        let cfg = GridConfig::default();
        for s in [2.0, 1e3, 1e5] {
            let t = SesquilinearForm::diagonal(ScalarField::Complex, &[vec![s, 0.0], vec![0.0, s]]).unwrap();
            let rep = cauchy_schwarz_report(&t, &reals(&[1.0, 0.0]), &reals(&[0.0, 1.0]), &cfg).unwrap();
            assert!(rep.gap.max_abs() > EQUALITY_TOL, "{s}");
            assert!(rep.equality, "{s}");
        }
    }

    #[test]
    fn report_with_equal_vectors() {
        let cfg = GridConfig::default();
        let a = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(1.0, 0.0)]);
        let t = SesquilinearForm::new(ScalarField::Complex, vec![a, DMatrix::identity(2, 2)]).unwrap();
        let u = [c(0.7, -0.2), c(1.5, 0.3)];
        let rep = cauchy_schwarz_report(&t, &u, &u, &cfg).unwrap();
        assert!(rep.equality);
        let tuu = modulus_closed(&t.evaluate(&u, &u).unwrap());
        assert!(rep.lhs.max_abs_diff(&tuu).unwrap() < 1e-12);
        assert!(rep.rhs.max_abs_diff(&tuu).unwrap() < 1e-12);
        assert!(rep.identity_residual < 1e-9);
    }

    #[test]
    fn corollary_examples() {
        let cfg = GridConfig::default();
        let t = example_form(ScalarField::Real);
        let rep = corollary_fsquare_report(&t, &reals(&[1.0, 0.0]), &reals(&[0.0, 1.0]), &cfg).unwrap();
        assert_eq!(rep.passes, 1);
        let u = reals(&[1.5, -2.0]);
        let rep = corollary_fsquare_report(&t, &u, &u, &cfg).unwrap();
        assert_eq!(rep.passes, 1);
        assert!(rep.max_violation < 1e-9);
    }

    #[test]
    fn witness_search_examples() {
        let cfg = GridConfig::default();
        let t = example_form(ScalarField::Complex);
        let w = classical_equality_witness_search(&t, &reals(&[1.0, 0.0]), &reals(&[0.0, 1.0]), 10_000, 1, &cfg)
            .unwrap();
        assert_eq!(w, None);

        let a = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(1.0, 0.0)]);
        let t = SesquilinearForm::new(ScalarField::Complex, vec![a]).unwrap();
        let u = [c(0.7, -0.2), c(1.5, 0.3)];
        let v: Vec<Complex64> = u.iter().map(|x| x * 2.0).collect();
        let w = classical_equality_witness_search(&t, &u, &v, 100, 1, &cfg).unwrap();
        assert_eq!(w, Some((c(1.0, 0.0), c(-2.0, 0.0))));

        let t = SesquilinearForm::diagonal(ScalarField::Real, &[vec![1.0]]).unwrap();
        let w = classical_equality_witness_search(&t, &reals(&[1.0]), &reals(&[3.0]), 100, 1, &cfg).unwrap();
        assert_eq!(w, Some((c(1.0, 0.0), c(-3.0, 0.0))));
    }

    #[test]
    fn witness_search_with_no_probes_uses_candidates_only() {
        let cfg = GridConfig::default();
        let t = SesquilinearForm::diagonal(ScalarField::Real, &[vec![1.0, 1.0]]).unwrap();
        let w = classical_equality_witness_search(&t, &reals(&[1.0, 1.0]), &reals(&[-2.0, -2.0]), 0, 0, &cfg)
            .unwrap();
        assert_eq!(w, Some((c(1.0, 0.0), c(2.0, 0.0))));
    }
}
