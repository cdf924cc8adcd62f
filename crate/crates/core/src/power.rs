//! The coordinatewise Φ-algebra: products, roots, real powers and the
//! weighted geometric mean `△`.

use serde::{Deserialize, Serialize};

use crate::config::GridConfig;
use crate::error::{Error, Result};
use crate::lattice::{modulus_closed, Evaluation, LatticeElement};
use crate::report::{InstanceOutcome, Relation, ReportBuilder, VerificationReport};
use crate::search::{scan_refine_log_argmin, scan_refine_log_min, ternary_min};

/// Weights `r₁, …, rₙ ∈ (0, 1)` with `Σ rₖ = 1`.
///
/// The single weight `(1)` is also accepted; it is the degenerate case in
/// which `△(f, 1) = |f|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

/// Tolerance on `Σ rₖ = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        if weights.len() == 1 {
            if weights[0] == 1.0 {
                return Ok(Self(weights));
            }
            return Err(Error::InvalidWeights("a single weight must equal 1".into()));
        }
        for (k, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w < 1.0) {
                return Err(Error::InvalidWeights(format!("weight {k} = {w} is not in (0, 1)")));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(Self(weights))
    }

    /// Equal weights `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// `r = ⌊r⌋ + r̃` with `⌊r⌋ ∈ N ∪ {0}` and `r̃ ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentDecomposition {
    pub r: f64,
    pub floor_part: u32,
    pub frac_part: f64,
}

impl ExponentDecomposition {
    pub fn new(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) || r >= u32::MAX as f64 {
            return Err(Error::InvalidExponent(r));
        }
        let floor = r.floor();
        Ok(Self {
            r,
            floor_part: floor as u32,
            frac_part: r - floor,
        })
    }
}

/// Coordinatewise product; the complexified f-algebra multiplication.
pub fn multiply(a: &LatticeElement, b: &LatticeElement) -> Result<LatticeElement> {
    a.zip_coords(b, |x, y| x * y)
}

/// `a^n` by repeated multiplication, with `a⁰ = e`.
pub fn int_power(a: &LatticeElement, n: u32) -> Result<LatticeElement> {
    let mut acc = LatticeElement::unit(a.field(), a.dim())?;
    for _ in 0..n {
        acc = multiply(&acc, a)?;
    }
    Ok(acc)
}

/// The unique positive `r` with `rⁿ = a`, for `a` in the positive cone.
pub fn nth_root(a: &LatticeElement, n: u32) -> Result<LatticeElement> {
    if n == 0 {
        return Err(Error::InvalidRootIndex);
    }
    a.require_positive()?;
    Ok(LatticeElement::from_reals_unchecked(
        a.field(),
        a.coords().iter().map(|z| scalar_root(z.re, n)).collect(),
    ))
}

fn scalar_root(x: f64, n: u32) -> f64 {
    match n {
        1 => x,
        2 => x.sqrt(),
        3 => x.cbrt(),
        _ => {
            if x == 0.0 {
                return 0.0;
            }
            let y = x.powf(1.0 / n as f64);
            // one Newton step on yⁿ − x
            let nf = n as f64;
            let polished = y - (y.powi(n as i32) - x) / (nf * y.powi(n as i32 - 1));
            if polished.is_finite() && polished > 0.0 {
                polished
            } else {
                y
            }
        }
    }
}

/// Closed-form real power `a^r` of a positive element, with `0^r = 0`.
pub fn power_closed(a: &LatticeElement, r: f64) -> Result<LatticeElement> {
    ExponentDecomposition::new(r)?;
    a.require_positive()?;
    Ok(LatticeElement::from_reals_unchecked(
        a.field(),
        a.coords()
            .iter()
            .map(|z| if z.re == 0.0 { 0.0 } else { z.re.powf(r) })
            .collect(),
    ))
}

/// `a^r = a^{⌊r⌋} · inf{r̃θ₁a + (1 − r̃)θ₂e : θ₁^{r̃}θ₂^{1−r̃} = 1}`.
///
/// The constraint is parametrized by `θ₁ = t`, `θ₂ = t^{−r̃/(1−r̃)}`; the
/// objective is convex in `ln t`. For integer `r` the infimum factor is `e`.
pub fn power(a: &LatticeElement, r: f64, cfg: &GridConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let dec = ExponentDecomposition::new(r)?;
    a.require_positive()?;
    let closed = power_closed(a, r)?;
    let whole = int_power(a, dec.floor_part)?;
    let frac = dec.frac_part;
    if frac == 0.0 {
        return Ok(Evaluation {
            definitional: whole,
            closed,
        });
    }
    let thetas = cfg.theta_grid();
    let alpha = frac / (1.0 - frac);
    let inf_factor: Vec<f64> = a
        .coords()
        .iter()
        .map(|z| {
            let x = z.re;
            scan_refine_log_min(
                |t| frac * t * x + (1.0 - frac) * t.powf(-alpha),
                &thetas,
                cfg.refine_iters,
            )
        })
        .collect();
    let definitional = multiply(&whole, &LatticeElement::from_reals_unchecked(a.field(), inf_factor))?;
    Ok(Evaluation {
        definitional,
        closed,
    })
}

fn check_operands(fs: &[LatticeElement], w: &WeightVector) -> Result<()> {
    if fs.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            found: fs.len(),
        });
    }
    for f in &fs[1..] {
        fs[0].require_compatible(f)?;
    }
    Ok(())
}

/// `Σ rₖ ln xₖ` summed in a canonical order, so permuting `(x, r)` pairs
/// jointly leaves the result bit-identical.
fn log_weighted_sum(terms: &mut [(f64, f64)]) -> f64 {
    terms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    terms.iter().map(|(r, lx)| r * lx).sum()
}

/// Closed-form `△(fₖ, rₖ) = Πₖ |fₖ|^{rₖ}`, evaluated as `exp(Σ rₖ ln|fₖ|)`.
pub fn weighted_geometric_mean_closed(fs: &[LatticeElement], w: &WeightVector) -> Result<LatticeElement> {
    check_operands(fs, w)?;
    let moduli: Vec<LatticeElement> = fs.iter().map(modulus_closed).collect();
    if moduli.len() == 1 {
        return Ok(moduli.into_iter().next().expect("one operand"));
    }
    let dim = fs[0].dim();
    let mut out = Vec::with_capacity(dim);
    let mut terms = Vec::with_capacity(fs.len());
    for j in 0..dim {
        terms.clear();
        let mut zero = false;
        for (m, &r) in moduli.iter().zip(w.as_slice()) {
            let x = m.coords()[j].re;
            if x == 0.0 {
                zero = true;
                break;
            }
            terms.push((r, x.ln()));
        }
        out.push(if zero { 0.0 } else { log_weighted_sum(&mut terms).exp() });
    }
    Ok(LatticeElement::from_reals_unchecked(fs[0].field(), out))
}

const MAX_SWEEPS: usize = 200;

/// Per-coordinate infimum of `Σ rₖθₖxₖ` over `Π θₖ^{rₖ} = 1`.
///
/// One θ is solved from the constraint: that of a zero coordinate if there
/// is one (its term then vanishes however large θ gets, so the others can
/// reach the grid floor), otherwise that of the heaviest weight. The others
/// start on the log grid and are improved by coordinate descent (every slice
/// is convex in `ln θₖ`). All samples are exactly feasible.
fn constrained_weighted_inf(x: &[f64], r: &[f64], thetas: &[f64], cfg: &GridConfig) -> f64 {
    let n = x.len();
    if n == 1 {
        return x[0];
    }
    let pivot = x
        .iter()
        .position(|&v| v == 0.0)
        .unwrap_or_else(|| (0..n).fold(0, |best, k| if r[k] > r[best] { k } else { best }));
    let pivot_term = |log_sum: f64| {
        if x[pivot] == 0.0 {
            0.0
        } else {
            r[pivot] * (-log_sum / r[pivot]).exp() * x[pivot]
        }
    };
    let free: Vec<usize> = (0..n).filter(|&k| k != pivot).collect();
    let (s_lo, s_hi) = (thetas[0].ln(), thetas[thetas.len() - 1].ln());

    // objective as a function of the log-parameters of the free coordinates
    let objective = |s: &[f64]| -> f64 {
        let mut total = 0.0;
        let mut log_sum = 0.0;
        for (i, &k) in free.iter().enumerate() {
            total += r[k] * s[i].exp() * x[k];
            log_sum += r[k] * s[i];
        }
        total + pivot_term(log_sum)
    };

    let mut s = vec![0.0; free.len()];
    let mut value = objective(&s);
    for sweep in 0..MAX_SWEEPS {
        let before = value;
        for i in 0..free.len() {
            let ki = free[i];
            // contributions of the other free coordinates, held fixed on this slice
            let (mut rest_total, mut rest_log) = (0.0, 0.0);
            for (l, &k) in free.iter().enumerate() {
                if l != i {
                    rest_total += r[k] * s[l].exp() * x[k];
                    rest_log += r[k] * s[l];
                }
            }
            let slice = |si: f64| {
                rest_total + r[ki] * si.exp() * x[ki] + pivot_term(rest_log + r[ki] * si)
            };
            let (si, vi) = if sweep == 0 {
                let (theta, v) = scan_refine_log_argmin(|t| slice(t.ln()), thetas, cfg.refine_iters);
                (theta.ln(), v)
            } else {
                ternary_min(slice, s_lo, s_hi, cfg.refine_iters)
            };
            if vi < value {
                value = vi;
                s[i] = si;
            }
        }
        if free.len() == 1 || before - value <= 1e-15 * value.abs() {
            break;
        }
    }
    value
}

/// `△(fₖ, rₖ) = inf{Σ rₖθₖ|fₖ| : θₖ > 0, Π θₖ^{rₖ} = 1}`, by grid descent
/// over the constraint manifold and by the closed form `Π |fₖ|^{rₖ}`.
///
/// Arbitrary-sign and complex operands are allowed; moduli are taken first.
pub fn weighted_geometric_mean(
    fs: &[LatticeElement],
    w: &WeightVector,
    cfg: &GridConfig,
) -> Result<Evaluation> {
    cfg.validate()?;
    let closed = weighted_geometric_mean_closed(fs, w)?;
    let moduli: Vec<LatticeElement> = fs.iter().map(modulus_closed).collect();
    let thetas = cfg.theta_grid();
    let mut xs = vec![0.0; fs.len()];
    let definitional = (0..fs[0].dim())
        .map(|j| {
            for (x, m) in xs.iter_mut().zip(&moduli) {
                *x = m.coords()[j].re;
            }
            constrained_weighted_inf(&xs, w.as_slice(), &thetas, cfg)
        })
        .collect();
    Ok(Evaluation {
        definitional: LatticeElement::from_reals_unchecked(fs[0].field(), definitional),
        closed,
    })
}

/// Largest coordinatewise relative discrepancy `|x − y| / max(|x|, |y|)`.
pub(crate) fn max_rel_diff(x: &LatticeElement, y: &LatticeElement) -> f64 {
    x.coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| {
            let d = (a - b).norm();
            if d == 0.0 {
                0.0
            } else {
                d / a.norm().max(b.norm())
            }
        })
        .fold(0.0, f64::max)
}

/// Checks `(a^p)^q = a^{pq}` and `a^p a^q = a^{p+q}` on closed forms, to
/// relative tolerance `cfg.abs_tol`.
pub fn check_power_rules(a: &LatticeElement, p: f64, q: f64, cfg: &GridConfig) -> Result<VerificationReport> {
    let outcome = power_rules_outcome(a, p, q, cfg)?;
    let mut report = ReportBuilder::new("power-rules", cfg, 0);
    report.push(outcome);
    Ok(report.finish())
}

pub(crate) fn power_rules_outcome(a: &LatticeElement, p: f64, q: f64, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let ap = power_closed(a, p)?;
    let nested = power_closed(&ap, q)?;
    let direct = power_closed(a, p * q)?;
    let product = multiply(&ap, &power_closed(a, q)?)?;
    let sum = power_closed(a, p + q)?;
    Ok(InstanceOutcome::new(serde_json::json!({
        "a": a.to_pairs(),
        "p": p,
        "q": q,
    }))
    .with(Relation::new("nested_power", max_rel_diff(&nested, &direct), cfg.abs_tol))
    .with(Relation::new("product_power", max_rel_diff(&product, &sum), cfg.abs_tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{geometric_mean_closed, ScalarField};
    use num_complex::Complex64;

    fn r(v: &[f64]) -> LatticeElement {
        LatticeElement::real(v).unwrap()
    }

    fn close(a: &LatticeElement, b: &LatticeElement, tol: f64) -> bool {
        a.max_abs_diff(b).unwrap() <= tol
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(multiply(&r(&[2.0, 3.0]), &r(&[4.0, 5.0])).unwrap(), r(&[8.0, 15.0]));
        let a = r(&[-1.5, 2.0, 0.0]);
        assert_eq!(multiply(&a, &LatticeElement::unit(ScalarField::Real, 3).unwrap()).unwrap(), a);
        let a = r(&[1.0, -1.0]);
        let ab = multiply(&a, &a).unwrap();
        assert_eq!(ab, r(&[1.0, 1.0]));
        assert_eq!(
            modulus_closed(&ab),
            multiply(&modulus_closed(&a), &modulus_closed(&a)).unwrap()
        );
    }

    #[test]
    fn multiply_is_complex_product() {
        let a = LatticeElement::complex(&[(1.0, 2.0)]).unwrap();
        let b = LatticeElement::complex(&[(3.0, -1.0)]).unwrap();
        assert_eq!(multiply(&a, &b).unwrap().coords()[0], Complex64::new(5.0, 5.0));
        assert!(multiply(&a, &r(&[1.0])).is_err());
    }

    #[test]
    fn nth_root_examples() {
        assert_eq!(nth_root(&r(&[8.0, 27.0]), 3).unwrap(), r(&[2.0, 3.0]));
        assert_eq!(nth_root(&r(&[0.0, 1.0]), 2).unwrap(), r(&[0.0, 1.0]));
        let a = r(&[0.3, 12.0]);
        assert_eq!(nth_root(&a, 1).unwrap(), a);
        assert_eq!(nth_root(&r(&[1.0, -1.0]), 2), Err(Error::NotPositive(1)));
        assert_eq!(nth_root(&a, 0), Err(Error::InvalidRootIndex));
    }

    #[test]
    fn nth_root_inverts_int_power() {
        let a = r(&[0.0, 1e-3, 2.0, 7.5, 99.0]);
        for n in 1..=7 {
            let root = nth_root(&a, n).unwrap();
            let back = int_power(&root, n).unwrap();
            assert!(max_rel_diff(&back, &a) <= 1e-14, "n = {n}");
        }
    }

    #[test]
    fn exponent_decomposition() {
        let d = ExponentDecomposition::new(2.5).unwrap();
        assert_eq!((d.floor_part, d.frac_part), (2, 0.5));
        let d = ExponentDecomposition::new(0.75).unwrap();
        assert_eq!((d.floor_part, d.frac_part), (0, 0.75));
        let d = ExponentDecomposition::new(3.0).unwrap();
        assert_eq!((d.floor_part, d.frac_part), (3, 0.0));
        assert!(ExponentDecomposition::new(0.0).is_err());
        assert!(ExponentDecomposition::new(-1.0).is_err());
        assert!(ExponentDecomposition::new(f64::INFINITY).is_err());
    }

    #[test]
    fn power_examples() {
        let cfg = GridConfig::default();
        let a = r(&[4.0, 9.0]);
        let p = power(&a, 2.5, &cfg).unwrap();
        assert!(close(&p.closed, &r(&[32.0, 243.0]), 1e-12));
        assert!(p.discrepancy() <= cfg.grid_tol * (1.0 + 81.0));

        let p = power(&a, 1.0, &cfg).unwrap();
        assert_eq!(p.closed, a);
        assert_eq!(p.definitional, a);

        let p = power(&a, 0.5, &cfg).unwrap();
        assert_eq!(p.closed, r(&[2.0, 3.0]));
        assert_eq!(p.closed, nth_root(&a, 2).unwrap());
        assert!(p.discrepancy() <= cfg.grid_tol);
    }

    #[test]
    fn power_errors() {
        let cfg = GridConfig::default();
        assert_eq!(power(&r(&[-1.0]), 2.0, &cfg), Err(Error::NotPositive(0)));
        assert_eq!(power(&r(&[1.0]), 0.0, &cfg), Err(Error::InvalidExponent(0.0)));
        assert_eq!(power(&r(&[1.0]), -2.0, &cfg), Err(Error::InvalidExponent(-2.0)));
    }

    #[test]
    fn power_of_zero_is_zero() {
        let cfg = GridConfig::default();
        let z = r(&[0.0]);
        for &e in &[0.5, 1.0, 2.5, std::f64::consts::PI] {
            let p = power(&z, e, &cfg).unwrap();
            assert_eq!(p.closed, z);
            assert!(p.discrepancy() <= cfg.grid_tol);
        }
    }

    #[test]
    fn weights_validation() {
        assert!(WeightVector::new(vec![0.5, 0.5]).is_ok());
        assert!(WeightVector::new(vec![1.0]).is_ok());
        assert!(WeightVector::new(vec![]).is_err());
        assert!(WeightVector::new(vec![0.9]).is_err());
        assert!(WeightVector::new(vec![0.5, 0.6]).is_err());
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![1.2, -0.2]).is_err());
        let w: std::result::Result<WeightVector, _> = serde_json::from_str("[0.25, 0.75]");
        assert!(w.is_ok());
        let w: std::result::Result<WeightVector, _> = serde_json::from_str("[0.25, 0.5]");
        assert!(w.is_err());
    }

    #[test]
    fn weighted_gm_examples() {
        let cfg = GridConfig::default();
        let w = WeightVector::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let e = weighted_geometric_mean(&[r(&[8.0, 1.0]), r(&[1.0, 27.0])], &w, &cfg).unwrap();
        assert!(close(&e.closed, &r(&[2.0, 9.0]), 1e-12));
        assert!(e.discrepancy() <= cfg.grid_tol);

        let f = LatticeElement::complex(&[(3.0, -4.0), (-2.0, 0.0), (0.0, 0.0)]).unwrap();
        let w = WeightVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let e = weighted_geometric_mean(&[f.clone(), f.clone(), f.clone()], &w, &cfg).unwrap();
        assert!(close(&e.closed, &modulus_closed(&f), 1e-12));
        assert!(e.discrepancy() <= cfg.grid_tol);

        let f = r(&[4.0, 0.5, 0.0]);
        let g = r(&[9.0, 8.0, 3.0]);
        let w = WeightVector::uniform(2).unwrap();
        let e = weighted_geometric_mean(&[f.clone(), g.clone()], &w, &cfg).unwrap();
        assert!(close(&e.closed, &geometric_mean_closed(&f, &g).unwrap(), 1e-12));
        assert!(e.discrepancy() <= cfg.grid_tol);
    }

    #[test]
    fn weighted_gm_singleton_is_modulus() {
        let cfg = GridConfig::default();
        let f = r(&[-3.0, 2.0]);
        let w = WeightVector::new(vec![1.0]).unwrap();
        let e = weighted_geometric_mean(std::slice::from_ref(&f), &w, &cfg).unwrap();
        assert_eq!(e.closed, r(&[3.0, 2.0]));
        assert_eq!(e.definitional, r(&[3.0, 2.0]));
    }

    #[test]
    fn weighted_gm_errors() {
        let cfg = GridConfig::default();
        let w = WeightVector::uniform(2).unwrap();
        assert!(matches!(
            weighted_geometric_mean(&[r(&[1.0])], &w, &cfg),
            Err(Error::LengthMismatch { expected: 2, found: 1 })
        ));
        assert!(weighted_geometric_mean(&[r(&[1.0]), r(&[1.0, 2.0])], &w, &cfg).is_err());
    }

    #[test]
    fn weighted_gm_skewed_weights_converge() {
        let cfg = GridConfig::default();
        let fs = [r(&[3.0, 50.0]), r(&[70.0, 0.01]), r(&[0.2, 9.0]), r(&[15.0, 15.0])];
        for w in [
            vec![0.49, 0.49, 0.01, 0.01],
            vec![0.01, 0.01, 0.01, 0.97],
            vec![0.25, 0.25, 0.25, 0.25],
        ] {
            let w = WeightVector::new(w).unwrap();
            let e = weighted_geometric_mean(&fs, &w, &cfg).unwrap();
            assert!(e.discrepancy() <= cfg.grid_tol, "{:?}: {}", w, e.discrepancy());
            assert!(e.definitional.max_excess_over(&e.closed).is_ok());
        }
    }

    #[test]
    fn power_rules_examples() {
        let cfg = GridConfig::default();
        let rep = check_power_rules(&r(&[4.0]), 2.0, 0.5, &cfg).unwrap();
        assert_eq!((rep.instances, rep.passes), (1, 1));
        let rep = check_power_rules(&r(&[9.0]), 0.5, 3.0, &cfg).unwrap();
        assert_eq!(rep.passes, 1);
        assert!(check_power_rules(&r(&[-9.0]), 0.5, 3.0, &cfg).is_err());
    }

    #[test]
    fn power_rules_against_exp_ln_oracle() {
        // independent oracle: x^r = exp(r ln x)
        let oracle = |x: f64, e: f64| (e * x.ln()).exp();
        let a = r(&[0.37, 1.0, 2.5, 13.0, 42.0, 64.5, 88.1, 99.9]);
        let (p, q) = (std::f64::consts::PI, std::f64::consts::E);
        let cfg = GridConfig::default();
        let rep = check_power_rules(&a, p, q, &cfg).unwrap();
        assert_eq!(rep.passes, 1);
        let direct = power_closed(&a, p * q).unwrap();
        for (z, &x) in direct.coords().iter().zip(a.re().iter()) {
            let o = oracle(x, p * q);
            assert!((z.re - o).abs() <= 1e-9 * o, "{x}");
        }
    }

    #[test]
    fn multiplication_preserves_disjointness() {
        let a = r(&[2.0, 0.5, 3.0]);
        let f = r(&[1.0, 0.0, -2.0]);
        let g = r(&[0.0, 4.0, 0.0]);
        let fg = crate::lattice::meet(&modulus_closed(&f), &modulus_closed(&g)).unwrap();
        assert!(fg.is_zero());
        let af = multiply(&a, &f).unwrap();
        let m = crate::lattice::meet(&modulus_closed(&af), &modulus_closed(&g)).unwrap();
        assert!(m.is_zero());
    }
}
