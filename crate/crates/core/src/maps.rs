//! Positive linear maps between coordinatewise lattices, and the
//! inequalities they satisfy: Maligranda's weighted geometric mean bound,
//! Hölder and Minkowski.
//!
//! On `Rⁿ` a linear map is positive iff its matrix is entrywise nonnegative,
//! and a lattice homomorphism iff in addition every row has at most one
//! strictly positive entry. Over `C` the map acts on real and imaginary parts
//! separately.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::GridConfig;
use crate::error::{Error, Result};
use crate::lattice::{modulus_closed, LatticeElement, ScalarField};
use crate::power::{multiply, power_closed, weighted_geometric_mean_closed, WeightVector, WEIGHT_SUM_TOL};
use crate::report::{InstanceOutcome, Relation, ReportBuilder, VerificationReport};
use crate::rng::trial_rng;
use crate::sesquilinear::EQUALITY_TOL;

/// A nonnegative `out_dim × in_dim` matrix, stored by rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PositiveLinearMap {
    in_dim: usize,
    out_dim: usize,
    entries: Vec<Vec<f64>>,
}

impl PositiveLinearMap {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let out_dim = entries.len();
        if out_dim == 0 {
            return Err(Error::MalformedMatrix("map has no rows".into()));
        }
        let in_dim = entries[0].len();
        if in_dim == 0 {
            return Err(Error::MalformedMatrix("map has no columns".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != in_dim {
                return Err(Error::MalformedMatrix(format!(
                    "row {i} has {} entries, expected {in_dim}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::MalformedMatrix(format!("entry ({i}, {j}) is not finite")));
                }
                if x < 0.0 {
                    return Err(Error::NegativeEntry { row: i, col: j });
                }
            }
        }
        Ok(Self {
            in_dim,
            out_dim,
            entries,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
    }

    /// The `1 × n` map summing all coordinates.
    pub fn summation(n: usize) -> Result<Self> {
        Self::new(vec![vec![1.0; n]])
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    /// At most one strictly positive entry per row.
    pub fn is_lattice_homomorphism(&self) -> bool {
        self.entries.iter().all(|row| row.iter().filter(|&&x| x > 0.0).count() <= 1)
    }

    /// Index of a row with two or more positive entries, if any.
    pub fn mixing_row(&self) -> Option<usize> {
        self.entries
            .iter()
            .position(|row| row.iter().filter(|&&x| x > 0.0).count() >= 2)
    }
}

impl TryFrom<Vec<Vec<f64>>> for PositiveLinearMap {
    type Error = Error;
    fn try_from(v: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PositiveLinearMap> for Vec<Vec<f64>> {
    fn from(m: PositiveLinearMap) -> Self {
        m.entries
    }
}

/// Conjugate exponents `p₁, …, pₙ > 1` with `Σ 1/pₖ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ExponentVector(Vec<f64>);

impl ExponentVector {
    pub fn new(exponents: Vec<f64>) -> Result<Self> {
        if exponents.len() < 2 {
            return Err(Error::InvalidExponents("need at least two exponents".into()));
        }
        for (k, &p) in exponents.iter().enumerate() {
            if !(p.is_finite() && p > 1.0) {
                return Err(Error::InvalidExponents(format!("exponent {k} = {p} is not in (1, inf)")));
            }
        }
        let sum: f64 = exponents.iter().map(|p| 1.0 / p).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidExponents(format!("reciprocals sum to {sum}")));
        }
        Ok(Self(exponents))
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

    /// The weights `1/pₖ`.
    pub fn reciprocals(&self) -> Result<WeightVector> {
        WeightVector::new(self.0.iter().map(|p| 1.0 / p).collect())
    }
}

impl TryFrom<Vec<f64>> for ExponentVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ExponentVector> for Vec<f64> {
    fn from(p: ExponentVector) -> Self {
        p.0
    }
}

/// `M a`, applied to real and imaginary parts separately.
pub fn apply(m: &PositiveLinearMap, a: &LatticeElement) -> Result<LatticeElement> {
    if a.dim() != m.in_dim {
        return Err(Error::DimensionMismatch {
            expected: m.in_dim,
            found: a.dim(),
        });
    }
    let coords = m
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .zip(a.coords())
                .fold(Complex64::new(0.0, 0.0), |acc, (&w, z)| acc + z * w)
        })
        .collect();
    LatticeElement::new(a.field(), coords)
}

fn check_family(m: &PositiveLinearMap, fs: &[LatticeElement]) -> Result<()> {
    let first = fs.first().ok_or(Error::LengthMismatch { expected: 1, found: 0 })?;
    for f in fs {
        first.require_compatible(f)?;
    }
    if first.dim() != m.in_dim {
        return Err(Error::DimensionMismatch {
            expected: m.in_dim,
            found: first.dim(),
        });
    }
    Ok(())
}

pub(crate) fn elements_json(fs: &[LatticeElement]) -> Value {
    Value::Array(fs.iter().map(|f| json!(f.to_pairs())).collect())
}

/// Both sides of `T(△(fₖ, rₖ)) ≤ △(T|fₖ|, rₖ)`, closed forms.
fn maligranda_sides(
    m: &PositiveLinearMap,
    fs: &[LatticeElement],
    w: &WeightVector,
) -> Result<(LatticeElement, LatticeElement)> {
    check_family(m, fs)?;
    let lhs = apply(m, &weighted_geometric_mean_closed(fs, w)?)?;
    let images = fs
        .iter()
        .map(|f| apply(m, &modulus_closed(f)))
        .collect::<Result<Vec<_>>>()?;
    let rhs = weighted_geometric_mean_closed(&images, w)?;
    Ok((lhs, rhs))
}

pub(crate) fn maligranda_outcome(
    m: &PositiveLinearMap,
    fs: &[LatticeElement],
    w: &WeightVector,
    cfg: &GridConfig,
) -> Result<InstanceOutcome> {
    let (lhs, rhs) = maligranda_sides(m, fs, w)?;
    Ok(InstanceOutcome::new(json!({
        "map": m.entries,
        "fs": elements_json(fs),
        "weights": w.as_slice(),
    }))
    .with(Relation::new("inequality", lhs.max_excess_over(&rhs)?, cfg.scaled_tol(rhs.max_abs()))))
}

/// `T(△(fₖ, rₖ)) ≤ △(T(|fₖ|), rₖ)` coordinatewise, for a positive `T`.
pub fn maligranda_check(
    m: &PositiveLinearMap,
    fs: &[LatticeElement],
    w: &WeightVector,
    cfg: &GridConfig,
) -> Result<VerificationReport> {
    let mut b = ReportBuilder::new("maligranda", cfg, 0);
    b.push(maligranda_outcome(m, fs, w, cfg)?);
    Ok(b.finish())
}

pub(crate) fn homomorphism_outcome(
    m: &PositiveLinearMap,
    fs: &[LatticeElement],
    w: &WeightVector,
    cfg: &GridConfig,
) -> Result<InstanceOutcome> {
    let (lhs, rhs) = maligranda_sides(m, fs, w)?;
    let tol = cfg.scaled_tol(rhs.max_abs());
    let out = InstanceOutcome::new(json!({
        "map": m.entries,
        "fs": elements_json(fs),
        "weights": w.as_slice(),
    }))
    .with(Relation::new("inequality", lhs.max_excess_over(&rhs)?, tol));
    Ok(if m.is_lattice_homomorphism() {
        out.with(Relation::new("equality", lhs.max_abs_diff(&rhs)?, tol))
    } else {
        out.with_note("non-homomorphism maps: only the inequality is asserted; strictness is witness-based")
    })
}

/// Equality in Maligranda's bound for lattice homomorphisms. For other
/// positive maps only the inequality is asserted; the converse is shown by
/// [`strictness_witness_search`].
pub fn homomorphism_equality_check(
    m: &PositiveLinearMap,
    fs: &[LatticeElement],
    w: &WeightVector,
    cfg: &GridConfig,
) -> Result<VerificationReport> {
    let mut b = ReportBuilder::new("hom-equality", cfg, 0);
    b.push(homomorphism_outcome(m, fs, w, cfg)?);
    Ok(b.finish())
}

/// Randomly searches for operands where Maligranda's bound is strict by more
/// than the equality tolerance.
///
/// Each trial draws two or three nonnegative operands with coordinates in
/// `[0, 1]`, roughly half of them zeroed so that disjoint supports occur, and
/// random weights.
pub fn strictness_witness_search(
    m: &PositiveLinearMap,
    trials: usize,
    seed: u64,
    cfg: &GridConfig,
) -> Result<Option<(Vec<LatticeElement>, WeightVector)>> {
    if m.is_lattice_homomorphism() {
        return Err(Error::IsHomomorphism);
    }
    cfg.validate()?;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let n = rng.random_range(2..=3usize);
        let fs = (0..n)
            .map(|_| {
                let v: Vec<f64> = (0..m.in_dim)
                    .map(|_| if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..1.0) })
                    .collect();
                LatticeElement::from_reals(ScalarField::Real, &v)
            })
            .collect::<Result<Vec<_>>>()?;
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let head: f64 = weights[..n - 1].iter().sum();
        weights[n - 1] = 1.0 - head;
        let w = WeightVector::new(weights)?;
        let (lhs, rhs) = maligranda_sides(m, &fs, &w)?;
        let strict = lhs
            .coords()
            .iter()
            .zip(rhs.coords())
            .any(|(l, r)| r.re - l.re > EQUALITY_TOL);
        if strict {
            return Ok(Some((fs, w)));
        }
    }
    Ok(None)
}

/// Left side `T(Π|aₖ|)` and the two right sides of Hölder's inequality:
/// `Π T(|aₖ|^{pₖ})^{1/pₖ}` by powers and products, and `△(T(|aₖ|^{pₖ}), 1/pₖ)`.
pub fn holder_sides(
    m: &PositiveLinearMap,
    a: &[LatticeElement],
    p: &ExponentVector,
) -> Result<(LatticeElement, LatticeElement, LatticeElement)> {
    check_family(m, a)?;
    if a.len() != p.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: a.len(),
        });
    }
    let moduli: Vec<LatticeElement> = a.iter().map(modulus_closed).collect();
    let mut product = moduli[0].clone();
    for x in &moduli[1..] {
        product = multiply(&product, x)?;
    }
    let lhs = apply(m, &product)?;

    let images = moduli
        .iter()
        .zip(p.as_slice())
        .map(|(x, &pk)| apply(m, &power_closed(x, pk)?))
        .collect::<Result<Vec<_>>>()?;
    let mut form1 = power_closed(&images[0], 1.0 / p.as_slice()[0])?;
    for (img, &pk) in images.iter().zip(p.as_slice()).skip(1) {
        form1 = multiply(&form1, &power_closed(img, 1.0 / pk)?)?;
    }
    let form2 = weighted_geometric_mean_closed(&images, &p.reciprocals()?)?;
    Ok((lhs, form1, form2))
}

pub(crate) fn holder_outcome(
    m: &PositiveLinearMap,
    a: &[LatticeElement],
    p: &ExponentVector,
    cfg: &GridConfig,
) -> Result<InstanceOutcome> {
    let (lhs, form1, form2) = holder_sides(m, a, p)?;
    let tol = cfg.scaled_tol(form1.max_abs().max(form2.max_abs()));
    Ok(InstanceOutcome::new(json!({
        "map": m.entries,
        "a": elements_json(a),
        "p": p.as_slice(),
    }))
    .with(Relation::new("form1", lhs.max_excess_over(&form1)?, tol))
    .with(Relation::new("form2", lhs.max_excess_over(&form2)?, tol))
    .with(Relation::new("forms_agree", form1.max_abs_diff(&form2)?, tol)))
}

/// Hölder's inequality `T(Π|aₖ|) ≤ Π T(|aₖ|^{pₖ})^{1/pₖ}`, in the product
/// form and in the `△` form, plus agreement of the two right-hand sides.
pub fn holder_check(
    m: &PositiveLinearMap,
    a: &[LatticeElement],
    p: &ExponentVector,
    cfg: &GridConfig,
) -> Result<VerificationReport> {
    let mut b = ReportBuilder::new("holder", cfg, 0);
    b.push(holder_outcome(m, a, p, cfg)?);
    Ok(b.finish())
}

/// `aₖ = cₖ a₀` with `cₖ ≥ 0` for every k, to relative tolerance `tol`.
fn is_parallel_family(a: &[LatticeElement], tol: f64) -> bool {
    let base = &a[0];
    let nn: f64 = base.coords().iter().map(|z| z.norm_sqr()).sum();
    if nn == 0.0 {
        return a.iter().all(LatticeElement::is_zero);
    }
    a.iter().all(|x| {
        let dot: Complex64 = x.coords().iter().zip(base.coords()).map(|(y, b)| y * b.conj()).sum();
        let c = dot / nn;
        if c.re < 0.0 || c.im.abs() > tol * (1.0 + c.re) {
            return false;
        }
        x.coords()
            .iter()
            .zip(base.coords())
            .all(|(y, b)| (y - b * c.re).norm() <= tol * (1.0 + y.norm()))
    })
}

/// Both sides of Minkowski's inequality.
pub fn minkowski_sides(
    m: &PositiveLinearMap,
    a: &[LatticeElement],
    p: f64,
) -> Result<(LatticeElement, LatticeElement)> {
    check_family(m, a)?;
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let mut sum = a[0].clone();
    for x in &a[1..] {
        sum = sum.checked_add(x)?;
    }
    let lhs = power_closed(&apply(m, &power_closed(&modulus_closed(&sum), p)?)?, 1.0 / p)?;
    let mut rhs: Option<LatticeElement> = None;
    for x in a {
        let term = power_closed(&apply(m, &power_closed(&modulus_closed(x), p)?)?, 1.0 / p)?;
        rhs = Some(match rhs {
            None => term,
            Some(acc) => acc.checked_add(&term)?,
        });
    }
    Ok((lhs, rhs.expect("family is nonempty")))
}

pub(crate) fn minkowski_outcome(
    m: &PositiveLinearMap,
    a: &[LatticeElement],
    p: f64,
    cfg: &GridConfig,
) -> Result<InstanceOutcome> {
    let (lhs, rhs) = minkowski_sides(m, a, p)?;
    let tol = cfg.scaled_tol(rhs.max_abs());
    let out = InstanceOutcome::new(json!({
        "map": m.entries,
        "a": elements_json(a),
        "p": p,
    }))
    .with(Relation::new("inequality", lhs.max_excess_over(&rhs)?, tol));
    Ok(if is_parallel_family(a, cfg.abs_tol) {
        out.with(Relation::new("parallel_equality", lhs.max_abs_diff(&rhs)?, tol))
    } else {
        out
    })
}

/// Minkowski's inequality `T(|Σaₖ|^p)^{1/p} ≤ Σ T(|aₖ|^p)^{1/p}`. When the
/// summands are nonnegative multiples of one element, equality is asserted too.
pub fn minkowski_check(
    m: &PositiveLinearMap,
    a: &[LatticeElement],
    p: f64,
    cfg: &GridConfig,
) -> Result<VerificationReport> {
    let mut b = ReportBuilder::new("minkowski", cfg, 0);
    b.push(minkowski_outcome(m, a, p, cfg)?);
    Ok(b.finish())
}
