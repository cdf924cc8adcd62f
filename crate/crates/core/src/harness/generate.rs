//! Seeded random operands and instance files.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::lattice::{LatticeElement, ScalarField};
use crate::maps::{ExponentVector, PositiveLinearMap};
use crate::power::WeightVector;
use crate::rng::trial_rng;
use crate::sesquilinear::SesquilinearForm;

use super::instance::{CheckParams, CheckSpec, FormSpec, InstanceFile, Operands};
use super::HarnessError;

pub fn random_scalar<R: Rng>(rng: &mut R, field: ScalarField, mag: f64) -> Complex64 {
    let re = rng.random_range(-mag..=mag);
    match field {
        ScalarField::Real => Complex64::new(re, 0.0),
        ScalarField::Complex => Complex64::new(re, rng.random_range(-mag..=mag)),
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, field: ScalarField, dim: usize, mag: f64) -> Vec<Complex64> {
    (0..dim).map(|_| random_scalar(rng, field, mag)).collect()
}

/// Element with coordinates uniform in `[-mag, mag]` (both parts over `C`).
pub fn random_element<R: Rng>(rng: &mut R, field: ScalarField, dim: usize, mag: f64) -> LatticeElement {
    LatticeElement::new(field, random_vector(rng, field, dim, mag)).expect("finite coordinates")
}

/// Positive-cone element with coordinates in `[0, hi]`; each coordinate is
/// exactly zero with probability `zero_prob`.
pub fn random_positive<R: Rng>(rng: &mut R, field: ScalarField, dim: usize, hi: f64, zero_prob: f64) -> LatticeElement {
    let v: Vec<f64> = (0..dim)
        .map(|_| if rng.random_bool(zero_prob) { 0.0 } else { rng.random_range(0.0..=hi) })
        .collect();
    LatticeElement::from_reals(field, &v).expect("finite coordinates")
}

/// `Bᴴ B` for each codomain coordinate, with `B` of random rank `1..=m`.
pub fn random_psd_form<R: Rng>(rng: &mut R, field: ScalarField, m: usize, n: usize) -> SesquilinearForm {
    let mats = (0..n)
        .map(|_| {
            let k = rng.random_range(1..=m);
            let b = DMatrix::from_fn(k, m, |_, _| random_scalar(rng, field, 1.0));
            let a = b.adjoint() * &b;
            // copy the upper triangle so the family is Hermitian to the bit
            DMatrix::from_fn(m, m, |p, q| match p.cmp(&q) {
                std::cmp::Ordering::Less => a[(p, q)],
                std::cmp::Ordering::Equal => Complex64::new(a[(p, p)].re, 0.0),
                std::cmp::Ordering::Greater => a[(q, p)].conj(),
            })
        })
        .collect();
    SesquilinearForm::new(field, mats).expect("generated form is well formed")
}

/// Nonnegative `out × inp` matrix; entries are zero with probability 0.3.
pub fn random_positive_map<R: Rng>(rng: &mut R, out: usize, inp: usize) -> PositiveLinearMap {
    let rows = (0..out)
        .map(|_| {
            (0..inp)
                .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..2.0) })
                .collect()
        })
        .collect();
    PositiveLinearMap::new(rows).expect("nonnegative entries")
}

/// Lattice homomorphism: each row has one positive entry, or is zero with
/// probability 0.1.
pub fn random_lattice_hom<R: Rng>(rng: &mut R, out: usize, inp: usize) -> PositiveLinearMap {
    let rows = (0..out)
        .map(|_| {
            let mut row = vec![0.0; inp];
            if !rng.random_bool(0.1) {
                row[rng.random_range(0..inp)] = rng.random_range(0.1..3.0);
            }
            row
        })
        .collect();
    PositiveLinearMap::new(rows).expect("nonnegative entries")
}

/// Positive map failing the homomorphism predicate: one row is forced to
/// have at least two positive entries.
pub fn random_mixing_map<R: Rng>(rng: &mut R, out: usize, inp: usize) -> PositiveLinearMap {
    assert!(inp >= 2, "a mixing row needs two columns");
    let mut rows: Vec<Vec<f64>> = random_positive_map(rng, out, inp).entries().to_vec();
    let row = rng.random_range(0..out);
    let first = rng.random_range(0..inp);
    let second = (first + rng.random_range(1..inp)) % inp;
    rows[row][first] = rng.random_range(0.1..2.0);
    rows[row][second] = rng.random_range(0.1..2.0);
    PositiveLinearMap::new(rows).expect("nonnegative entries")
}

/// Random weights in `(0, 1)` summing to 1 (the last absorbs rounding).
pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> WeightVector {
    if n == 1 {
        return WeightVector::new(vec![1.0]).expect("singleton weight");
    }
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let head: f64 = w[..n - 1].iter().sum();
    w[n - 1] = 1.0 - head;
    WeightVector::new(w).expect("normalized weights")
}

/// Conjugate exponents `pₖ = 1/rₖ` from random weights.
pub fn random_exponents<R: Rng>(rng: &mut R, n: usize) -> ExponentVector {
    let w = random_weights(rng, n.max(2));
    ExponentVector::new(w.as_slice().iter().map(|r| 1.0 / r).collect()).expect("conjugate exponents")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    PsdForm,
    PositiveMap,
    LatticeHom,
    PositiveElements,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 4] = [
        GeneratorKind::PsdForm,
        GeneratorKind::PositiveMap,
        GeneratorKind::LatticeHom,
        GeneratorKind::PositiveElements,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::PsdForm => "psd-form",
            GeneratorKind::PositiveMap => "positive-map",
            GeneratorKind::LatticeHom => "lattice-hom",
            GeneratorKind::PositiveElements => "positive-elements",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::UnknownKind(s.to_owned()))
    }
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

fn check(suite: &str, params: CheckParams, operands: Operands) -> CheckSpec {
    CheckSpec {
        suite: suite.to_owned(),
        params,
        operands,
    }
}

/// Random instance file of the given kind.
///
/// `dims = (m, n)` means: `psd-form`, domain `m` and codomain `n`;
/// `positive-map` and `lattice-hom`, an `n × m` map acting on `Kᵐ`;
/// `positive-elements`, `n` elements of dimension `m`.
pub fn generate_instance(
    kind: GeneratorKind,
    dims: (usize, usize),
    field: ScalarField,
    seed: u64,
) -> Result<InstanceFile, HarnessError> {
    let (m, n) = dims;
    if m == 0 || n == 0 {
        return Err(HarnessError::InvalidDims(format!("{m},{n}: both must be positive")));
    }
    let mut rng = trial_rng(seed, 0);
    let mut file = InstanceFile {
        field,
        elements: BTreeMap::new(),
        forms: BTreeMap::new(),
        maps: BTreeMap::new(),
        checks: Vec::new(),
    };
    match kind {
        GeneratorKind::PsdForm => {
            let form = random_psd_form(&mut rng, field, m, n);
            file.forms.insert("T".into(), FormSpec::from_form(&form));
            file.elements.insert("u".into(), pairs(&random_vector(&mut rng, field, m, 1.0)));
            file.elements.insert("v".into(), pairs(&random_vector(&mut rng, field, m, 1.0)));
            let ops = Operands {
                form: Some("T".into()),
                u: Some("u".into()),
                v: Some("v".into()),
                ..Default::default()
            };
            file.checks.push(check("cauchy-schwarz", CheckParams::default(), ops.clone()));
            file.checks.push(check("cs-corollary", CheckParams::default(), ops.clone()));
            let params = CheckParams {
                probe_count: Some(1000),
                ..Default::default()
            };
            file.checks.push(check("cs-equality", params, ops));
        }
        GeneratorKind::PositiveMap | GeneratorKind::LatticeHom => {
            let map = if kind == GeneratorKind::PositiveMap {
                random_positive_map(&mut rng, n, m)
            } else {
                random_lattice_hom(&mut rng, n, m)
            };
            file.maps.insert("M".into(), map.entries().to_vec());
            for name in names("f", 2) {
                file.elements.insert(name, random_element(&mut rng, field, m, 10.0).to_pairs());
            }
            let ops = Operands {
                map: Some("M".into()),
                elements: Some(names("f", 2)),
                ..Default::default()
            };
            let weights = CheckParams {
                weights: Some(random_weights(&mut rng, 2).into()),
                ..Default::default()
            };
            file.checks.push(check("maligranda", weights.clone(), ops.clone()));
            file.checks.push(check("hom-equality", weights, ops.clone()));
            if kind == GeneratorKind::PositiveMap {
                let exps = CheckParams {
                    exponents: Some(random_exponents(&mut rng, 2).into()),
                    ..Default::default()
                };
                file.checks.push(check("holder", exps, ops.clone()));
                let p = CheckParams {
                    p: Some(2.0),
                    ..Default::default()
                };
                file.checks.push(check("minkowski", p, ops));
            }
        }
        GeneratorKind::PositiveElements => {
            for name in names("a", n) {
                file.elements.insert(name, random_positive(&mut rng, field, m, 100.0, 0.0).to_pairs());
            }
            let all = names("a", n);
            let first = Operands {
                elements: Some(vec![all[0].clone()]),
                ..Default::default()
            };
            if n >= 2 {
                let pair = Operands {
                    elements: Some(all[..2].to_vec()),
                    ..Default::default()
                };
                file.checks.push(check("geometric-mean", CheckParams::default(), pair));
            }
            let weights = CheckParams {
                weights: Some(random_weights(&mut rng, n).into()),
                ..Default::default()
            };
            let every = Operands {
                elements: Some(all),
                ..Default::default()
            };
            file.checks.push(check("weighted-gm", weights, every));
            let r = CheckParams {
                r: Some(2.5),
                ..Default::default()
            };
            file.checks.push(check("powers", r, first.clone()));
            let pq = CheckParams {
                p: Some(std::f64::consts::PI),
                q: Some(std::f64::consts::E),
                ..Default::default()
            };
            file.checks.push(check("power-rules", pq, first));
        }
    }
    Ok(file)
}
