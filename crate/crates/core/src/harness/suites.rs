//! Seeded property suites.
//!
//! Trial `t` of a suite draws its operands from its own random stream, so a
//! report depends only on `(suite, cfg, trials, seed)`. Trials run on the
//! rayon pool and are merged in trial order.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::GridConfig;
use crate::error::Result;
use crate::lattice::{LatticeElement, ScalarField};
use crate::maps::{
    elements_json, holder_outcome, holder_sides, strictness_witness_search, ExponentVector, PositiveLinearMap,
};
use crate::report::{InstanceOutcome, Relation, ReportBuilder, VerificationReport};
use crate::rng::trial_rng;
use crate::sesquilinear::SesquilinearForm;

use super::checks::{cs_equality_check, Check};
use super::generate::{
    random_element, random_exponents, random_lattice_hom, random_mixing_map, random_positive, random_positive_map,
    random_psd_form, random_vector, random_weights,
};
use super::HarnessError;

/// Default number of trials per suite.
pub const DEFAULT_TRIALS: usize = 1000;

/// Exponents drawn by the power suites.
pub const EXPONENTS: [f64; 5] = [0.5, 1.5, 2.5, std::f64::consts::PI, std::f64::consts::E];

/// Exponents drawn by the Minkowski suite.
pub const MINKOWSKI_EXPONENTS: [f64; 4] = [1.5, 2.0, 3.0, std::f64::consts::PI];

/// Smallest gap required of constructed strict Cauchy–Schwarz instances.
pub const STRICT_GAP_MARGIN: f64 = 0.1;

/// Trial budget of the strictness witness search inside `hom-equality`.
pub const WITNESS_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    LatticeAxioms,
    Modulus,
    SquareMean,
    GeometricMean,
    WeightedGm,
    Powers,
    PowerRules,
    CauchySchwarz,
    CsCorollary,
    CsEquality,
    Maligranda,
    HomEquality,
    Holder,
    Minkowski,
    All,
}

impl Suite {
    /// Every concrete suite, in the order `all` runs them.
    pub const CHECKS: [Suite; 14] = [
        Suite::LatticeAxioms,
        Suite::Modulus,
        Suite::SquareMean,
        Suite::GeometricMean,
        Suite::WeightedGm,
        Suite::Powers,
        Suite::PowerRules,
        Suite::CauchySchwarz,
        Suite::CsCorollary,
        Suite::CsEquality,
        Suite::Maligranda,
        Suite::HomEquality,
        Suite::Holder,
        Suite::Minkowski,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LatticeAxioms => "lattice-axioms",
            Suite::Modulus => "modulus",
            Suite::SquareMean => "square-mean",
            Suite::GeometricMean => "geometric-mean",
            Suite::WeightedGm => "weighted-gm",
            Suite::Powers => "powers",
            Suite::PowerRules => "power-rules",
            Suite::CauchySchwarz => "cauchy-schwarz",
            Suite::CsCorollary => "cs-corollary",
            Suite::CsEquality => "cs-equality",
            Suite::Maligranda => "maligranda",
            Suite::HomEquality => "hom-equality",
            Suite::Holder => "holder",
            Suite::Minkowski => "minkowski",
            Suite::All => "all",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::CHECKS.iter().map(|s| s.name()).chain(["all"]).collect()
    }

    fn stream_base(self) -> u64 {
        let idx = Self::CHECKS.iter().position(|&s| s == self).unwrap_or(Self::CHECKS.len());
        (idx as u64 + 1) << 32
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::CHECKS
            .iter()
            .copied()
            .chain([Suite::All])
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::UnknownSuite(s.to_owned()))
    }
}

/// Runs `trials` seeded random instances of `suite` (each concrete suite
/// with the same `trials` and `seed` when `suite` is `all`).
pub fn run_suite(suite: Suite, cfg: &GridConfig, trials: usize, seed: u64) -> Result<VerificationReport> {
    cfg.validate()?;
    if suite == Suite::All {
        let children = Suite::CHECKS
            .iter()
            .map(|&s| run_suite(s, cfg, trials, seed))
            .collect::<Result<Vec<_>>>()?;
        return Ok(VerificationReport::aggregate("all", cfg, seed, children));
    }
    let outcomes: Vec<InstanceOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, suite.stream_base() | t as u64);
            trial(suite, &mut rng, t, cfg)
        })
        .collect::<Result<_>>()?;
    let mut b = ReportBuilder::new(suite.name(), cfg, seed);
    for o in outcomes {
        b.push(o);
    }
    if suite == Suite::HomEquality {
        b.note("the converse for non-homomorphisms is witness-based: a finite search exhibits strictness but cannot certify it for all operands");
    }
    Ok(b.finish())
}

fn field_for(t: usize) -> ScalarField {
    if t.is_multiple_of(2) {
        ScalarField::Real
    } else {
        ScalarField::Complex
    }
}

fn pick(rng: &mut ChaCha8Rng, xs: &[f64]) -> f64 {
    *xs.choose(rng).expect("nonempty choice")
}

/// Real element whose coordinates are small integers with probability 0.3,
/// so that ties between operands occur.
fn axiom_element(rng: &mut ChaCha8Rng, dim: usize) -> LatticeElement {
    if rng.random_bool(0.3) {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-3..=3) as f64).collect();
        LatticeElement::real(&v).expect("finite")
    } else {
        random_element(rng, ScalarField::Real, dim, 100.0)
    }
}

fn trial(suite: Suite, rng: &mut ChaCha8Rng, t: usize, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let field = field_for(t);
    match suite {
        Suite::LatticeAxioms => {
            let dim = rng.random_range(1..=8);
            Check::LatticeAxioms {
                f: axiom_element(rng, dim),
                g: axiom_element(rng, dim),
                h: axiom_element(rng, dim),
            }
            .evaluate(cfg, 0)
        }
        Suite::Modulus => {
            let dim = rng.random_range(1..=8);
            Check::Modulus {
                f: random_element(rng, field, dim, 100.0),
            }
            .evaluate(cfg, 0)
        }
        Suite::SquareMean => {
            let dim = rng.random_range(1..=8);
            Check::SquareMean {
                f: random_element(rng, ScalarField::Real, dim, 100.0),
                g: random_element(rng, ScalarField::Real, dim, 100.0),
            }
            .evaluate(cfg, 0)
        }
        Suite::GeometricMean => {
            let dim = rng.random_range(1..=8);
            Check::GeometricMean {
                f: random_positive(rng, ScalarField::Real, dim, 100.0, 0.05),
                g: random_positive(rng, ScalarField::Real, dim, 100.0, 0.05),
            }
            .evaluate(cfg, 0)
        }
        Suite::WeightedGm => {
            let n = rng.random_range(2..=4);
            let dim = rng.random_range(1..=6);
            let fs = (0..n).map(|_| random_element(rng, field, dim, 100.0)).collect();
            let w = random_weights(rng, n);
            Check::WeightedGm { fs, w }.evaluate(cfg, 0)
        }
        Suite::Powers => {
            let dim = rng.random_range(1..=8);
            let a = random_positive(rng, ScalarField::Real, dim, 100.0, 0.05);
            let r = pick(rng, &EXPONENTS);
            Check::Powers { a, r }.evaluate(cfg, 0)
        }
        Suite::PowerRules => {
            let dim = rng.random_range(1..=8);
            let a = random_positive(rng, ScalarField::Real, dim, 100.0, 0.05);
            let p = pick(rng, &EXPONENTS);
            let q = pick(rng, &EXPONENTS);
            Check::PowerRules { a, p, q }.evaluate(cfg, 0)
        }
        Suite::CauchySchwarz | Suite::CsCorollary => {
            let m = rng.random_range(1..=6);
            let n = rng.random_range(1..=8);
            let form = random_psd_form(rng, field, m, n);
            let u = random_vector(rng, field, m, 1.0);
            let v = random_vector(rng, field, m, 1.0);
            if suite == Suite::CauchySchwarz {
                Check::CauchySchwarz {
                    form,
                    u,
                    v,
                    expect_equality: None,
                }
                .evaluate(cfg, 0)
            } else {
                Check::CsCorollary { form, u, v }.evaluate(cfg, 0)
            }
        }
        Suite::CsEquality => cs_equality_trial(rng, t, cfg),
        Suite::Maligranda => {
            let (out, inp) = (rng.random_range(1..=6), rng.random_range(1..=6));
            let map = random_positive_map(rng, out, inp);
            let n = rng.random_range(1..=4);
            let fs = (0..n).map(|_| random_element(rng, field, inp, 10.0)).collect();
            let w = random_weights(rng, n);
            Check::Maligranda { map, fs, w }.evaluate(cfg, 0)
        }
        Suite::HomEquality => hom_equality_trial(rng, t, cfg),
        Suite::Holder => holder_trial(rng, t, cfg),
        Suite::Minkowski => minkowski_trial(rng, t, cfg),
        Suite::All => unreachable!("`all` is expanded by run_suite"),
    }
}

/// Random scalar with modulus in `[lo, hi]` and random sign or phase.
fn scalar_with_modulus(rng: &mut ChaCha8Rng, field: ScalarField, lo: f64, hi: f64) -> Complex64 {
    let r = rng.random_range(lo..=hi);
    match field {
        ScalarField::Real => Complex64::new(if rng.random_bool(0.5) { r } else { -r }, 0.0),
        ScalarField::Complex => Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU)),
    }
}

/// Equality instance: `A_j = d_j e_j e_jᵀ` and `v_j = α_j u_j`, so every
/// coordinate sees parallel data while `u`, `v` are generally independent.
pub fn equality_instance(rng: &mut ChaCha8Rng, field: ScalarField) -> (SesquilinearForm, Vec<Complex64>, Vec<Complex64>) {
    let m = rng.random_range(1..=6);
    let mats = (0..m)
        .map(|j| {
            let d = rng.random_range(0.5..=2.0);
            DMatrix::from_fn(m, m, |p, q| Complex64::new(if p == j && q == j { d } else { 0.0 }, 0.0))
        })
        .collect();
    let form = SesquilinearForm::new(field, mats).expect("diagonal family");
    let u: Vec<Complex64> = (0..m).map(|_| scalar_with_modulus(rng, field, 0.5, 2.0)).collect();
    let v = u.iter().map(|x| x * scalar_with_modulus(rng, field, 0.2, 5.0)).collect();
    (form, u, v)
}

/// Strict instance: positive diagonal forms and `u`, `v` with disjoint
/// nonempty supports, so `T(u, v) = 0` while `T(u, u)`, `T(v, v) > 0`.
pub fn strict_instance(rng: &mut ChaCha8Rng, field: ScalarField) -> (SesquilinearForm, Vec<Complex64>, Vec<Complex64>) {
    let m = rng.random_range(2..=6);
    let n = rng.random_range(1..=8);
    let diags: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random_range(0.5..=2.0)).collect()).collect();
    let form = SesquilinearForm::diagonal(field, &diags).expect("diagonal family");
    // coordinate 0 goes to u, coordinate 1 to v, the rest at random
    let in_u: Vec<bool> = (0..m).map(|p| p == 0 || (p > 1 && rng.random_bool(0.5))).collect();
    let zero = Complex64::new(0.0, 0.0);
    let mut u = vec![zero; m];
    let mut v = vec![zero; m];
    for p in 0..m {
        let z = scalar_with_modulus(rng, field, 0.5, 2.0);
        if in_u[p] {
            u[p] = z;
        } else {
            v[p] = z;
        }
    }
    (form, u, v)
}

fn cs_equality_trial(rng: &mut ChaCha8Rng, t: usize, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let field = field_for(t / 2);
    let expect = t.is_multiple_of(2);
    let (form, u, v) = if expect {
        equality_instance(rng, field)
    } else {
        strict_instance(rng, field)
    };
    let seed: u64 = rng.random();
    let (out, rep) = cs_equality_check(&form, &u, &v, 1000, Some(expect), None, seed, cfg)?;
    Ok(if expect {
        out
    } else {
        let min_gap = rep.gap.re().into_iter().fold(f64::INFINITY, f64::min);
        out.with(Relation::new("strict_margin", (STRICT_GAP_MARGIN - min_gap).max(0.0), 0.0))
    })
}

fn hom_equality_trial(rng: &mut ChaCha8Rng, t: usize, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let out = rng.random_range(1..=6);
    if t % 5 == 4 {
        let inp = rng.random_range(2..=6);
        let map = random_mixing_map(rng, out, inp);
        let seed: u64 = rng.random();
        let found = strictness_witness_search(&map, WITNESS_TRIALS, seed, cfg)?;
        let witness = match &found {
            Some((fs, w)) => json!({ "fs": elements_json(fs), "weights": w.as_slice() }),
            None => json!(null),
        };
        return Ok(InstanceOutcome::new(json!({ "map": map.entries(), "strict_witness": witness }))
            .with(Relation::flag("strict_witness", found.is_some())));
    }
    let inp = rng.random_range(1..=6);
    let map = random_lattice_hom(rng, out, inp);
    let n = rng.random_range(1..=4);
    let fs = (0..n).map(|_| random_element(rng, field_for(t), inp, 10.0)).collect();
    let w = random_weights(rng, n);
    Check::HomEquality { map, fs, w }.evaluate(cfg, 0)
}

/// `sqrt(Σ|a_i|²)·sqrt(Σ|b_i|²)`, summed directly.
fn classical_cs_bound(a: &LatticeElement, b: &LatticeElement) -> f64 {
    let na: f64 = a.coords().iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.coords().iter().map(|z| z.norm_sqr()).sum();
    na.sqrt() * nb.sqrt()
}

fn holder_trial(rng: &mut ChaCha8Rng, t: usize, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let field = field_for(t);
    if t.is_multiple_of(10) {
        // the summation map with p = (2, 2) is the discrete Cauchy–Schwarz inequality
        let dim = rng.random_range(1..=6);
        let a = [random_element(rng, field, dim, 2.0), random_element(rng, field, dim, 2.0)];
        let map = PositiveLinearMap::summation(dim)?;
        let p = ExponentVector::new(vec![2.0, 2.0])?;
        let bound = classical_cs_bound(&a[0], &a[1]);
        let (lhs, form1, _) = holder_sides(&map, &a, &p)?;
        let tol = cfg.scaled_tol(bound);
        return Ok(holder_outcome(&map, &a, &p, cfg)?
            .with(Relation::new("classical_cs", (lhs.re()[0] - bound).max(0.0), tol))
            .with(Relation::new("classical_cs_bound", (form1.re()[0] - bound).abs(), tol)));
    }
    let n = rng.random_range(2..=3);
    let (out, inp) = (rng.random_range(1..=6), rng.random_range(1..=6));
    let map = random_positive_map(rng, out, inp);
    let a: Vec<LatticeElement> = (0..n).map(|_| random_element(rng, field, inp, 2.0)).collect();
    let p = random_exponents(rng, n);
    holder_outcome(&map, &a, &p, cfg)
}

fn minkowski_trial(rng: &mut ChaCha8Rng, t: usize, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let field = field_for(t);
    let n = rng.random_range(2..=4);
    let (out, inp) = (rng.random_range(1..=6), rng.random_range(1..=6));
    let map = random_positive_map(rng, out, inp);
    let p = pick(rng, &MINKOWSKI_EXPONENTS);
    let a: Vec<LatticeElement> = if t.is_multiple_of(4) {
        let base = random_element(rng, field, inp, 10.0);
        (0..n)
            .map(|_| base.scale(rng.random_range(0.1..3.0)))
            .collect::<Result<_>>()?
    } else {
        (0..n).map(|_| random_element(rng, field, inp, 10.0)).collect()
    };
    Check::Minkowski { map, a, p }.evaluate(cfg, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::names() {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(HarnessError::UnknownSuite(_))));
    }

    #[test]
    fn zero_trials_is_empty() {
        let r = run_suite(Suite::CauchySchwarz, &GridConfig::default(), 0, 1).unwrap();
        assert_eq!((r.instances, r.passes), (0, 0));
    }

    #[test]
    fn constructed_instances_classify() {
        let cfg = GridConfig::default();
        let r = run_suite(Suite::CsEquality, &cfg, 40, 5).unwrap();
        assert!(r.all_passed(), "{r}");
    }

    #[test]
    fn suites_are_deterministic() {
        let cfg = GridConfig::default();
        for s in [Suite::WeightedGm, Suite::HomEquality, Suite::Minkowski] {
            let a = run_suite(s, &cfg, 20, 9).unwrap();
            let b = run_suite(s, &cfg, 20, 9).unwrap();
            assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }
}
