//! The JSON instance format.
//!
//! ```json
//! {
//!   "field": "complex",
//!   "elements": { "u": [[1, 0], [0, 0]], "v": [[0, 0], [1, 0]] },
//!   "forms": { "T": { "hermitian": true, "matrices": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]] } },
//!   "maps": { "M": [[1, 1]] },
//!   "checks": [ { "suite": "cauchy-schwarz", "operands": { "form": "T", "u": "u", "v": "v" } } ]
//! }
//! ```
//!
//! Every scalar is an `[re, im]` pair, also over `R` (where `im` must be 0).
//! Shape errors are parse errors; everything else found while resolving
//! names, dimensions and invariants is a validation error. Both carry a
//! JSON-pointer path into the document.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::GridConfig;
use crate::error::Error;
use crate::lattice::{LatticeElement, ScalarField};
use crate::maps::{ExponentVector, PositiveLinearMap};
use crate::power::{ExponentDecomposition, WeightVector};
use crate::report::{ReportBuilder, VerificationReport};
use crate::sesquilinear::SesquilinearForm;

use super::checks::{Check, DEFAULT_PROBE_COUNT};
use super::suites::Suite;
use super::{pointer_token, HarnessError};

/// The bundled two-coordinate instance where Cauchy–Schwarz equality holds
/// but `u`, `v` admit no classical linear-dependence witness.
pub const BUNDLED_EXAMPLE: &str = include_str!("../../data/example_noclaeqco.json");

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub field: ScalarField,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub elements: BTreeMap<String, Vec<Pair>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub forms: BTreeMap<String, FormSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    /// Verified on load when set.
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub hermitian: bool,
    /// One square matrix per codomain coordinate, row-major.
    pub matrices: Vec<Vec<Vec<Pair>>>,
}

impl FormSpec {
    pub fn from_form(form: &SesquilinearForm) -> Self {
        let matrices = form
            .matrices()
            .iter()
            .map(|a| {
                (0..a.nrows())
                    .map(|p| (0..a.ncols()).map(|q| [a[(p, q)].re, a[(p, q)].im]).collect())
                    .collect()
            })
            .collect();
        Self {
            hermitian: true,
            matrices,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub suite: String,
    #[serde(default, skip_serializing_if = "CheckParams::is_empty")]
    pub params: CheckParams,
    #[serde(default)]
    pub operands: Operands,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_equality: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_witness: Option<bool>,
}

impl CheckParams {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Operands {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
}

impl InstanceFile {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

/// A validated instance: the file plus its resolved checks.
#[derive(Debug, Clone)]
pub struct Instance {
    pub file: InstanceFile,
    pub checks: Vec<Check>,
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str, cfg: &GridConfig) -> Result<Instance, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: InstanceFile = serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Parse {
        pointer: path_to_pointer(e.path()),
        message: e.inner().to_string(),
    })?;
    validate(file, cfg)
}

pub fn load_instance(path: &Path, cfg: &GridConfig) -> Result<Instance, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_instance(&text, cfg)
}

pub fn save_instance(file: &InstanceFile, path: &Path) -> Result<(), HarnessError> {
    let mut text = file.to_json_pretty();
    text.push('\n');
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_owned(),
        source,
    })
}

fn path_to_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", pointer_token(key))),
            Segment::Enum { variant } => out.push_str(&format!("/{}", pointer_token(variant))),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

struct Resolver<'a> {
    file: &'a InstanceFile,
    cfg: &'a GridConfig,
    elements: BTreeMap<String, LatticeElement>,
    forms: BTreeMap<String, SesquilinearForm>,
    maps: BTreeMap<String, PositiveLinearMap>,
}

fn validate(file: InstanceFile, cfg: &GridConfig) -> Result<Instance, HarnessError> {
    cfg.validate()?;
    let mut r = Resolver {
        file: &file,
        cfg,
        elements: BTreeMap::new(),
        forms: BTreeMap::new(),
        maps: BTreeMap::new(),
    };
    r.resolve_elements()?;
    r.resolve_forms()?;
    r.resolve_maps()?;
    let checks = file
        .checks
        .iter()
        .enumerate()
        .map(|(i, c)| r.resolve_check(i, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Instance { file, checks })
}

impl Resolver<'_> {
    fn resolve_elements(&mut self) -> Result<(), HarnessError> {
        for (name, coords) in &self.file.elements {
            let at = format!("/elements/{}", pointer_token(name));
            let zs = coords.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            let el = LatticeElement::new(self.file.field, zs).map_err(|e| match e {
                Error::ImaginaryInRealField(i) => {
                    HarnessError::invalid(format!("{at}/{i}/1"), "nonzero imaginary part in a real instance")
                }
                Error::NonFinite(i) => HarnessError::invalid(format!("{at}/{i}"), "non-finite coordinate"),
                other => HarnessError::invalid(at.clone(), other.to_string()),
            })?;
            self.elements.insert(name.clone(), el);
        }
        Ok(())
    }

    fn resolve_forms(&mut self) -> Result<(), HarnessError> {
        for (name, spec) in &self.file.forms {
            let at = format!("/forms/{}/matrices", pointer_token(name));
            if spec.matrices.is_empty() {
                return Err(HarnessError::invalid(at, "a form needs at least one matrix"));
            }
            let m = spec.matrices[0].len();
            let mut mats = Vec::with_capacity(spec.matrices.len());
            for (j, a) in spec.matrices.iter().enumerate() {
                if a.len() != m || m == 0 {
                    return Err(HarnessError::invalid(
                        format!("{at}/{j}"),
                        format!("expected {m} rows, found {}", a.len()),
                    ));
                }
                for (p, row) in a.iter().enumerate() {
                    if row.len() != m {
                        return Err(HarnessError::invalid(
                            format!("{at}/{j}/{p}"),
                            format!("expected {m} entries, found {}", row.len()),
                        ));
                    }
                    for (q, &[re, im]) in row.iter().enumerate() {
                        if !(re.is_finite() && im.is_finite()) {
                            return Err(HarnessError::invalid(format!("{at}/{j}/{p}/{q}"), "non-finite entry"));
                        }
                        if self.file.field == ScalarField::Real && im != 0.0 {
                            return Err(HarnessError::invalid(
                                format!("{at}/{j}/{p}/{q}/1"),
                                "nonzero imaginary part in a real instance",
                            ));
                        }
                    }
                }
                mats.push(DMatrix::from_fn(m, m, |p, q| Complex64::new(a[p][q][0], a[p][q][1])));
            }
            let form = SesquilinearForm::new(self.file.field, mats)
                .map_err(|e| HarnessError::invalid(at.clone(), e.to_string()))?;
            if spec.hermitian {
                let tol = self.cfg.scaled_tol(form.max_entry());
                for (j, a) in form.matrices().iter().enumerate() {
                    let defect = (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                    if defect > tol {
                        return Err(HarnessError::invalid(
                            format!("{at}/{j}"),
                            format!("matrix is tagged Hermitian but differs from its adjoint by {defect:e}"),
                        ));
                    }
                }
            }
            self.forms.insert(name.clone(), form);
        }
        Ok(())
    }

    fn resolve_maps(&mut self) -> Result<(), HarnessError> {
        for (name, rows) in &self.file.maps {
            let at = format!("/maps/{}", pointer_token(name));
            let map = PositiveLinearMap::new(rows.clone()).map_err(|e| match e {
                Error::NegativeEntry { row, col } => {
                    HarnessError::invalid(format!("{at}/{row}/{col}"), "negative entry in a positive map")
                }
                other => HarnessError::invalid(at.clone(), other.to_string()),
            })?;
            self.maps.insert(name.clone(), map);
        }
        Ok(())
    }

    fn resolve_check(&self, i: usize, spec: &CheckSpec) -> Result<Check, HarnessError> {
        let at = format!("/checks/{i}");
        let suite: Suite = spec
            .suite
            .parse()
            .map_err(|_| HarnessError::invalid(format!("{at}/suite"), format!("unknown suite `{}`", spec.suite)))?;
        let c = CheckCtx {
            at: &at,
            r: self,
            spec,
        };
        let check = match suite {
            Suite::All => return Err(HarnessError::invalid(format!("{at}/suite"), "`all` is not a single check")),
            Suite::LatticeAxioms => {
                let fs = c.elements(1, None)?;
                c.require_real()?;
                let pick = |k: usize| fs[k % fs.len()].clone();
                Check::LatticeAxioms {
                    f: pick(0),
                    g: pick(1),
                    h: pick(2),
                }
            }
            Suite::Modulus => {
                let fs = c.elements(1, Some(1))?;
                Check::Modulus { f: fs[0].clone() }
            }
            Suite::SquareMean => {
                c.require_real()?;
                let fs = c.elements(2, Some(2))?;
                Check::SquareMean {
                    f: fs[0].clone(),
                    g: fs[1].clone(),
                }
            }
            Suite::GeometricMean => {
                let fs = c.positive_elements(2, Some(2))?;
                Check::GeometricMean {
                    f: fs[0].clone(),
                    g: fs[1].clone(),
                }
            }
            Suite::WeightedGm => {
                let fs = c.elements(1, None)?;
                let w = c.weights(fs.len())?;
                Check::WeightedGm { fs, w }
            }
            Suite::Powers => {
                let fs = c.positive_elements(1, Some(1))?;
                let r = c.exponent("r")?;
                Check::Powers { a: fs[0].clone(), r }
            }
            Suite::PowerRules => {
                let fs = c.positive_elements(1, Some(1))?;
                Check::PowerRules {
                    a: fs[0].clone(),
                    p: c.exponent("p")?,
                    q: c.exponent("q")?,
                }
            }
            Suite::CauchySchwarz | Suite::CsCorollary | Suite::CsEquality => {
                let (form, u, v) = c.form_pair()?;
                match suite {
                    Suite::CauchySchwarz => Check::CauchySchwarz {
                        form,
                        u,
                        v,
                        expect_equality: spec.params.expect_equality,
                    },
                    Suite::CsCorollary => Check::CsCorollary { form, u, v },
                    _ => Check::CsEquality {
                        form,
                        u,
                        v,
                        probe_count: spec.params.probe_count.unwrap_or(DEFAULT_PROBE_COUNT),
                        expect_equality: spec.params.expect_equality,
                        expect_witness: spec.params.expect_witness,
                    },
                }
            }
            Suite::Maligranda | Suite::HomEquality => {
                let map = c.map()?;
                let fs = c.elements(1, None)?;
                c.check_map_dim(&map, &fs)?;
                let w = c.weights(fs.len())?;
                if suite == Suite::Maligranda {
                    Check::Maligranda { map, fs, w }
                } else {
                    Check::HomEquality { map, fs, w }
                }
            }
            Suite::Holder => {
                let map = c.map()?;
                let a = c.elements(2, None)?;
                c.check_map_dim(&map, &a)?;
                let raw = spec
                    .params
                    .exponents
                    .clone()
                    .ok_or_else(|| HarnessError::invalid(format!("{at}/params"), "missing `exponents`"))?;
                let p = ExponentVector::new(raw)
                    .map_err(|e| HarnessError::invalid(format!("{at}/params/exponents"), e.to_string()))?;
                if p.len() != a.len() {
                    return Err(HarnessError::invalid(
                        format!("{at}/params/exponents"),
                        format!("{} exponents for {} elements", p.len(), a.len()),
                    ));
                }
                Check::Holder { map, a, p }
            }
            Suite::Minkowski => {
                let map = c.map()?;
                let a = c.elements(1, None)?;
                c.check_map_dim(&map, &a)?;
                let p = c.exponent("p")?;
                if p <= 1.0 {
                    return Err(HarnessError::invalid(format!("{at}/params/p"), "Minkowski needs p > 1"));
                }
                Check::Minkowski { map, a, p }
            }
        };
        Ok(check)
    }
}

struct CheckCtx<'a> {
    at: &'a str,
    r: &'a Resolver<'a>,
    spec: &'a CheckSpec,
}

impl CheckCtx<'_> {
    fn require_real(&self) -> Result<(), HarnessError> {
        if self.r.file.field != ScalarField::Real {
            return Err(HarnessError::invalid(
                "/field",
                format!("suite `{}` needs a real instance", self.spec.suite),
            ));
        }
        Ok(())
    }

    fn elements(&self, min: usize, max: Option<usize>) -> Result<Vec<LatticeElement>, HarnessError> {
        let at = format!("{}/operands/elements", self.at);
        let names = self
            .spec
            .operands
            .elements
            .as_ref()
            .ok_or_else(|| HarnessError::invalid(format!("{}/operands", self.at), "missing `elements`"))?;
        if names.len() < min || max.is_some_and(|m| names.len() > m) {
            let want = match max {
                Some(m) if m == min => format!("exactly {min}"),
                Some(m) => format!("{min} to {m}"),
                None => format!("at least {min}"),
            };
            return Err(HarnessError::invalid(at, format!("expected {want} elements, found {}", names.len())));
        }
        let mut out: Vec<LatticeElement> = Vec::with_capacity(names.len());
        for (k, name) in names.iter().enumerate() {
            let el = self
                .r
                .elements
                .get(name)
                .ok_or_else(|| HarnessError::invalid(format!("{at}/{k}"), format!("unknown element `{name}`")))?;
            if let Some(first) = out.first() {
                if first.dim() != el.dim() {
                    return Err(HarnessError::invalid(
                        format!("{at}/{k}"),
                        format!("dimension {} differs from {}", el.dim(), first.dim()),
                    ));
                }
            }
            out.push(el.clone());
        }
        Ok(out)
    }

    fn positive_elements(&self, min: usize, max: Option<usize>) -> Result<Vec<LatticeElement>, HarnessError> {
        let fs = self.elements(min, max)?;
        for (k, f) in fs.iter().enumerate() {
            if !f.is_positive() {
                return Err(HarnessError::invalid(
                    format!("{}/operands/elements/{k}", self.at),
                    "element is not in the positive cone",
                ));
            }
        }
        Ok(fs)
    }

    fn weights(&self, n: usize) -> Result<WeightVector, HarnessError> {
        let at = format!("{}/params/weights", self.at);
        let raw = self
            .spec
            .params
            .weights
            .clone()
            .ok_or_else(|| HarnessError::invalid(format!("{}/params", self.at), "missing `weights`"))?;
        if raw.len() != n {
            return Err(HarnessError::invalid(at, format!("{} weights for {n} elements", raw.len())));
        }
        WeightVector::new(raw).map_err(|e| HarnessError::invalid(at, e.to_string()))
    }

    fn exponent(&self, key: &str) -> Result<f64, HarnessError> {
        let params = &self.spec.params;
        let value = match key {
            "p" => params.p,
            "q" => params.q,
            _ => params.r,
        };
        let x = value.ok_or_else(|| HarnessError::invalid(format!("{}/params", self.at), format!("missing `{key}`")))?;
        ExponentDecomposition::new(x)
            .map_err(|e| HarnessError::invalid(format!("{}/params/{key}", self.at), e.to_string()))?;
        Ok(x)
    }

    fn map(&self) -> Result<PositiveLinearMap, HarnessError> {
        let name = self
            .spec
            .operands
            .map
            .as_ref()
            .ok_or_else(|| HarnessError::invalid(format!("{}/operands", self.at), "missing `map`"))?;
        self.r
            .maps
            .get(name)
            .cloned()
            .ok_or_else(|| HarnessError::invalid(format!("{}/operands/map", self.at), format!("unknown map `{name}`")))
    }

    fn check_map_dim(&self, map: &PositiveLinearMap, fs: &[LatticeElement]) -> Result<(), HarnessError> {
        if fs[0].dim() != map.in_dim() {
            return Err(HarnessError::invalid(
                format!("{}/operands/map", self.at),
                format!("map acts on dimension {}, elements have {}", map.in_dim(), fs[0].dim()),
            ));
        }
        Ok(())
    }

    fn form_pair(&self) -> Result<(SesquilinearForm, Vec<Complex64>, Vec<Complex64>), HarnessError> {
        let ops = &self.spec.operands;
        let at = format!("{}/operands", self.at);
        let name = ops
            .form
            .as_ref()
            .ok_or_else(|| HarnessError::invalid(at.clone(), "missing `form`"))?;
        let form = self
            .r
            .forms
            .get(name)
            .ok_or_else(|| HarnessError::invalid(format!("{at}/form"), format!("unknown form `{name}`")))?;
        if !self.r.file.forms[name].hermitian {
            return Err(HarnessError::invalid(
                format!("{at}/form"),
                "Cauchy-Schwarz checks need a form tagged Hermitian",
            ));
        }
        form.validate(self.r.cfg)
            .map_err(|e| HarnessError::invalid(format!("/forms/{}/matrices", pointer_token(name)), e.to_string()))?;
        let mut vecs = Vec::with_capacity(2);
        for (key, slot) in [("u", &ops.u), ("v", &ops.v)] {
            let n = slot
                .as_ref()
                .ok_or_else(|| HarnessError::invalid(at.clone(), format!("missing `{key}`")))?;
            let el = self
                .r
                .elements
                .get(n)
                .ok_or_else(|| HarnessError::invalid(format!("{at}/{key}"), format!("unknown element `{n}`")))?;
            if el.dim() != form.domain_dim() {
                return Err(HarnessError::invalid(
                    format!("{at}/{key}"),
                    format!("length {} but the form acts on dimension {}", el.dim(), form.domain_dim()),
                ));
            }
            vecs.push(el.coords().to_vec());
        }
        let v = vecs.pop().expect("two vectors");
        let u = vecs.pop().expect("two vectors");
        Ok((form.clone(), u, v))
    }
}

/// Runs the instance's checks (only those of `suite` unless it is `all`).
///
/// The result has one child report per suite, in order of first appearance.
pub fn run_instance(
    instance: &Instance,
    suite: Suite,
    cfg: &GridConfig,
    seed: u64,
) -> Result<VerificationReport, HarnessError> {
    let mut builders: Vec<(Suite, ReportBuilder)> = Vec::new();
    for (i, check) in instance.checks.iter().enumerate() {
        let s = check.suite();
        if suite != Suite::All && s != suite {
            continue;
        }
        let outcome = check.evaluate(cfg, seed.wrapping_add(i as u64))?;
        match builders.iter_mut().find(|(t, _)| *t == s) {
            Some((_, b)) => b.push(outcome),
            None => {
                let mut b = ReportBuilder::new(s.name(), cfg, seed);
                b.push(outcome);
                builders.push((s, b));
            }
        }
    }
    let children = builders.into_iter().map(|(_, b)| b.finish()).collect();
    Ok(VerificationReport::aggregate("instance", cfg, seed, children))
}
