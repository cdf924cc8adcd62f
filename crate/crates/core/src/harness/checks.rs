//! Single verification checks on fully resolved operands.
//!
//! Instance files and the random suites both reduce to a list of [`Check`]s;
//! each evaluates to one [`InstanceOutcome`] with named relations.

use num_complex::Complex64;
use serde_json::json;

use crate::config::GridConfig;
use crate::error::Result;
use crate::lattice::{
    geometric_mean, geometric_mean_closed, join, meet, modulus, modulus_closed, square_mean, LatticeElement,
};
use crate::maps::{
    elements_json, holder_outcome, homomorphism_outcome, maligranda_outcome, minkowski_outcome, ExponentVector,
    PositiveLinearMap,
};
use crate::power::{int_power, power, power_rules_outcome, weighted_geometric_mean, WeightVector};
use crate::power::{weighted_geometric_mean_closed, ExponentDecomposition};
use crate::report::{InstanceOutcome, Relation};
use crate::sesquilinear::{
    cauchy_schwarz_outcome, cauchy_schwarz_report, classical_equality_witness_search, corollary_outcome,
    operands_json, CauchySchwarzReport, SesquilinearForm,
};

use super::suites::Suite;

/// Default scalar-grid size for the classical witness search.
pub const DEFAULT_PROBE_COUNT: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    LatticeAxioms {
        f: LatticeElement,
        g: LatticeElement,
        h: LatticeElement,
    },
    Modulus {
        f: LatticeElement,
    },
    SquareMean {
        f: LatticeElement,
        g: LatticeElement,
    },
    GeometricMean {
        f: LatticeElement,
        g: LatticeElement,
    },
    WeightedGm {
        fs: Vec<LatticeElement>,
        w: WeightVector,
    },
    Powers {
        a: LatticeElement,
        r: f64,
    },
    PowerRules {
        a: LatticeElement,
        p: f64,
        q: f64,
    },
    CauchySchwarz {
        form: SesquilinearForm,
        u: Vec<Complex64>,
        v: Vec<Complex64>,
        expect_equality: Option<bool>,
    },
    CsCorollary {
        form: SesquilinearForm,
        u: Vec<Complex64>,
        v: Vec<Complex64>,
    },
    CsEquality {
        form: SesquilinearForm,
        u: Vec<Complex64>,
        v: Vec<Complex64>,
        probe_count: usize,
        expect_equality: Option<bool>,
        expect_witness: Option<bool>,
    },
    Maligranda {
        map: PositiveLinearMap,
        fs: Vec<LatticeElement>,
        w: WeightVector,
    },
    HomEquality {
        map: PositiveLinearMap,
        fs: Vec<LatticeElement>,
        w: WeightVector,
    },
    Holder {
        map: PositiveLinearMap,
        a: Vec<LatticeElement>,
        p: ExponentVector,
    },
    Minkowski {
        map: PositiveLinearMap,
        a: Vec<LatticeElement>,
        p: f64,
    },
}

impl Check {
    pub fn suite(&self) -> Suite {
        match self {
            Check::LatticeAxioms { .. } => Suite::LatticeAxioms,
            Check::Modulus { .. } => Suite::Modulus,
            Check::SquareMean { .. } => Suite::SquareMean,
            Check::GeometricMean { .. } => Suite::GeometricMean,
            Check::WeightedGm { .. } => Suite::WeightedGm,
            Check::Powers { .. } => Suite::Powers,
            Check::PowerRules { .. } => Suite::PowerRules,
            Check::CauchySchwarz { .. } => Suite::CauchySchwarz,
            Check::CsCorollary { .. } => Suite::CsCorollary,
            Check::CsEquality { .. } => Suite::CsEquality,
            Check::Maligranda { .. } => Suite::Maligranda,
            Check::HomEquality { .. } => Suite::HomEquality,
            Check::Holder { .. } => Suite::Holder,
            Check::Minkowski { .. } => Suite::Minkowski,
        }
    }

    /// Runs the check. `seed` only feeds the randomized witness search.
    pub fn evaluate(&self, cfg: &GridConfig, seed: u64) -> Result<InstanceOutcome> {
        match self {
            Check::LatticeAxioms { f, g, h } => lattice_axioms(f, g, h),
            Check::Modulus { f } => modulus_check(f, cfg),
            Check::SquareMean { f, g } => square_mean_check(f, g, cfg),
            Check::GeometricMean { f, g } => geometric_mean_check(f, g, cfg),
            Check::WeightedGm { fs, w } => weighted_gm_check(fs, w, cfg),
            Check::Powers { a, r } => powers_check(a, *r, cfg),
            Check::PowerRules { a, p, q } => power_rules_outcome(a, *p, *q, cfg),
            Check::CauchySchwarz {
                form,
                u,
                v,
                expect_equality,
            } => {
                let (out, rep) = cauchy_schwarz_outcome(form, u, v, cfg)?;
                Ok(match expect_equality {
                    Some(e) => out.with(Relation::flag("expected_equality", rep.equality == *e)),
                    None => out,
                })
            }
            Check::CsCorollary { form, u, v } => corollary_outcome(form, u, v, cfg),
            Check::CsEquality {
                form,
                u,
                v,
                probe_count,
                expect_equality,
                expect_witness,
            } => Ok(cs_equality_check(form, u, v, *probe_count, *expect_equality, *expect_witness, seed, cfg)?.0),
            Check::Maligranda { map, fs, w } => maligranda_outcome(map, fs, w, cfg),
            Check::HomEquality { map, fs, w } => homomorphism_outcome(map, fs, w, cfg),
            Check::Holder { map, a, p } => holder_outcome(map, a, p, cfg),
            Check::Minkowski { map, a, p } => minkowski_outcome(map, a, *p, cfg),
        }
    }
}

fn lattice_axioms(f: &LatticeElement, g: &LatticeElement, h: &LatticeElement) -> Result<InstanceOutcome> {
    let commutative = join(f, g)? == join(g, f)? && meet(f, g)? == meet(g, f)?;
    let associative =
        join(&join(f, g)?, h)? == join(f, &join(g, h)?)? && meet(&meet(f, g)?, h)? == meet(f, &meet(g, h)?)?;
    let absorbing = join(f, &meet(f, g)?)? == *f && meet(f, &join(f, g)?)? == *f;
    let distributive = meet(f, &join(g, h)?)? == join(&meet(f, g)?, &meet(f, h)?)?;
    let abs_f = modulus_closed(f);
    let modulus_is_join = abs_f == join(f, &f.neg())?;
    let cone = (abs_f == *f) == f.is_positive();
    Ok(InstanceOutcome::new(json!({ "f": f.to_pairs(), "g": g.to_pairs(), "h": h.to_pairs() }))
        .with(Relation::flag("commutativity", commutative))
        .with(Relation::flag("associativity", associative))
        .with(Relation::flag("absorption", absorbing))
        .with(Relation::flag("distributivity", distributive))
        .with(Relation::flag("modulus_join", modulus_is_join))
        .with(Relation::flag("positive_cone", cone)))
}

fn modulus_check(f: &LatticeElement, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let ev = modulus(f, cfg)?;
    Ok(InstanceOutcome::new(json!({ "f": f.to_pairs() }))
        .with(Relation::new("grid_gap", ev.closed.max_excess_over(&ev.definitional)?, cfg.grid_tol))
        .with(Relation::new(
            "upper_bound",
            ev.definitional.max_excess_over(&ev.closed)?,
            cfg.scaled_tol(ev.closed.max_abs()),
        ))
        .with_residual(ev.discrepancy()))
}

fn square_mean_check(f: &LatticeElement, g: &LatticeElement, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let ev = square_mean(f, g, cfg)?;
    let via_modulus = modulus_closed(&LatticeElement::complexify(f, g)?);
    Ok(InstanceOutcome::new(json!({ "f": f.to_pairs(), "g": g.to_pairs() }))
        .with(Relation::new("grid_gap", ev.closed.max_excess_over(&ev.definitional)?, cfg.grid_tol))
        .with(Relation::new(
            "upper_bound",
            ev.definitional.max_excess_over(&ev.closed)?,
            cfg.scaled_tol(ev.closed.max_abs()),
        ))
        .with(Relation::flag("complexification", ev.closed.re() == via_modulus.re()))
        .with_residual(ev.discrepancy()))
}

fn geometric_mean_check(f: &LatticeElement, g: &LatticeElement, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let ev = geometric_mean(f, g, cfg)?;
    let symmetric = ev.closed == geometric_mean_closed(g, f)?;
    Ok(InstanceOutcome::new(json!({ "f": f.to_pairs(), "g": g.to_pairs() }))
        .with(Relation::new("grid_gap", ev.discrepancy(), cfg.grid_tol))
        .with(Relation::new("lower_bound", ev.closed.max_excess_over(&ev.definitional)?, cfg.abs_tol))
        .with(Relation::flag("symmetry", symmetric))
        .with_residual(ev.discrepancy()))
}

fn weighted_gm_check(fs: &[LatticeElement], w: &WeightVector, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let ev = weighted_geometric_mean(fs, w, cfg)?;
    let rev_fs: Vec<LatticeElement> = fs.iter().rev().cloned().collect();
    let rev_w = WeightVector::new(w.as_slice().iter().rev().cloned().collect())?;
    let permuted = weighted_geometric_mean_closed(&rev_fs, &rev_w)?;
    Ok(
        InstanceOutcome::new(json!({ "fs": elements_json(fs), "weights": w.as_slice() }))
            .with(Relation::new("grid_gap", ev.discrepancy(), cfg.grid_tol))
            .with(Relation::new(
                "lower_bound",
                ev.closed.max_excess_over(&ev.definitional)?,
                cfg.scaled_tol(ev.closed.max_abs()),
            ))
            .with(Relation::flag("permutation", permuted == ev.closed))
            .with_residual(ev.discrepancy()),
    )
}

fn powers_check(a: &LatticeElement, r: f64, cfg: &GridConfig) -> Result<InstanceOutcome> {
    let ev = power(a, r, cfg)?;
    let whole = int_power(a, ExponentDecomposition::new(r)?.floor_part)?;
    Ok(InstanceOutcome::new(json!({ "a": a.to_pairs(), "r": r }))
        .with(Relation::new("grid_gap", ev.discrepancy(), cfg.grid_tol * (1.0 + whole.max_abs())))
        .with(Relation::new(
            "lower_bound",
            ev.closed.max_excess_over(&ev.definitional)?,
            cfg.scaled_tol(ev.closed.max_abs()),
        ))
        .with_residual(ev.discrepancy()))
}

/// Equality classification plus the classical witness search. Returns the
/// underlying report so callers can add margin checks.
#[allow(clippy::too_many_arguments)]
pub(crate) fn cs_equality_check(
    form: &SesquilinearForm,
    u: &[Complex64],
    v: &[Complex64],
    probe_count: usize,
    expect_equality: Option<bool>,
    expect_witness: Option<bool>,
    seed: u64,
    cfg: &GridConfig,
) -> Result<(InstanceOutcome, CauchySchwarzReport)> {
    let rep = cauchy_schwarz_report(form, u, v, cfg)?;
    let witness = if probe_count > 0 || expect_witness.is_some() {
        classical_equality_witness_search(form, u, v, probe_count, seed, cfg)?
    } else {
        None
    };
    let mut info = operands_json(form, u, v);
    info["equality"] = json!(rep.equality);
    info["gap"] = json!(rep.gap.re());
    info["closed_gap"] = json!(rep.closed_gap.re());
    info["classical_witness"] = match witness {
        Some((a, b)) => json!([[a.re, a.im], [b.re, b.im]]),
        None => json!(null),
    };
    let mut out = InstanceOutcome::new(info)
        .with(Relation::new("gap_agreement", rep.gap.max_abs_diff(&rep.closed_gap)?, cfg.grid_tol))
        .with_residual(rep.gap.max_abs_diff(&rep.closed_gap)?);
    if let Some(e) = expect_equality {
        out = out.with(Relation::flag("expected_equality", rep.equality == e));
    }
    if let Some(e) = expect_witness {
        out = out.with(Relation::flag("expected_witness", witness.is_some() == e));
    }
    if rep.equality && witness.is_none() {
        out = out.with_note("equality holds without a classical linear-dependence witness");
    }
    Ok((out, rep))
}
