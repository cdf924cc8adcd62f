//! Verification reports: per-instance relation checks aggregated per suite.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::GridConfig;

/// One checked relation on one instance. It holds when
/// `violation <= tolerance`; `violation` is nonnegative (or NaN on failure
/// to evaluate).
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub name: &'static str,
    pub violation: f64,
    pub tolerance: f64,
}

impl Relation {
    pub fn new(name: &'static str, violation: f64, tolerance: f64) -> Self {
        Self {
            name,
            violation,
            tolerance,
        }
    }

    /// A boolean relation: violation 0 when it holds, 1 otherwise.
    pub fn flag(name: &'static str, holds: bool) -> Self {
        Self::new(name, if holds { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn holds(&self) -> bool {
        self.violation <= self.tolerance
    }
}

/// Everything checked on a single instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceOutcome {
    pub relations: Vec<Relation>,
    /// Definitional-vs-closed discrepancy, for suites with a grid path.
    pub residual: Option<f64>,
    pub witness: Value,
    pub notes: Vec<String>,
}

impl InstanceOutcome {
    pub fn new(witness: Value) -> Self {
        Self {
            relations: Vec::new(),
            residual: None,
            witness,
            notes: Vec::new(),
        }
    }

    pub fn with(mut self, relation: Relation) -> Self {
        self.relations.push(relation);
        self
    }

    pub fn with_residual(mut self, residual: f64) -> Self {
        self.residual = Some(residual);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.relations.iter().all(Relation::holds)
    }

    /// Largest violation among the relations (NaN propagates as infinity).
    pub fn max_violation(&self) -> f64 {
        self.relations
            .iter()
            .map(|r| if r.violation.is_nan() { f64::INFINITY } else { r.violation })
            .fold(0.0, f64::max)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSummary {
    pub checked: usize,
    pub failed: usize,
    pub max_violation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDiagnostics {
    pub theta_points: usize,
    pub lambda_points: usize,
    pub refine_iters: usize,
    /// Definitional-vs-closed discrepancy of each instance, in instance order.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub instances: usize,
    pub passes: usize,
    pub max_violation: f64,
    pub worst_witness: Option<Value>,
    pub grid_diagnostics: GridDiagnostics,
    pub seed: u64,
    pub relations: BTreeMap<String, RelationSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<VerificationReport>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.passes == self.instances && self.children.iter().all(Self::all_passed)
    }

    pub fn child(&self, suite: &str) -> Option<&VerificationReport> {
        self.children.iter().find(|c| c.suite == suite)
    }

    /// Combines child reports into one summary report.
    pub fn aggregate(suite: &str, cfg: &GridConfig, seed: u64, children: Vec<VerificationReport>) -> Self {
        let mut top = ReportBuilder::new(suite, cfg, seed).finish();
        let mut worst: Option<f64> = None;
        for c in &children {
            top.instances += c.instances;
            top.passes += c.passes;
            if c.worst_witness.is_some() && worst.is_none_or(|w| c.max_violation > w) {
                worst = Some(c.max_violation);
                top.max_violation = c.max_violation;
                top.worst_witness = c.worst_witness.clone();
            }
        }
        top.children = children;
        top
    }
}

/// Accumulates instance outcomes in order.
#[derive(Debug)]
pub struct ReportBuilder {
    report: VerificationReport,
    worst: Option<f64>,
}

impl ReportBuilder {
    pub fn new(suite: &str, cfg: &GridConfig, seed: u64) -> Self {
        Self {
            report: VerificationReport {
                suite: suite.to_owned(),
                instances: 0,
                passes: 0,
                max_violation: 0.0,
                worst_witness: None,
                grid_diagnostics: GridDiagnostics {
                    theta_points: cfg.theta_points,
                    lambda_points: cfg.lambda_points,
                    refine_iters: cfg.refine_iters,
                    residuals: Vec::new(),
                },
                seed,
                relations: BTreeMap::new(),
                notes: Vec::new(),
                children: Vec::new(),
            },
            worst: None,
        }
    }

    pub fn push(&mut self, outcome: InstanceOutcome) {
        let r = &mut self.report;
        r.instances += 1;
        if outcome.passed() {
            r.passes += 1;
        }
        for rel in &outcome.relations {
            let s = r.relations.entry(rel.name.to_owned()).or_insert(RelationSummary {
                checked: 0,
                failed: 0,
                max_violation: 0.0,
                tolerance: rel.tolerance,
            });
            s.checked += 1;
            if !rel.holds() {
                s.failed += 1;
            }
            let v = if rel.violation.is_nan() { f64::INFINITY } else { rel.violation };
            s.max_violation = s.max_violation.max(v);
            s.tolerance = s.tolerance.max(rel.tolerance);
        }
        if let Some(res) = outcome.residual {
            r.grid_diagnostics.residuals.push(res);
        }
        let v = outcome.max_violation();
        for note in outcome.notes {
            if !r.notes.contains(&note) {
                r.notes.push(note);
            }
        }
        if self.worst.is_none_or(|w| v > w) {
            self.worst = Some(v);
            r.max_violation = v;
            r.worst_witness = Some(outcome.witness);
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.report.notes.push(note.into());
    }

    pub fn finish(self) -> VerificationReport {
        self.report
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_text(f, 0)
    }
}

impl VerificationReport {
    fn write_text(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        let status = if self.all_passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "{pad}[{status}] {}: {}/{} passed, max violation {:.3e} (seed {})",
            self.suite, self.passes, self.instances, self.max_violation, self.seed
        )?;
        for (name, s) in &self.relations {
            writeln!(
                f,
                "{pad}    {name}: {}/{} ok, max violation {:.3e}, tolerance {:.1e}",
                s.checked - s.failed,
                s.checked,
                s.max_violation,
                s.tolerance
            )?;
        }
        if !self.grid_diagnostics.residuals.is_empty() {
            let res = &self.grid_diagnostics.residuals;
            let max = res.iter().cloned().fold(0.0, f64::max);
            writeln!(
                f,
                "{pad}    grid residual: max {:.3e} over {} instances (theta_points {}, refine_iters {})",
                max,
                res.len(),
                self.grid_diagnostics.theta_points,
                self.grid_diagnostics.refine_iters
            )?;
        }
        for note in &self.notes {
            writeln!(f, "{pad}    note: {note}")?;
        }
        for c in &self.children {
            c.write_text(f, depth + 1)?;
        }
        Ok(())
    }
}
