//! Built-in reference instances and computed-versus-published comparisons.
//!
//! Three targets are available: a four-task scheduling instance, a
//! three-sensor information-gain instance and a small table that admits no
//! polymatroid extension. Published values are compared at the precision
//! they were printed with. Where the published sensing walkthrough disagrees
//! with direct evaluation of the objective, the row is marked as an annotated
//! discrepancy instead of a mismatch.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::curvature::{bound_uniform_matroid, matroid_curvature, total_curvature};
use crate::error::{Error, Result};
use crate::extension::{extend, ExtensionPolicy, ExtensionStatus, DEFAULT_BEAM_WIDTH};
use crate::instance::{InstanceFile, MatroidRecord, ObjectiveRecord, TableEntry};
use crate::objective::{check_polymatroid, EvalDomain, SetFunction};
use crate::solver::{exact, greedy, ratio, ScanMode};
use crate::subset::SubsetKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    TaskScheduling,
    AdaptiveSensing,
    Counterexample,
}

impl Target {
    pub const ALL: [Target; 3] = [
        Target::TaskScheduling,
        Target::AdaptiveSensing,
        Target::Counterexample,
    ];
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::TaskScheduling => "task-scheduling",
            Target::AdaptiveSensing => "adaptive-sensing",
            Target::Counterexample => "counterexample",
        })
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "task-scheduling" => Ok(Target::TaskScheduling),
            "adaptive-sensing" => Ok(Target::AdaptiveSensing),
            "counterexample" | "remark1" => Ok(Target::Counterexample),
            other => Err(Error::InvalidParameter(format!(
                "unknown reproduce target {other:?}; expected task-scheduling, \
                 adaptive-sensing or counterexample (alias remark1)"
            ))),
        }
    }
}

pub const SENSING_ALPHAS: [f64; 3] = [0.5, 0.6, 0.8];
pub const TASK_PROBS: [f64; 4] = [0.4, 0.6, 0.8, 0.9];

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn builtin_instance(target: Target) -> InstanceFile {
    match target {
        Target::TaskScheduling => InstanceFile {
            id: Some("task-scheduling".into()),
            ground_set: labels("a", 4),
            matroid: MatroidRecord::Uniform { rank: 2 },
            objective: ObjectiveRecord::TaskScheduling {
                subtasks: Some(1),
                success_prob: vec![TASK_PROBS.to_vec()],
            },
            tolerance: None,
        },
        Target::AdaptiveSensing => InstanceFile {
            id: Some("adaptive-sensing".into()),
            ground_set: labels("a", 3),
            matroid: MatroidRecord::Uniform { rank: 2 },
            objective: ObjectiveRecord::InfoGain {
                alphas: SENSING_ALPHAS.to_vec(),
            },
            tolerance: None,
        },
        Target::Counterexample => {
            let entry = |set: &[&str], value: f64| TableEntry {
                set: set.iter().map(|s| s.to_string()).collect(),
                value,
            };
            InstanceFile {
                id: Some("counterexample".into()),
                ground_set: labels("", 3),
                matroid: MatroidRecord::Uniform { rank: 2 },
                objective: ObjectiveRecord::Table {
                    domain: EvalDomain::Matroid,
                    entries: vec![
                        entry(&[], 0.0),
                        entry(&["1"], 1.0),
                        entry(&["2"], 1.0),
                        entry(&["3"], 1.0),
                        entry(&["1", "2"], 1.0),
                        entry(&["1", "3"], 1.0),
                        entry(&["2", "3"], 2.0),
                    ],
                },
                tolerance: None,
            }
        }
    }
}

fn is_sensing_instance(file: &InstanceFile) -> bool {
    file.ground_set.len() == 3
        && file.matroid == MatroidRecord::Uniform { rank: 2 }
        && file.objective
            == ObjectiveRecord::InfoGain {
                alphas: SENSING_ALPHAS.to_vec(),
            }
}

/// A published value that differs from what the objective evaluates to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Annotation {
    pub subject: String,
    /// Extension policy the note applies to; `None` for every report.
    pub policy: Option<String>,
    pub published: String,
    pub computed: String,
    pub note: String,
}

/// `½ ln(x)` rendered with four decimals, the form the sensing values are
/// published in.
fn half_log(v: f64) -> String {
    format!("1/2 ln {:.4}", (2.0 * v).exp())
}

fn sensing_max_extension() -> Result<(f64, f64, f64)> {
    let inst = builtin_instance(Target::AdaptiveSensing).build()?;
    let r = extend(
        &inst.objective,
        &inst.matroid,
        ExtensionPolicy::Max,
        inst.tolerance,
    )?;
    let full = SubsetKey::full(3);
    let d = r
        .d_choices()
        .find(|(s, _)| *s == full)
        .map(|(_, d)| d)
        .unwrap_or(f64::NAN);
    let c = r.achieved_c().unwrap_or(f64::NAN);
    Ok((d, c, bound_uniform_matroid(c, 2)?.value))
}

/// Notes attached to extension and certificate reports whose instance is one
/// of the built-in references with a known published discrepancy.
pub fn known_annotations(file: &InstanceFile) -> Vec<Annotation> {
    if !is_sensing_instance(file) {
        return Vec::new();
    }
    let Ok((d, c, bound)) = sensing_max_extension() else {
        return Vec::new();
    };
    let why = "direct evaluation of the information-gain objective gives 1/2 ln 1.7421 \
               for the third upper-bound term f({a1,a3}) - f({a1,a2}) + f({a2,a3}) - f({a3}); \
               the published 1/2 ln 1.6799 results from using f({a2}) in place of f({a3}). \
               Computed values follow the objective; the qualitative conclusions (the \
               curvature target is unreachable, c(g) lands close to b(f), the bound improves) \
               hold either way";
    vec![
        Annotation {
            subject: "slack d at the full set (max policy)".into(),
            policy: Some("max".into()),
            published: "1/2 ln 1.6799".into(),
            computed: half_log(d),
            note: why.into(),
        },
        Annotation {
            subject: "total curvature c(g) of the extension (max policy)".into(),
            policy: Some("max".into()),
            published: "0.3317".into(),
            computed: format!("{c:.4}"),
            note: "follows from the slack above".into(),
        },
        Annotation {
            subject: "uniform-matroid bound evaluated at c(g) (max policy)".into(),
            policy: Some("max".into()),
            published: "0.9172".into(),
            computed: format!("{bound:.4}"),
            note: "follows from the slack above".into(),
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Match,
    Mismatch,
    /// Differs from the published value for a documented reason.
    AnnotatedDiscrepancy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub published: String,
    pub computed: String,
    pub published_value: Option<f64>,
    pub computed_value: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: RowStatus,
}

impl ComparisonRow {
    fn numeric(quantity: &str, published: f64, computed: f64, tolerance: f64) -> Self {
        ComparisonRow {
            quantity: quantity.into(),
            published: published.to_string(),
            computed: format!("{computed:.6}"),
            published_value: Some(published),
            computed_value: Some(computed),
            tolerance: Some(tolerance),
            status: if (published - computed).abs() <= tolerance {
                RowStatus::Match
            } else {
                RowStatus::Mismatch
            },
        }
    }

    /// A value published as `½ ln(x)`; compared on the value itself.
    fn half_log(quantity: &str, published_arg: f64, computed: f64, tolerance: f64) -> Self {
        let published = 0.5 * published_arg.ln();
        ComparisonRow {
            published: format!("1/2 ln {published_arg}"),
            computed: half_log(computed),
            ..ComparisonRow::numeric(quantity, published, computed, tolerance)
        }
    }

    fn flag(quantity: &str, published: &str, computed: String, ok: bool) -> Self {
        ComparisonRow {
            quantity: quantity.into(),
            published: published.into(),
            computed,
            published_value: None,
            computed_value: None,
            tolerance: None,
            status: if ok {
                RowStatus::Match
            } else {
                RowStatus::Mismatch
            },
        }
    }

    fn annotated(mut self) -> Self {
        if self.status == RowStatus::Mismatch {
            self.status = RowStatus::AnnotatedDiscrepancy;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproduceReport {
    pub target: Target,
    pub instance: InstanceFile,
    pub rows: Vec<ComparisonRow>,
    pub annotations: Vec<Annotation>,
    pub passed: bool,
}

impl crate::report::Report for ReproduceReport {
    fn finding(&self) -> bool {
        !self.passed
    }

    fn text(&self) -> Option<String> {
        let status = |s: RowStatus| match s {
            RowStatus::Match => "match",
            RowStatus::Mismatch => "MISMATCH",
            RowStatus::AnnotatedDiscrepancy => "annotated",
        };
        let width = self
            .rows
            .iter()
            .map(|r| r.quantity.len())
            .max()
            .unwrap_or(0);
        let mut out = format!("reproduce {}\n\n", self.target);
        out.push_str(&format!(
            "{:<width$}  {:<26}  {:<26}  status\n",
            "quantity", "published", "computed"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<width$}  {:<26}  {:<26}  {}\n",
                r.quantity,
                r.published,
                r.computed,
                status(r.status)
            ));
        }
        for a in &self.annotations {
            out.push_str(&format!(
                "\nnote: {}: published {}, computed {}\n  {}\n",
                a.subject, a.published, a.computed, a.note
            ));
        }
        out.push_str(&format!(
            "\n{}\n",
            if self.passed {
                "all published values reproduced (discrepancies annotated)"
            } else {
                "MISMATCHES FOUND"
            }
        ));
        Some(out)
    }
}

impl ReproduceReport {
    pub fn row(&self, quantity: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }
}

pub fn run_reproduce(target: Target) -> Result<ReproduceReport> {
    let file = builtin_instance(target);
    let rows = match target {
        Target::TaskScheduling => task_rows(&file)?,
        Target::AdaptiveSensing => sensing_rows(&file)?,
        Target::Counterexample => counterexample_rows(&file)?,
    };
    let passed = rows.iter().all(|r| r.status != RowStatus::Mismatch);
    Ok(ReproduceReport {
        target,
        annotations: known_annotations(&file),
        instance: file,
        rows,
        passed,
    })
}

fn set(elems: &[usize]) -> SubsetKey {
    SubsetKey::from_elements(elems.iter().copied())
}

const PRINTED: f64 = 1e-3;
const PRINTED_4: f64 = 5e-4;

fn task_rows(file: &InstanceFile) -> Result<Vec<ComparisonRow>> {
    let inst = file.build()?;
    let (f, m, tol) = (&inst.objective, &inst.matroid, inst.tolerance);
    let b = matroid_curvature(f, m, ScanMode::Independent, tol)?.value;
    let c = total_curvature(f, tol)?.value;
    let r = extend(f, m, ExtensionPolicy::TargetB, tol)?;
    let mut rows = vec![
        ComparisonRow::numeric("matroid curvature b(f)", 0.9, b, PRINTED),
        ComparisonRow::numeric("total curvature c(f)", 0.992, c, PRINTED),
        ComparisonRow::flag(
            "target-b extension",
            "feasible",
            status_name(&r.status).into(),
            r.is_feasible(),
        ),
    ];
    if let Some(g) = r.g() {
        for (name, s, v) in [
            ("g({a1,a2,a3})", set(&[0, 1, 2]), 0.96),
            ("g({a1,a2,a4})", set(&[0, 1, 3]), 1.0),
            ("g({a1,a3,a4})", set(&[0, 2, 3]), 1.02),
            ("g({a2,a3,a4})", set(&[1, 2, 3]), 1.04),
            ("g(X)", SubsetKey::full(4), 1.08),
        ] {
            rows.push(ComparisonRow::numeric(name, v, g.evaluate(s)?, PRINTED));
        }
    }
    if let Some(layer) = r.layers.iter().find(|l| l.set == SubsetKey::full(4)) {
        rows.push(ComparisonRow::numeric(
            "upper limit on d at X",
            0.04,
            layer.upper.unwrap_or(f64::INFINITY),
            PRINTED,
        ));
        rows.push(ComparisonRow::numeric(
            "lower limit on d at X",
            0.04,
            layer.lower,
            PRINTED,
        ));
    }
    rows.push(ComparisonRow::numeric(
        "total curvature c(g)",
        0.9,
        r.achieved_c().unwrap_or(f64::NAN),
        PRINTED,
    ));
    rows.push(ComparisonRow::numeric(
        "uniform bound at b(f)",
        0.775,
        bound_uniform_matroid(b, 2)?.value,
        PRINTED,
    ));
    rows.push(ComparisonRow::numeric(
        "uniform bound at c(f)",
        0.752,
        bound_uniform_matroid(c, 2)?.value,
        PRINTED,
    ));
    let g = greedy(f, m, tol)?;
    let o = exact(f, m, ScanMode::Independent, tol)?;
    rows.push(ComparisonRow::numeric(
        "greedy value",
        0.98,
        g.final_value,
        PRINTED,
    ));
    rows.push(ComparisonRow::numeric(
        "greedy / optimal",
        1.0,
        ratio(g.final_value, o.value).value,
        PRINTED,
    ));
    Ok(rows)
}

fn sensing_rows(file: &InstanceFile) -> Result<Vec<ComparisonRow>> {
    let inst = file.build()?;
    let (f, m, tol) = (&inst.objective, &inst.matroid, inst.tolerance);
    let v = |s: &[usize]| f.evaluate(set(s));
    let b = matroid_curvature(f, m, ScanMode::Independent, tol)?.value;
    let c = total_curvature(f, tol)?.value;

    let (f1, f2, f3) = (v(&[0])?, v(&[1])?, v(&[2])?);
    let (f12, f13, f23) = (v(&[0, 1])?, v(&[0, 2])?, v(&[1, 2])?);
    let upper = [f13 - f1, f23 - f2, f13 - f12 + f23 - f3];
    let lower = [
        (1.0 - b) * f3,
        f23 - f12 + (1.0 - b) * f1,
        f13 - f12 + (1.0 - b) * f2,
    ];
    let upper_min = upper.iter().copied().fold(f64::INFINITY, f64::min);
    let lower_max = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut rows = vec![
        ComparisonRow::numeric("matroid curvature b(f)", 0.3001, b, PRINTED_4),
        ComparisonRow::numeric("total curvature c(f)", 0.4509, c, PRINTED_4),
        ComparisonRow::half_log("upper term f({a1,a3}) - f({a1})", 1.7378, upper[0], PRINTED),
        ComparisonRow::half_log("upper term f({a2,a3}) - f({a2})", 1.7143, upper[1], PRINTED),
        ComparisonRow::half_log(
            "upper term f({a1,a3}) - f({a1,a2}) + f({a2,a3}) - f({a3})",
            1.6799,
            upper[2],
            PRINTED,
        )
        .annotated(),
        ComparisonRow::half_log("upper limit on d at X", 1.6799, upper_min, PRINTED).annotated(),
        ComparisonRow::half_log("lower term (1-b) f({a3})", 1.7143, lower[0], PRINTED),
        ComparisonRow::half_log(
            "lower term f({a2,a3}) - f({a1,a2}) + (1-b) f({a1})",
            1.6977,
            lower[1],
            PRINTED,
        ),
        ComparisonRow::half_log(
            "lower term f({a1,a3}) - f({a1,a2}) + (1-b) f({a2})",
            1.7232,
            lower[2],
            PRINTED,
        ),
        ComparisonRow::half_log("lower limit on d at X", 1.7232, lower_max, PRINTED),
    ];

    let target = extend(f, m, ExtensionPolicy::TargetB, tol)?;
    rows.push(ComparisonRow::flag(
        "target-b extension",
        "target-infeasible",
        status_name(&target.status).into(),
        matches!(target.status, ExtensionStatus::TargetInfeasible { .. }),
    ));

    let max = extend(f, m, ExtensionPolicy::Max, tol)?;
    let cg = max.achieved_c().unwrap_or(f64::NAN);
    let d = max
        .d_choices()
        .find(|(s, _)| *s == SubsetKey::full(3))
        .map(|(_, d)| d)
        .unwrap_or(f64::NAN);
    rows.push(ComparisonRow::flag(
        "max extension",
        "feasible",
        status_name(&max.status).into(),
        max.is_feasible(),
    ));
    rows.push(ComparisonRow::half_log("slack d at X (max policy)", 1.6799, d, PRINTED).annotated());
    rows.push(ComparisonRow::half_log("g(X) (max policy)", 6.7028, f12 + d, PRINTED).annotated());
    rows.push(ComparisonRow::numeric("c(g) (max policy)", 0.3317, cg, PRINTED).annotated());
    rows.push(ComparisonRow::flag(
        "c(g) (max policy) within [0.300, 0.340]",
        "0.3317",
        format!("{cg:.4}"),
        (0.300..=0.340).contains(&cg),
    ));
    rows.push(ComparisonRow::flag(
        "b(f) <= c(g) < c(f)",
        "0.3001 <= 0.3317 < 0.4509",
        format!("{b:.4} <= {cg:.4} < {c:.4}"),
        b <= cg + tol && cg < c,
    ));

    let search = extend(
        f,
        m,
        ExtensionPolicy::Search {
            resolution: 16,
            width: DEFAULT_BEAM_WIDTH,
        },
        tol,
    )?;
    if let Some(cs) = search.achieved_c() {
        rows.push(ComparisonRow::flag(
            "c(g) (search) within [0.300, 0.340]",
            "0.3317",
            format!("{cs:.4}"),
            (0.300..=0.340).contains(&cs),
        ));
    }

    rows.push(
        ComparisonRow::numeric(
            "uniform bound at c(g) (max policy)",
            0.9172,
            bound_uniform_matroid(cg, 2)?.value,
            PRINTED,
        )
        .annotated(),
    );
    rows.push(ComparisonRow::numeric(
        "uniform bound at c(f)",
        0.8873,
        bound_uniform_matroid(c, 2)?.value,
        PRINTED_4,
    ));
    let g = greedy(f, m, tol)?;
    let o = exact(f, m, ScanMode::Independent, tol)?;
    rows.push(ComparisonRow::numeric(
        "greedy / optimal",
        1.0,
        ratio(g.final_value, o.value).value,
        PRINTED,
    ));
    Ok(rows)
}

fn counterexample_rows(file: &InstanceFile) -> Result<Vec<ComparisonRow>> {
    let inst = file.build()?;
    let (f, m, tol) = (&inst.objective, &inst.matroid, inst.tolerance);
    let poly = check_polymatroid(f, m, EvalDomain::Matroid, tol)?;
    let mut rows = vec![ComparisonRow::flag(
        "polymatroid on the independent sets",
        "yes",
        if poly.passed() { "yes" } else { "no" }.into(),
        poly.passed(),
    )];
    let policies = [
        ExtensionPolicy::Zero,
        ExtensionPolicy::Max,
        ExtensionPolicy::TargetB,
        ExtensionPolicy::Search {
            resolution: 8,
            width: DEFAULT_BEAM_WIDTH,
        },
    ];
    for p in policies {
        let r = extend(f, m, p, tol)?;
        let name = format!("extension ({p} policy)");
        match r.status {
            ExtensionStatus::Infeasible { witness } => {
                rows.push(ComparisonRow::flag(
                    &name,
                    "infeasible",
                    "infeasible".into(),
                    true,
                ));
                let expected = (SubsetKey::full(3), set(&[0, 1]), 1);
                let got = (witness.set, witness.subset, witness.element);
                rows.push(ComparisonRow::flag(
                    &format!("witness (A, B, a) ({p} policy)"),
                    "({1,2,3}, {1,2}, 2)",
                    format!(
                        "({}, {}, {})",
                        inst.ground.render(witness.set),
                        inst.ground.render(witness.subset),
                        inst.ground.label(witness.element)
                    ),
                    got == expected,
                ));
                rows.push(ComparisonRow::numeric(
                    &format!("witness slack ({p} policy)"),
                    -1.0,
                    witness.slack,
                    0.0,
                ));
            }
            other => rows.push(ComparisonRow::flag(
                &name,
                "infeasible",
                status_name(&other).into(),
                false,
            )),
        }
    }
    Ok(rows)
}

fn status_name(s: &ExtensionStatus) -> &'static str {
    match s {
        ExtensionStatus::Feasible => "feasible",
        ExtensionStatus::Infeasible { .. } => "infeasible",
        ExtensionStatus::TargetInfeasible { .. } => "target-infeasible",
    }
}

/// Evaluates `f` on a few sets; handy for spot checks against printed values.
pub fn values_at(f: &SetFunction, sets: &[SubsetKey]) -> Result<Vec<f64>> {
    sets.iter().map(|&s| f.evaluate(s)).collect()
}
