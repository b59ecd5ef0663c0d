//! Total and matroid curvature, the greedy ratio bounds built on them, and
//! certificate assembly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{verify_iff_condition, ExtensionPolicy, ExtensionResult, ExtensionStatus};
use crate::matroid::MatroidOracle;
use crate::objective::SetFunction;
use crate::solver::{exact, greedy, ratio, GreedySolution, OptimalSolution, Ratio, ScanMode};
use crate::subset::SubsetKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureKind {
    /// Marginals at the full ground set; needs the function on every subset.
    Total,
    /// Marginals inside independent sets only.
    Matroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvatureWitness {
    pub element: usize,
    /// Set whose marginal attains the maximum (the full set for total
    /// curvature).
    pub set: SubsetKey,
}

/// Largest curvature term per element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementCurvature {
    pub element: usize,
    pub singleton: Option<f64>,
    /// `None` when the element has zero singleton value or appears in no
    /// scanned set.
    pub term: Option<f64>,
    pub set: Option<SubsetKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub kind: CurvatureKind,
    pub value: f64,
    pub witness: Option<CurvatureWitness>,
    /// No element has a positive singleton value; the curvature is then
    /// reported as 0.
    pub degenerate: bool,
    pub details: Vec<ElementCurvature>,
}

/// `1 - (f(A) - f(A - j)) / (f({j}) - f(∅))`.
pub fn curvature_term(f: &SetFunction, set: SubsetKey, element: usize) -> Result<f64> {
    let single = f.evaluate(SubsetKey::singleton(element))? - f.evaluate(SubsetKey::EMPTY)?;
    let marginal = f.evaluate(set)? - f.evaluate(set.without(element))?;
    Ok(1.0 - marginal / single)
}

pub(crate) fn total_curvature_with(
    n: usize,
    eval: impl Fn(SubsetKey) -> Result<f64>,
    tol: f64,
) -> Result<CurvatureReport> {
    let full = SubsetKey::full(n);
    let empty = eval(SubsetKey::EMPTY)?;
    let top = eval(full)?;
    let mut value = f64::NEG_INFINITY;
    let mut witness = None;
    let mut details = Vec::with_capacity(n);
    for j in 0..n {
        let single = eval(SubsetKey::singleton(j))? - empty;
        let term = if single > tol {
            let t = 1.0 - (top - eval(full.without(j))?) / single;
            if t > value {
                value = t;
                witness = Some(CurvatureWitness {
                    element: j,
                    set: full,
                });
            }
            Some(t)
        } else {
            None
        };
        details.push(ElementCurvature {
            element: j,
            singleton: Some(single),
            term,
            set: term.map(|_| full),
        });
    }
    let degenerate = witness.is_none();
    Ok(CurvatureReport {
        kind: CurvatureKind::Total,
        value: if degenerate { 0.0 } else { value },
        witness,
        degenerate,
        details,
    })
}

/// Total curvature: the largest relative drop of an element's marginal from
/// the empty set to the rest of the ground set. Elements whose singleton
/// value is within `tol` of zero are skipped.
pub fn total_curvature(f: &SetFunction, tol: f64) -> Result<CurvatureReport> {
    if !f.is_total() {
        return Err(Error::NotTotal);
    }
    total_curvature_with(f.ground_size(), |s| f.evaluate(s), tol)
}

/// Matroid curvature: like total curvature, but the marginal of `j` is taken
/// inside every independent set containing `j` (or every base, with
/// [`ScanMode::Bases`]).
pub fn matroid_curvature(
    f: &SetFunction,
    m: &MatroidOracle,
    mode: ScanMode,
    tol: f64,
) -> Result<CurvatureReport> {
    let n = m.ground_size();
    let sets = match mode {
        ScanMode::Independent => m.enumerate_independent()?,
        ScanMode::Bases => m.bases()?,
    };
    let empty = f.evaluate(SubsetKey::EMPTY)?;
    // A singleton is independent whenever some independent set contains it.
    let mut singles: Vec<Option<f64>> = vec![None; n];
    for (j, single) in singles.iter_mut().enumerate() {
        let s = SubsetKey::singleton(j);
        if m.contains(s) {
            *single = Some(f.evaluate(s)? - empty);
        }
    }
    let mut details: Vec<ElementCurvature> = (0..n)
        .map(|j| ElementCurvature {
            element: j,
            singleton: singles[j],
            term: None,
            set: None,
        })
        .collect();
    let mut value = f64::NEG_INFINITY;
    let mut witness = None;
    for &a in sets {
        let fa = f.evaluate(a)?;
        for j in a.elements() {
            let Some(single) = singles[j].filter(|s| *s > tol) else {
                continue;
            };
            let t = 1.0 - (fa - f.evaluate(a.without(j))?) / single;
            let d = &mut details[j];
            if d.term.is_none_or(|cur| t > cur) {
                d.term = Some(t);
                d.set = Some(a);
            }
            if t > value {
                value = t;
                witness = Some(CurvatureWitness { element: j, set: a });
            }
        }
    }
    let degenerate = witness.is_none();
    Ok(CurvatureReport {
        kind: CurvatureKind::Matroid,
        value: if degenerate { 0.0 } else { value },
        witness,
        degenerate,
        details,
    })
}

fn checked_curvature(c: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if c.is_nan() || !(-SLACK..=1.0 + SLACK).contains(&c) {
        Err(Error::InvalidCurvature(c))
    } else {
        Ok(c.clamp(0.0, 1.0))
    }
}

/// `1 / (1 + c)`: greedy guarantee on any matroid.
pub fn bound_general_matroid(c: f64) -> Result<f64> {
    Ok(1.0 / (1.0 + checked_curvature(c)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformBound {
    /// `(1 - (1 - c/K)^K) / c`.
    pub value: f64,
    /// `(1 - e^{-c}) / c`, the limit as `K` grows.
    pub limit: f64,
}

/// Greedy guarantee on a uniform matroid of rank `k`; both values are 1 at
/// `c = 0`.
pub fn bound_uniform_matroid(c: f64, k: usize) -> Result<UniformBound> {
    let c = checked_curvature(c)?;
    if k == 0 {
        return Err(Error::InvalidParameter(
            "uniform rank must be at least 1".into(),
        ));
    }
    if c == 0.0 {
        return Ok(UniformBound {
            value: 1.0,
            limit: 1.0,
        });
    }
    let k = k as f64;
    // 1 - (1 - c/k)^k computed without cancellation for tiny c.
    Ok(UniformBound {
        value: -(k * (-c / k).ln_1p()).exp_m1() / c,
        limit: -(-c).exp_m1() / c,
    })
}

/// Which curvature a bound is evaluated at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum CurvatureSource {
    /// `c(f)`; requires `f` on the whole power set.
    Total,
    /// `c(g)` of a polymatroid extension built with `policy`; an upper bound
    /// on the infimum over all extensions.
    Extension { policy: ExtensionPolicy },
    /// `b(f)`; requires an extension whose total curvature equals `b(f)`.
    Matroid,
}

impl fmt::Display for CurvatureSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvatureSource::Total => f.write_str("total curvature c(f)"),
            CurvatureSource::Extension { policy } => {
                write!(f, "extension curvature c(g), {policy} policy")
            }
            CurvatureSource::Matroid => f.write_str("matroid curvature b(f)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    GeneralMatroid,
    UniformMatroid,
}

impl ConstraintKind {
    pub fn formula(self) -> &'static str {
        match self {
            ConstraintKind::GeneralMatroid => "1/(1+x)",
            ConstraintKind::UniformMatroid => "(1-(1-x/K)^K)/x",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub source: CurvatureSource,
    pub constraint: ConstraintKind,
    pub formula: String,
    pub curvature: Option<f64>,
    pub value: Option<f64>,
    /// `(1 - e^{-x})/x` companion for uniform-matroid bounds.
    pub limit: Option<f64>,
    pub applicable: bool,
    pub note: Option<String>,
    /// Whether the observed ratio respects the bound (exact solve only).
    pub satisfied: Option<bool>,
}

/// Summary of one extension attempt inside a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionSummary {
    pub policy: ExtensionPolicy,
    pub status: ExtensionStatus,
    pub achieved_c: Option<f64>,
    /// Whether `c(g) = b(f)` was verified for this extension.
    pub matches_matroid_curvature: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub total_curvature: Option<CurvatureReport>,
    pub matroid_curvature: CurvatureReport,
    pub extensions: Vec<ExtensionSummary>,
    pub bounds: Vec<BoundEntry>,
    pub greedy: GreedySolution,
    pub optimal: Option<OptimalSolution>,
    pub ratio: Option<Ratio>,
}

impl BoundCertificate {
    pub fn applicable(&self) -> impl Iterator<Item = &BoundEntry> {
        self.bounds.iter().filter(|b| b.applicable)
    }

    /// Strongest applicable bound.
    pub fn best_bound(&self) -> Option<f64> {
        self.applicable().filter_map(|b| b.value).reduce(f64::max)
    }

    /// False when some applicable bound exceeds the observed ratio.
    pub fn all_satisfied(&self) -> bool {
        self.applicable().all(|b| b.satisfied != Some(false))
    }
}

fn entries_for(
    source: CurvatureSource,
    curvature: Option<f64>,
    uniform_rank: Option<usize>,
    unavailable: Option<&str>,
    note: Option<String>,
) -> Result<Vec<BoundEntry>> {
    let mut out = Vec::new();
    for constraint in [
        ConstraintKind::GeneralMatroid,
        ConstraintKind::UniformMatroid,
    ] {
        let mut entry = BoundEntry {
            source: source.clone(),
            constraint,
            formula: constraint.formula().to_string(),
            curvature,
            value: None,
            limit: None,
            applicable: false,
            note: note.clone(),
            satisfied: None,
        };
        if constraint == ConstraintKind::UniformMatroid && uniform_rank.is_none() {
            entry.note = Some("not applicable: the matroid is not uniform".into());
            out.push(entry);
            continue;
        }
        match (curvature, unavailable) {
            (Some(c), None) => {
                entry.applicable = true;
                match constraint {
                    ConstraintKind::GeneralMatroid => entry.value = Some(bound_general_matroid(c)?),
                    ConstraintKind::UniformMatroid => {
                        let k = uniform_rank.expect("checked above");
                        let u = bound_uniform_matroid(c, k)?;
                        entry.value = Some(u.value);
                        entry.limit = Some(u.limit);
                        entry.formula = format!("(1-(1-x/{k})^{k})/x");
                    }
                }
            }
            (_, reason) => {
                entry.note = Some(format!(
                    "not applicable: {}",
                    reason.unwrap_or("curvature unavailable")
                ));
            }
        }
        out.push(entry);
    }
    Ok(out)
}

/// Assembles every bound whose hypotheses the instance meets.
///
/// Total-curvature bounds need `f` on the power set; extension bounds are
/// emitted per feasible extension; matroid-curvature bounds need some
/// extension verified to have `c(g) = b(f)`; uniform-matroid formulas need a
/// uniform matroid. With `run_exact` the optimum and ratio are computed and
/// each applicable bound is checked against the ratio.
pub fn build_certificate(
    f: &SetFunction,
    m: &MatroidOracle,
    extensions: &[ExtensionResult],
    run_exact: bool,
    tol: f64,
) -> Result<BoundCertificate> {
    let total = if f.is_total() {
        Some(total_curvature(f, tol)?)
    } else {
        None
    };
    let matroid = matroid_curvature(f, m, ScanMode::Independent, tol)?;
    let b = matroid.value;
    let k = m.uniform_rank();

    let mut bounds = entries_for(
        CurvatureSource::Total,
        total.as_ref().map(|c| c.value),
        k,
        (!f.is_total()).then_some("the objective is defined on the independent sets only"),
        None,
    )?;

    let mut summaries = Vec::new();
    let mut b_verified = false;
    for ext in extensions {
        let matches = match ext.g() {
            Some(g) if ext.is_feasible() => Some(verify_iff_condition(&g, b, tol)?.holds),
            _ => None,
        };
        b_verified |= matches == Some(true);
        summaries.push(ExtensionSummary {
            policy: ext.policy,
            status: ext.status.clone(),
            achieved_c: ext.achieved_c(),
            matches_matroid_curvature: matches,
        });
        if ext.is_feasible() {
            bounds.extend(entries_for(
                CurvatureSource::Extension { policy: ext.policy },
                ext.achieved_c(),
                k,
                None,
                Some(format!(
                    "upper bound on the infimum over all extensions, achieved by the {} policy",
                    ext.policy
                )),
            )?);
        }
    }

    let b_reason = if b_verified {
        None
    } else if extensions.iter().any(|e| {
        e.policy == ExtensionPolicy::TargetB
            && matches!(e.status, ExtensionStatus::TargetInfeasible { .. })
    }) {
        Some("no slack at the full set both keeps g polymatroid and makes c(g) = b(f)")
    } else if extensions.is_empty() {
        Some("no extension was built, so c(g) = b(f) is unverified")
    } else {
        Some("no extension with c(g) = b(f) was found")
    };
    bounds.extend(entries_for(
        CurvatureSource::Matroid,
        Some(b),
        k,
        b_reason,
        None,
    )?);

    let greedy_solution = greedy(f, m, tol)?;
    let (optimal, observed) = if run_exact {
        let o = exact(f, m, ScanMode::Independent, tol)?;
        let r = ratio(greedy_solution.final_value, o.value);
        (Some(o), Some(r))
    } else {
        (None, None)
    };
    if let Some(r) = observed {
        for entry in bounds.iter_mut().filter(|e| e.applicable) {
            entry.satisfied = entry.value.map(|v| r.value >= v - tol);
        }
    }

    Ok(BoundCertificate {
        total_curvature: total,
        matroid_curvature: matroid,
        extensions: summaries,
        bounds,
        greedy: greedy_solution,
        optimal,
        ratio: observed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::extend;
    use crate::objective::DEFAULT_TOLERANCE as TOL;

    fn task_4() -> SetFunction {
        SetFunction::task_scheduling(vec![vec![0.4, 0.6, 0.8, 0.9]]).unwrap()
    }

    fn sensing_3() -> SetFunction {
        SetFunction::info_gain(vec![0.5, 0.6, 0.8]).unwrap()
    }

    #[test]
    fn total_curvature_examples() {
        let c = total_curvature(&task_4(), TOL).unwrap();
        assert!((c.value - 0.992).abs() < 1e-12);
        assert_eq!(c.witness.unwrap().element, 0);

        let c = total_curvature(&sensing_3(), TOL).unwrap();
        assert!((c.value - 0.4509).abs() < 5e-4);
        assert_eq!(c.witness.unwrap().element, 2);

        let add = SetFunction::additive(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(total_curvature(&add, TOL).unwrap().value.abs() < 1e-15);
    }

    #[test]
    fn total_curvature_needs_total_function() {
        let m = MatroidOracle::uniform(4, 2).unwrap();
        let f = task_4().restrict_to(&m).unwrap();
        assert!(matches!(total_curvature(&f, TOL), Err(Error::NotTotal)));
    }

    #[test]
    fn matroid_curvature_examples() {
        let m = MatroidOracle::uniform(4, 2).unwrap();
        let b = matroid_curvature(&task_4(), &m, ScanMode::Independent, TOL).unwrap();
        assert!((b.value - 0.9).abs() < 1e-12);

        let restricted = task_4().restrict_to(&m).unwrap();
        let b2 = matroid_curvature(&restricted, &m, ScanMode::Independent, TOL).unwrap();
        assert_eq!(b.value, b2.value);

        let m3 = MatroidOracle::uniform(3, 2).unwrap();
        let b = matroid_curvature(&sensing_3(), &m3, ScanMode::Bases, TOL).unwrap();
        assert!((b.value - 0.3001).abs() < 5e-4);

        let add = SetFunction::additive(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(
            matroid_curvature(&add, &m3, ScanMode::Independent, TOL)
                .unwrap()
                .value
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn witness_reproduces_value() {
        let m = MatroidOracle::uniform(3, 2).unwrap();
        let f = sensing_3();
        let b = matroid_curvature(&f, &m, ScanMode::Independent, TOL).unwrap();
        let w = b.witness.unwrap();
        assert!((curvature_term(&f, w.set, w.element).unwrap() - b.value).abs() < 1e-12);
        let c = total_curvature(&f, TOL).unwrap();
        let w = c.witness.unwrap();
        assert!((curvature_term(&f, w.set, w.element).unwrap() - c.value).abs() < 1e-12);
    }

    #[test]
    fn degenerate_function() {
        let zero = SetFunction::additive(vec![0.0, 0.0]).unwrap();
        let c = total_curvature(&zero, TOL).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.value, 0.0);
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(bound_general_matroid(1.0).unwrap(), 0.5);
        assert_eq!(bound_general_matroid(0.0).unwrap(), 1.0);
        assert!((bound_general_matroid(0.992).unwrap() - 1.0 / 1.992).abs() < 1e-15);
        assert!(bound_general_matroid(1.5).is_err());
        assert!(bound_general_matroid(-0.1).is_err());

        assert!((bound_uniform_matroid(0.9, 2).unwrap().value - 0.775).abs() < 1e-12);
        assert!((bound_uniform_matroid(0.992, 2).unwrap().value - 0.752).abs() < 1e-12);
        assert!((bound_uniform_matroid(0.3317, 2).unwrap().value - 0.9172).abs() < 5e-4);
        assert_eq!(bound_uniform_matroid(0.0, 3).unwrap().value, 1.0);
        assert!(bound_uniform_matroid(0.5, 0).is_err());
    }

    #[test]
    fn uniform_bound_is_stable_near_zero() {
        // Round-off curvature from a coverage table; the naive formula
        // returns 4/3 here.
        for c in [3.33e-16, 1e-12, 1e-8] {
            for k in 2..=10 {
                let u = bound_uniform_matroid(c, k).unwrap();
                assert!(
                    u.value <= 1.0 && u.value > 1.0 - c,
                    "c={c} k={k}: {}",
                    u.value
                );
                assert!(u.limit <= 1.0 && u.limit > 1.0 - c);
            }
        }
    }

    #[test]
    fn certificate_task_scheduling() {
        let m = MatroidOracle::uniform(4, 2).unwrap();
        let ext = extend(&task_4(), &m, ExtensionPolicy::TargetB, TOL).unwrap();
        let cert = build_certificate(&task_4(), &m, &[ext], true, TOL).unwrap();
        let find = |src: &CurvatureSource, k: ConstraintKind| {
            cert.bounds
                .iter()
                .find(|b| &b.source == src && b.constraint == k)
                .unwrap()
                .clone()
        };
        let b_bound = find(&CurvatureSource::Matroid, ConstraintKind::UniformMatroid);
        assert!(b_bound.applicable);
        assert!((b_bound.value.unwrap() - 0.775).abs() < 1e-9);
        let old = find(&CurvatureSource::Total, ConstraintKind::UniformMatroid);
        assert!((old.value.unwrap() - 0.752).abs() < 1e-9);
        assert_eq!(cert.ratio.unwrap().value, 1.0);
        assert!(cert.all_satisfied());
    }

    #[test]
    fn certificate_sensing_marks_b_bound_unavailable() {
        let m = MatroidOracle::uniform(3, 2).unwrap();
        let exts: Vec<_> = [ExtensionPolicy::Max, ExtensionPolicy::TargetB]
            .into_iter()
            .map(|p| extend(&sensing_3(), &m, p, TOL).unwrap())
            .collect();
        let cert = build_certificate(&sensing_3(), &m, &exts, true, TOL).unwrap();
        assert!(cert
            .bounds
            .iter()
            .filter(|b| b.source == CurvatureSource::Matroid)
            .all(|b| !b.applicable));
        assert!(cert
            .bounds
            .iter()
            .any(|b| b.applicable && matches!(b.source, CurvatureSource::Extension { .. })));
        let old = cert
            .bounds
            .iter()
            .find(|b| {
                b.source == CurvatureSource::Total && b.constraint == ConstraintKind::UniformMatroid
            })
            .unwrap();
        assert!((old.value.unwrap() - 0.8873).abs() < 5e-4);
    }

    #[test]
    fn certificate_additive() {
        let f = SetFunction::additive(vec![3.0, 2.0, 1.0]).unwrap();
        let m = MatroidOracle::uniform(3, 2).unwrap();
        let cert = build_certificate(&f, &m, &[], true, TOL).unwrap();
        assert!(cert.applicable().all(|b| b.value == Some(1.0)));
        assert_eq!(cert.ratio.unwrap().value, 1.0);
    }

    #[test]
    fn matroid_only_certificate_omits_total_bounds() {
        let m = MatroidOracle::uniform(4, 2).unwrap();
        let f = task_4().restrict_to(&m).unwrap();
        let cert = build_certificate(&f, &m, &[], false, TOL).unwrap();
        assert!(cert.total_curvature.is_none());
        assert!(cert
            .bounds
            .iter()
            .filter(|b| b.source == CurvatureSource::Total)
            .all(|b| !b.applicable));
    }
}
