//! Command reports: assembly, JSON / text rendering and exit codes.
//!
//! Every report starts with a [`Header`] echoing the instance. Sets are
//! rendered as label arrays in ground-set order. JSON output rounds floats to
//! 12 significant digits; instance files keep full precision.

use serde::Serialize;
use serde_json::Value;

use crate::curvature::{
    build_certificate, matroid_curvature, total_curvature, BoundEntry, CurvatureKind,
    CurvatureReport,
};
use crate::error::{Error, Result};
use crate::extension::{
    extend, verify_extension, verify_iff_condition, ExtensionPolicy, ExtensionResult,
    ExtensionStatus, FeasibilityWitness, SEARCH_CAP,
};
use crate::instance::{Instance, InstanceFile, MatroidRecord};
use crate::matroid::verify_matroid_axioms;
use crate::objective::{check_polymatroid, PolymatroidReport};
use crate::reproduce::{known_annotations, Annotation};
use crate::solver::{
    all_greedy_solutions, exact, greedy, ratio, GreedySolution, Ratio, ScanMode, TiePolicy,
};
use crate::subset::{check_enumerable, GroundSet, SubsetKey, ENUMERATION_CAP};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Process exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok = 0,
    InputError = 1,
    /// The command ran and found a violation or an infeasibility.
    Finding = 2,
    SizeCap = 3,
}

impl Outcome {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn for_error(e: &Error) -> Outcome {
        match e {
            Error::SizeCap { .. } => Outcome::SizeCap,
            _ => Outcome::InputError,
        }
    }
}

pub trait Report: Serialize {
    /// True when the report records a finding (exit status 2).
    fn finding(&self) -> bool;

    /// Hand-written text form; the generic outline is used when absent.
    fn text(&self) -> Option<String> {
        None
    }

    fn outcome(&self) -> Outcome {
        if self.finding() {
            Outcome::Finding
        } else {
            Outcome::Ok
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub command: String,
    pub instance_id: String,
    pub instance_hash: String,
    pub elements: usize,
    pub matroid: String,
    pub objective: String,
    pub tolerance: f64,
}

impl Header {
    pub fn new(command: &str, inst: &Instance) -> Self {
        Header::from_file(command, &inst.file, inst.tolerance, inst.id.clone())
    }

    fn from_file(command: &str, file: &InstanceFile, tolerance: f64, id: String) -> Self {
        Header {
            command: command.into(),
            instance_id: id,
            instance_hash: file.hash(),
            elements: file.ground_set.len(),
            matroid: file.matroid.kind().into(),
            objective: file.objective.kind().into(),
            tolerance,
        }
    }
}

// ---------------------------------------------------------------- rendering

fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// The report as a JSON value with every float rounded.
pub fn to_value<R: Serialize>(report: &R) -> Value {
    let mut v = serde_json::to_value(report).expect("reports always serialize");
    round_value(&mut v);
    v
}

pub fn render<R: Report>(report: &R, format: Format) -> String {
    if format == Format::Text {
        if let Some(t) = report.text() {
            return t;
        }
    }
    let v = to_value(report);
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&v).expect("values always serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            write_text(&v, 0, &mut out);
            out
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            Some(format!(
                "[{}]",
                items
                    .iter()
                    .filter_map(scalar)
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        }
        _ => None,
    }
}

fn write_text(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_text(item, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write_text(item, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

// ---------------------------------------------------------------- views

fn labels(ground: &GroundSet, s: SubsetKey) -> Vec<String> {
    ground.labels_of(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneView {
    pub smaller: Vec<String>,
    pub larger: Vec<String>,
    pub smaller_value: f64,
    pub larger_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmodularView {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub element: String,
    pub gain_at_a: f64,
    pub gain_at_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolymatroidView {
    pub domain: String,
    pub passed: bool,
    pub empty_value: f64,
    pub monotone_violation: Option<MonotoneView>,
    pub submodular_violation: Option<SubmodularView>,
}

impl PolymatroidView {
    pub fn new(ground: &GroundSet, domain: &str, r: &PolymatroidReport) -> Self {
        PolymatroidView {
            domain: domain.into(),
            passed: r.passed(),
            empty_value: r.empty_value,
            monotone_violation: r.monotone.as_ref().map(|w| MonotoneView {
                smaller: labels(ground, w.smaller),
                larger: labels(ground, w.larger),
                smaller_value: w.smaller_value,
                larger_value: w.larger_value,
            }),
            submodular_violation: r.submodular.as_ref().map(|w| SubmodularView {
                a: labels(ground, w.a),
                b: labels(ground, w.b),
                element: ground.label(w.element).into(),
                gain_at_a: w.gain_at_a,
                gain_at_b: w.gain_at_b,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomView {
    pub passed: bool,
    /// A listed set and one of its subsets that is missing.
    pub hereditary_violation: Option<(Vec<String>, Vec<String>)>,
    /// A smaller and a larger listed set such that no element of the larger
    /// one extends the smaller one.
    pub augmentation_violation: Option<(Vec<String>, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyView {
    pub picks: Vec<String>,
    pub trace: Vec<f64>,
    pub set: Vec<String>,
    pub value: f64,
}

impl GreedyView {
    pub fn new(ground: &GroundSet, g: &GreedySolution) -> Self {
        GreedyView {
            picks: g
                .picks
                .iter()
                .map(|&p| ground.label(p).to_string())
                .collect(),
            trace: g.values.clone(),
            set: labels(ground, g.set()),
            value: g.final_value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalView {
    pub set: Vec<String>,
    pub value: f64,
    pub all_optima: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessView {
    pub element: String,
    pub set: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureView {
    pub kind: CurvatureKind,
    pub defined: bool,
    pub value: Option<f64>,
    pub witness: Option<WitnessView>,
    pub degenerate: bool,
    pub note: Option<String>,
}

pub const NOT_TOTAL_NOTE: &str = "not defined: the objective lives on the independent sets only";

impl CurvatureView {
    pub fn new(ground: &GroundSet, r: &CurvatureReport) -> Self {
        CurvatureView {
            kind: r.kind,
            defined: true,
            value: Some(r.value),
            witness: r.witness.map(|w| WitnessView {
                element: ground.label(w.element).into(),
                set: labels(ground, w.set),
            }),
            degenerate: r.degenerate,
            note: r
                .degenerate
                .then(|| "no element has a positive singleton value; reported as 0".into()),
        }
    }

    pub fn undefined() -> Self {
        CurvatureView {
            kind: CurvatureKind::Total,
            defined: false,
            value: None,
            witness: None,
            degenerate: false,
            note: Some(NOT_TOTAL_NOTE.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityWitnessView {
    pub set: Vec<String>,
    pub subset: Vec<String>,
    pub element: String,
    pub slack: f64,
}

impl FeasibilityWitnessView {
    pub fn new(ground: &GroundSet, w: &FeasibilityWitness) -> Self {
        FeasibilityWitnessView {
            set: labels(ground, w.set),
            subset: labels(ground, w.subset),
            element: ground.label(w.element).into(),
            slack: w.slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum StatusView {
    Feasible,
    Infeasible {
        witness: FeasibilityWitnessView,
    },
    TargetInfeasible {
        set: Vec<String>,
        lower: f64,
        upper: f64,
    },
}

impl StatusView {
    pub fn new(ground: &GroundSet, s: &ExtensionStatus) -> Self {
        match s {
            ExtensionStatus::Feasible => StatusView::Feasible,
            ExtensionStatus::Infeasible { witness } => StatusView::Infeasible {
                witness: FeasibilityWitnessView::new(ground, witness),
            },
            ExtensionStatus::TargetInfeasible { set, lower, upper } => {
                StatusView::TargetInfeasible {
                    set: labels(ground, *set),
                    lower: *lower,
                    upper: *upper,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerView {
    pub set: Vec<String>,
    pub bstar: Vec<String>,
    pub lower: f64,
    /// Absent when no constraint bounds the slack from above.
    pub upper: Option<f64>,
    pub d: Option<f64>,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IffView {
    pub holds: bool,
    pub target: f64,
    pub terms: Vec<IffTermView>,
    pub equality_at: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IffTermView {
    pub element: String,
    pub marginal: f64,
    pub required: f64,
    pub normalized_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationView {
    pub passed: bool,
    pub agrees_on_matroid: bool,
    pub polymatroid: PolymatroidView,
    pub greedy_picks_f: Vec<String>,
    pub greedy_picks_g: Vec<String>,
    pub optimal_f: f64,
    pub optimal_g: f64,
    pub curvature_floor_holds: bool,
    pub min_slack: Option<FeasibilityWitnessView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionBlock {
    pub policy: String,
    pub origin: Option<String>,
    pub status: StatusView,
    pub matroid_curvature: f64,
    pub achieved_c: Option<f64>,
    pub layers: Vec<LayerView>,
    pub iff: Option<IffView>,
    pub verification: Option<VerificationView>,
}

impl ExtensionBlock {
    pub fn new(
        ground: &GroundSet,
        r: &ExtensionResult,
        f: &crate::objective::SetFunction,
        m: &crate::matroid::MatroidOracle,
        tol: f64,
    ) -> Result<Self> {
        let label_list = |v: &[usize]| {
            v.iter()
                .map(|&e| ground.label(e).to_string())
                .collect::<Vec<_>>()
        };
        let layers = r
            .layers
            .iter()
            .map(|l| LayerView {
                set: labels(ground, l.set),
                bstar: labels(ground, l.bstar),
                lower: l.lower,
                upper: l.upper,
                d: l.d,
                value: r.table().get(l.set).ok(),
            })
            .collect();
        let (iff, verification) = match r.g().filter(|_| r.is_feasible()) {
            Some(g) => {
                let iff = verify_iff_condition(&g, r.matroid_curvature, tol)?;
                let v = verify_extension(r, f, m, tol)?;
                (
                    Some(IffView {
                        holds: iff.holds,
                        target: r.matroid_curvature,
                        terms: iff
                            .terms
                            .iter()
                            .map(|t| IffTermView {
                                element: ground.label(t.element).into(),
                                marginal: t.marginal,
                                required: t.required,
                                normalized_gap: t.normalized_gap,
                            })
                            .collect(),
                        equality_at: label_list(&iff.equality_at),
                    }),
                    Some(VerificationView {
                        passed: v.passed(),
                        agrees_on_matroid: v.agrees(),
                        polymatroid: PolymatroidView::new(ground, "power_set", &v.polymatroid),
                        greedy_picks_f: label_list(&v.greedy_picks_f),
                        greedy_picks_g: label_list(&v.greedy_picks_g),
                        optimal_f: v.optimal_f,
                        optimal_g: v.optimal_g,
                        curvature_floor_holds: v.curvature_floor_holds(),
                        min_slack: v
                            .min_slack
                            .as_ref()
                            .map(|w| FeasibilityWitnessView::new(ground, w)),
                    }),
                )
            }
            None => (None, None),
        };
        Ok(ExtensionBlock {
            policy: r.policy.to_string(),
            origin: r.origin.clone(),
            status: StatusView::new(ground, &r.status),
            matroid_curvature: r.matroid_curvature,
            achieved_c: r.achieved_c(),
            layers,
            iff,
            verification,
        })
    }

    fn verification_failed(&self) -> bool {
        self.verification.as_ref().is_some_and(|v| !v.passed)
    }
}

// ---------------------------------------------------------------- validate

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateReport {
    pub header: Header,
    pub passed: bool,
    pub matroid_axioms: Option<AxiomView>,
    /// Absent when the matroid itself is invalid.
    pub polymatroid: Option<PolymatroidView>,
}

impl Report for ValidateReport {
    fn finding(&self) -> bool {
        !self.passed
    }
}

/// Checks the matroid axioms (explicit families) and the polymatroid
/// properties on the objective's declared domain.
pub fn run_validate(file: &InstanceFile) -> Result<ValidateReport> {
    let tolerance = file
        .tolerance
        .unwrap_or(crate::objective::DEFAULT_TOLERANCE);
    let axioms = match &file.matroid {
        MatroidRecord::Explicit { independent_sets } => {
            let ground = GroundSet::new(file.ground_set.iter().cloned())?;
            check_enumerable(ground.len())?;
            let family = independent_sets
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    ground.subset(s).map_err(|e| Error::Instance {
                        context: format!("matroid.independent_sets[{i}]"),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let r = verify_matroid_axioms(&family, ground.len())?;
            let pair = |(a, b): (SubsetKey, SubsetKey)| (labels(&ground, a), labels(&ground, b));
            Some(AxiomView {
                passed: r.passed(),
                hereditary_violation: r.hereditary_violation.map(pair),
                augmentation_violation: r.augmentation_violation.map(pair),
            })
        }
        _ => None,
    };
    if let Some(a) = axioms.as_ref().filter(|a| !a.passed) {
        let id = file
            .id
            .clone()
            .unwrap_or_else(|| format!("instance-{}", &file.hash()[..12]));
        return Ok(ValidateReport {
            header: Header::from_file("validate", file, tolerance, id),
            passed: false,
            matroid_axioms: Some(a.clone()),
            polymatroid: None,
        });
    }
    let inst = file.build()?;
    let domain = inst.objective.domain();
    let poly = check_polymatroid(&inst.objective, &inst.matroid, domain, inst.tolerance)?;
    let domain_name = match domain {
        crate::objective::EvalDomain::Matroid => "matroid",
        crate::objective::EvalDomain::PowerSet => "power_set",
    };
    Ok(ValidateReport {
        header: Header::new("validate", &inst),
        passed: poly.passed(),
        matroid_axioms: axioms,
        polymatroid: Some(PolymatroidView::new(&inst.ground, domain_name, &poly)),
    })
}

// ---------------------------------------------------------------- solve

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub header: Header,
    pub tie: TiePolicy,
    pub greedy: GreedyView,
    /// Every distinct greedy set under `enumerate-all`.
    pub greedy_alternatives: Option<Vec<GreedyView>>,
    pub optimal: Option<OptimalView>,
    pub ratio: Option<Ratio>,
    /// Worst ratio over the greedy alternatives.
    pub worst_ratio: Option<Ratio>,
}

impl Report for SolveReport {
    fn finding(&self) -> bool {
        false
    }
}

pub fn run_solve(inst: &Instance, run_exact: bool, tie: TiePolicy) -> Result<SolveReport> {
    let (f, m, tol) = (&inst.objective, &inst.matroid, inst.tolerance);
    if run_exact {
        check_enumerable(m.ground_size())?;
    }
    let g = greedy(f, m, tol)?;
    let alternatives = match tie {
        TiePolicy::MinIndex => None,
        TiePolicy::EnumerateAll => Some(all_greedy_solutions(f, m, tol)?),
    };
    let (optimal, r, worst) = if run_exact {
        let o = exact(f, m, ScanMode::Independent, tol)?;
        let r = ratio(g.final_value, o.value);
        let worst = alternatives.as_ref().map(|alts| {
            let low = alts
                .iter()
                .map(|a| a.final_value)
                .fold(f64::INFINITY, f64::min);
            ratio(low, o.value)
        });
        let view = OptimalView {
            set: labels(&inst.ground, o.set),
            value: o.value,
            all_optima: o
                .all_optima
                .iter()
                .map(|&s| labels(&inst.ground, s))
                .collect(),
        };
        (Some(view), Some(r), worst)
    } else {
        (None, None, None)
    };
    Ok(SolveReport {
        header: Header::new("solve", inst),
        tie,
        greedy: GreedyView::new(&inst.ground, &g),
        greedy_alternatives: alternatives.map(|alts| {
            alts.iter()
                .map(|a| GreedyView::new(&inst.ground, a))
                .collect()
        }),
        optimal,
        ratio: r,
        worst_ratio: worst,
    })
}

// ---------------------------------------------------------------- curvature

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureSummary {
    pub header: Header,
    pub total: CurvatureView,
    pub matroid: CurvatureView,
}

impl Report for CurvatureSummary {
    fn finding(&self) -> bool {
        false
    }
}

pub fn run_curvature(inst: &Instance) -> Result<CurvatureSummary> {
    let f = &inst.objective;
    let total = if f.is_total() {
        CurvatureView::new(&inst.ground, &total_curvature(f, inst.tolerance)?)
    } else {
        CurvatureView::undefined()
    };
    let b = matroid_curvature(f, &inst.matroid, ScanMode::Independent, inst.tolerance)?;
    Ok(CurvatureSummary {
        header: Header::new("curvature", inst),
        total,
        matroid: CurvatureView::new(&inst.ground, &b),
    })
}

// ---------------------------------------------------------------- extend

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendReport {
    pub header: Header,
    pub extension: ExtensionBlock,
    pub annotations: Vec<Annotation>,
}

impl Report for ExtendReport {
    fn finding(&self) -> bool {
        !matches!(self.extension.status, StatusView::Feasible)
            || self.extension.verification_failed()
    }
}

/// Search policy over `resolution` grid points with the default beam width.
pub fn search_policy(resolution: usize) -> ExtensionPolicy {
    ExtensionPolicy::Search {
        resolution,
        width: crate::extension::DEFAULT_BEAM_WIDTH,
    }
}

fn policy_annotations(file: &InstanceFile, policy: &str) -> Vec<Annotation> {
    known_annotations(file)
        .into_iter()
        .filter(|a| a.policy.as_deref().is_none_or(|p| p == policy))
        .collect()
}

pub fn run_extend(inst: &Instance, policy: ExtensionPolicy) -> Result<ExtendReport> {
    check_enumerable(inst.ground.len())?;
    let r = extend(&inst.objective, &inst.matroid, policy, inst.tolerance)?;
    let block = ExtensionBlock::new(
        &inst.ground,
        &r,
        &inst.objective,
        &inst.matroid,
        inst.tolerance,
    )?;
    Ok(ExtendReport {
        header: Header::new("extend", inst),
        annotations: policy_annotations(&inst.file, &r.policy.to_string()),
        extension: block,
    })
}

// ---------------------------------------------------------------- certify

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundView {
    pub curvature_source: String,
    pub constraint: String,
    pub formula: String,
    pub curvature: Option<f64>,
    pub value: Option<f64>,
    pub limit: Option<f64>,
    pub applicable: bool,
    pub note: Option<String>,
    pub satisfied_by_ratio: Option<bool>,
}

impl From<&BoundEntry> for BoundView {
    fn from(b: &BoundEntry) -> Self {
        BoundView {
            curvature_source: b.source.to_string(),
            constraint: serde_json::to_value(b.constraint)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            formula: b.formula.clone(),
            curvature: b.curvature,
            value: b.value,
            limit: b.limit,
            applicable: b.applicable,
            note: b.note.clone(),
            satisfied_by_ratio: b.satisfied,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverBlock {
    pub greedy: GreedyView,
    pub optimal: Option<OptimalView>,
    pub ratio: Option<Ratio>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub header: Header,
    pub validation: PolymatroidView,
    pub solver: SolverBlock,
    pub curvature: CurvatureBlock,
    pub extensions: Vec<ExtensionBlock>,
    pub bounds: Vec<BoundView>,
    pub best_bound: Option<f64>,
    pub all_bounds_satisfied: bool,
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureBlock {
    pub total: CurvatureView,
    pub matroid: CurvatureView,
}

impl Report for CertificateReport {
    fn finding(&self) -> bool {
        !self.validation.passed
            || !self.all_bounds_satisfied
            || self.extensions.iter().any(|e| e.verification_failed())
    }
}

/// Policies `certify` runs by default: the three fixed policies, plus the
/// search when the ground set is small enough.
pub fn default_policies(n: usize, resolution: usize) -> Vec<ExtensionPolicy> {
    let mut out = vec![
        ExtensionPolicy::Zero,
        ExtensionPolicy::Max,
        ExtensionPolicy::TargetB,
    ];
    if n <= SEARCH_CAP {
        out.push(search_policy(resolution));
    }
    out
}

/// Full pipeline: validation, greedy (and exact when the ground set is
/// enumerable), curvatures, extensions and bounds.
pub fn run_certify(inst: &Instance, policies: &[ExtensionPolicy]) -> Result<CertificateReport> {
    let (f, m, tol) = (&inst.objective, &inst.matroid, inst.tolerance);
    let n = inst.ground.len();
    check_enumerable(n)?;
    let run_exact = n <= ENUMERATION_CAP;
    let domain = f.domain();
    let poly = check_polymatroid(f, m, domain, tol)?;
    let domain_name = match domain {
        crate::objective::EvalDomain::Matroid => "matroid",
        crate::objective::EvalDomain::PowerSet => "power_set",
    };

    let results = policies
        .iter()
        .map(|&p| extend(f, m, p, tol))
        .collect::<Result<Vec<_>>>()?;
    let cert = build_certificate(f, m, &results, run_exact, tol)?;
    let extensions = results
        .iter()
        .map(|r| ExtensionBlock::new(&inst.ground, r, f, m, tol))
        .collect::<Result<Vec<_>>>()?;

    let mut annotations = Vec::new();
    for r in &results {
        annotations.extend(policy_annotations(&inst.file, &r.policy.to_string()));
    }
    annotations.dedup();

    Ok(CertificateReport {
        header: Header::new("certify", inst),
        validation: PolymatroidView::new(&inst.ground, domain_name, &poly),
        solver: SolverBlock {
            greedy: GreedyView::new(&inst.ground, &cert.greedy),
            optimal: cert.optimal.as_ref().map(|o| OptimalView {
                set: labels(&inst.ground, o.set),
                value: o.value,
                all_optima: o
                    .all_optima
                    .iter()
                    .map(|&s| labels(&inst.ground, s))
                    .collect(),
            }),
            ratio: cert.ratio,
        },
        curvature: CurvatureBlock {
            total: cert
                .total_curvature
                .as_ref()
                .map(|c| CurvatureView::new(&inst.ground, c))
                .unwrap_or_else(CurvatureView::undefined),
            matroid: CurvatureView::new(&inst.ground, &cert.matroid_curvature),
        },
        extensions,
        bounds: cert.bounds.iter().map(BoundView::from).collect(),
        best_bound: cert.best_bound(),
        all_bounds_satisfied: cert.all_satisfied(),
        annotations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TASK: &str = r#"{ "ground_set": ["a1","a2","a3","a4"],
        "matroid": {"type":"uniform","rank":2},
        "objective": {"type":"task_scheduling","subtasks":1,"success_prob":[[0.4,0.6,0.8,0.9]]} }"#;

    fn task() -> Instance {
        InstanceFile::parse(TASK).unwrap().build().unwrap()
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-2.5e-20), -2.5e-20);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn solve_reports_labels() {
        let r = run_solve(&task(), true, TiePolicy::MinIndex).unwrap();
        assert_eq!(r.greedy.picks, vec!["a4", "a3"]);
        assert_eq!(r.optimal.unwrap().set, vec!["a3", "a4"]);
        assert_eq!(r.ratio.unwrap().value, 1.0);
    }

    #[test]
    fn curvature_report_values() {
        let r = run_curvature(&task()).unwrap();
        assert!((r.total.value.unwrap() - 0.992).abs() < 1e-12);
        assert!((r.matroid.value.unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn restricted_objective_has_no_total_curvature() {
        let inst = task();
        let restricted = inst.objective.restrict_to(&inst.matroid).unwrap();
        let inst = Instance {
            objective: restricted,
            ..inst
        };
        let r = run_curvature(&inst).unwrap();
        assert!(!r.total.defined);
        assert_eq!(r.total.note.as_deref(), Some(NOT_TOTAL_NOTE));
        assert!((r.matroid.value.unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn text_and_json_render() {
        let r = run_curvature(&task()).unwrap();
        let json = render(&r, Format::Json);
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["total"]["witness"]["element"], "a1");
        let text = render(&r, Format::Text);
        assert!(text.contains("value: 0.992"), "{text}");
        assert_eq!(render(&r, Format::Json), json);
    }

    #[test]
    fn certify_task_scheduling() {
        let inst = task();
        let r = run_certify(&inst, &default_policies(4, 8)).unwrap();
        assert!(r.all_bounds_satisfied);
        assert!(!r.finding());
        assert!((r.best_bound.unwrap() - 0.775).abs() < 1e-12);
    }

    #[test]
    fn validate_reports_axiom_witness() {
        let text = r#"{ "ground_set": ["x","y"], "matroid": {"type":"explicit",
            "independent_sets": [[], ["x","y"]]},
            "objective": {"type":"additive","weights":[1,1]}}"#;
        let r = run_validate(&InstanceFile::parse(text).unwrap()).unwrap();
        assert!(r.finding());
        let a = r.matroid_axioms.unwrap();
        assert!(a.hereditary_violation.is_some());
    }
}
