//! Polymatroid extensions of functions known only on the independent sets.
//!
//! Sets outside the matroid are valued layer by layer in (cardinality, mask)
//! order as `g(A) = g(B*) + d_A`, where `B*` is the best-valued subset of `A`
//! with one element removed and `d_A >= 0`. Submodularity at `A` holds
//! exactly when `d_A` does not exceed
//!
//! ```text
//! min over B ⊂ A, |B| = |A|-1, a ∈ B of  g(B) - g(B*) + g(A - a) - g(B - a)
//! ```
//!
//! so a layer with a negative minimum admits no polymatroid continuation of
//! the values chosen so far. Policies differ only in where they put `d_A`
//! inside `[lower, upper]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curvature::{matroid_curvature, total_curvature_with, CurvatureReport};
use crate::error::{Error, Result};
use crate::matroid::MatroidOracle;
use crate::objective::{polymatroid_report, PolymatroidReport, SetFunction, TableFunction};
use crate::solver::{exact, greedy, ScanMode};
use crate::subset::{all_subsets, check_enumerable, SubsetKey};

/// Largest ground set accepted by [`search_min_curvature`].
pub const SEARCH_CAP: usize = 10;

pub const DEFAULT_BEAM_WIDTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionPolicy {
    /// `d_A = 0` everywhere.
    Zero,
    /// `d_A` at the top of the submodularity interval.
    Max,
    /// Smallest `d_A` keeping every marginal at `A` at least
    /// `(1 - b) g({a})`, aiming for total curvature equal to `b(f)`.
    TargetB,
    /// Beam search over `resolution` evenly spaced choices per layer.
    Search { resolution: usize, width: usize },
}

impl fmt::Display for ExtensionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionPolicy::Zero => f.write_str("zero"),
            ExtensionPolicy::Max => f.write_str("max"),
            ExtensionPolicy::TargetB => f.write_str("target-b"),
            ExtensionPolicy::Search { resolution, width } => {
                write!(f, "search(resolution={resolution}, width={width})")
            }
        }
    }
}

/// A triple `(A, B, a)` whose submodularity slack is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityWitness {
    pub set: SubsetKey,
    pub subset: SubsetKey,
    pub element: usize,
    pub slack: f64,
}

/// Values of `g` built so far, indexed by mask.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialTable {
    n: usize,
    values: Vec<Option<f64>>,
}

impl PartialTable {
    pub fn new(n: usize) -> Result<Self> {
        check_enumerable(n)?;
        Ok(PartialTable {
            n,
            values: vec![None; 1 << n],
        })
    }

    /// Table holding `f` on every independent set.
    pub fn from_matroid(f: &SetFunction, m: &MatroidOracle) -> Result<Self> {
        let mut t = PartialTable::new(m.ground_size())?;
        for &s in m.enumerate_independent()? {
            t.set(s, f.evaluate(s)?);
        }
        Ok(t)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: SubsetKey) -> Result<f64> {
        self.values[s.mask() as usize].ok_or(Error::ConstructionOrder { set: s })
    }

    pub fn set(&mut self, s: SubsetKey, v: f64) {
        self.values[s.mask() as usize] = Some(v);
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    fn dense(&self) -> Option<Vec<f64>> {
        self.values.iter().copied().collect()
    }
}

/// Best-valued subset of `a` with one element removed; ties go to the lowest
/// mask.
pub fn bstar(g: &PartialTable, a: SubsetKey) -> Result<SubsetKey> {
    let mut best: Option<(SubsetKey, f64)> = None;
    for b in a.maximal_proper_subsets() {
        let v = g.get(b)?;
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((b, v));
        }
    }
    best.map(|(b, _)| b)
        .ok_or_else(|| Error::InvalidParameter("the empty set has no proper subset".into()))
}

/// Upper end of the submodularity interval at `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound {
    /// `+inf` when `a` is a singleton (no constraint applies).
    pub value: f64,
    /// The minimizing `(A, B, a)` triple.
    pub witness: Option<FeasibilityWitness>,
}

pub fn d_upper(g: &PartialTable, a: SubsetKey) -> Result<UpperBound> {
    let anchor = g.get(bstar(g, a)?)?;
    let mut out = UpperBound {
        value: f64::INFINITY,
        witness: None,
    };
    for b in a.maximal_proper_subsets() {
        let gb = g.get(b)?;
        for e in b.elements() {
            let slack = gb - anchor + g.get(a.without(e))? - g.get(b.without(e))?;
            if slack < out.value {
                out = UpperBound {
                    value: slack,
                    witness: Some(FeasibilityWitness {
                        set: a,
                        subset: b,
                        element: e,
                        slack,
                    }),
                };
            }
        }
    }
    Ok(out)
}

/// Least `d_A >= 0` with `g(A) - g(A - a) >= (1 - b) g({a})` for every
/// `a ∈ A`. For a singleton the condition holds for any `d_A`.
pub fn d_lower_target_b(g: &PartialTable, a: SubsetKey, b: f64) -> Result<f64> {
    let anchor = g.get(bstar(g, a)?)?;
    let mut lower = 0.0f64;
    if a.len() < 2 {
        return Ok(lower);
    }
    for e in a.elements() {
        let need = g.get(a.without(e))? - anchor + (1.0 - b) * g.get(SubsetKey::singleton(e))?;
        lower = lower.max(need);
    }
    Ok(lower)
}

/// One valued set outside the matroid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub set: SubsetKey,
    pub bstar: SubsetKey,
    pub lower: f64,
    /// `None` when unconstrained.
    pub upper: Option<f64>,
    pub upper_witness: Option<FeasibilityWitness>,
    /// Chosen slack; `None` when construction stopped at this set.
    pub d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ExtensionStatus {
    Feasible,
    /// No polymatroid continuation of the values chosen so far.
    Infeasible {
        witness: FeasibilityWitness,
    },
    /// A polymatroid continuation exists at this set, but not one meeting
    /// the curvature target.
    TargetInfeasible {
        set: SubsetKey,
        lower: f64,
        upper: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionResult {
    pub policy: ExtensionPolicy,
    /// Matroid curvature `b(f)` of the function being extended.
    pub matroid_curvature: f64,
    pub layers: Vec<Layer>,
    pub status: ExtensionStatus,
    /// Total curvature of `g` when feasible.
    pub achieved_curvature: Option<CurvatureReport>,
    /// For search results: which candidate produced the extension.
    pub origin: Option<String>,
    table: PartialTable,
}

impl ExtensionResult {
    pub fn is_feasible(&self) -> bool {
        self.status == ExtensionStatus::Feasible
    }

    pub fn achieved_c(&self) -> Option<f64> {
        self.achieved_curvature.as_ref().map(|c| c.value)
    }

    /// The extended function on the power set, when construction finished.
    pub fn g(&self) -> Option<SetFunction> {
        let dense = self.table.dense()?;
        TableFunction::total(dense).ok().map(SetFunction::Table)
    }

    pub fn table(&self) -> &PartialTable {
        &self.table
    }

    /// Overwrites one value of `g`; used to inject faults when testing the
    /// verifier.
    pub fn set_value(&mut self, s: SubsetKey, v: f64) {
        self.table.set(s, v);
    }

    pub fn d_choices(&self) -> impl Iterator<Item = (SubsetKey, f64)> + '_ {
        self.layers.iter().filter_map(|l| l.d.map(|d| (l.set, d)))
    }
}

/// How the slack at each layer is picked.
enum Chooser<'a> {
    Policy(ExtensionPolicy),
    Replay(&'a [f64]),
}

fn dependent_sets(m: &MatroidOracle) -> Vec<SubsetKey> {
    all_subsets(m.ground_size())
        .filter(|&s| !m.contains(s))
        .collect()
}

/// Runs the layer-by-layer construction.
fn construct(
    mut table: PartialTable,
    m: &MatroidOracle,
    b: f64,
    chooser: Chooser<'_>,
    tol: f64,
) -> Result<(PartialTable, Vec<Layer>, ExtensionStatus)> {
    let mut layers = Vec::new();
    for (i, a) in dependent_sets(m).into_iter().enumerate() {
        let star = bstar(&table, a)?;
        let up = d_upper(&table, a)?;
        let lower = match chooser {
            Chooser::Policy(ExtensionPolicy::TargetB) => d_lower_target_b(&table, a, b)?,
            _ => 0.0,
        };
        let mut layer = Layer {
            set: a,
            bstar: star,
            lower,
            upper: up.value.is_finite().then_some(up.value),
            upper_witness: up.witness,
            d: None,
        };
        if up.value < -tol {
            let witness = up.witness.expect("finite upper bound carries a witness");
            layers.push(layer);
            return Ok((table, layers, ExtensionStatus::Infeasible { witness }));
        }
        let upper = up.value.max(0.0);
        let d = match chooser {
            Chooser::Policy(ExtensionPolicy::Zero) => 0.0,
            Chooser::Policy(ExtensionPolicy::Max) => {
                if upper.is_finite() {
                    upper
                } else {
                    0.0
                }
            }
            Chooser::Policy(ExtensionPolicy::TargetB) => {
                if lower > upper + tol {
                    layers.push(layer);
                    let status = ExtensionStatus::TargetInfeasible {
                        set: a,
                        lower,
                        upper,
                    };
                    return Ok((table, layers, status));
                }
                lower.min(upper)
            }
            Chooser::Policy(ExtensionPolicy::Search { .. }) => {
                unreachable!("search is driven by the beam, not by construct")
            }
            Chooser::Replay(ds) => ds[i],
        };
        let value = table.get(star)? + d;
        table.set(a, value);
        debug_assert!(
            a.maximal_proper_subsets()
                .all(|s| table.get(s).is_ok_and(|v| v <= value + tol)),
            "layer at {a} is not monotone"
        );
        layer.d = Some(d);
        layers.push(layer);
    }
    Ok((table, layers, ExtensionStatus::Feasible))
}

fn finish(
    policy: ExtensionPolicy,
    b: f64,
    table: PartialTable,
    layers: Vec<Layer>,
    status: ExtensionStatus,
    tol: f64,
) -> Result<ExtensionResult> {
    let achieved_curvature = if status == ExtensionStatus::Feasible {
        Some(total_curvature_with(table.n, |s| table.get(s), tol)?)
    } else {
        None
    };
    Ok(ExtensionResult {
        policy,
        matroid_curvature: b,
        layers,
        status,
        achieved_curvature,
        origin: None,
        table,
    })
}

/// Extends `f` from the independent sets of `m` to the whole power set.
///
/// `f` is expected to be a polymatroid function on the independent sets.
pub fn extend(
    f: &SetFunction,
    m: &MatroidOracle,
    policy: ExtensionPolicy,
    tol: f64,
) -> Result<ExtensionResult> {
    if let ExtensionPolicy::Search { resolution, width } = policy {
        return search_min_curvature(f, m, resolution, width, tol);
    }
    let b = matroid_curvature(f, m, ScanMode::Independent, tol)?.value;
    let table = PartialTable::from_matroid(f, m)?;
    let (table, layers, status) = construct(table, m, b, Chooser::Policy(policy), tol)?;
    finish(policy, b, table, layers, status, tol)
}

#[derive(Debug, Clone)]
struct BeamState {
    table: PartialTable,
    /// Smallest marginal `g(A) - g(A - j)` seen so far for each element.
    min_marginal: Vec<f64>,
    choices: Vec<f64>,
    score: f64,
}

impl BeamState {
    fn record(&mut self, a: SubsetKey, tol: f64) -> Result<()> {
        let v = self.table.get(a)?;
        for j in a.elements() {
            let marg = v - self.table.get(a.without(j))?;
            self.min_marginal[j] = self.min_marginal[j].min(marg);
        }
        self.score = self.lower_bound(tol);
        Ok(())
    }

    /// Every marginal at the full set is at most the smallest marginal seen
    /// so far, so this never exceeds the final total curvature.
    fn lower_bound(&self, tol: f64) -> f64 {
        (0..self.table.n)
            .filter_map(|j| {
                let single = self.table.values[1 << j]?;
                (single > tol && self.min_marginal[j].is_finite())
                    .then(|| 1.0 - self.min_marginal[j] / single)
            })
            .fold(0.0, f64::max)
    }
}

/// Searches for a low-curvature extension.
///
/// Each layer branches on `resolution` evenly spaced slacks across its
/// feasible interval, plus the target-b slack when it fits; the `width`
/// partial tables with the smallest curvature lower bound survive. The
/// fixed policies are evaluated as well and the smallest achieved total
/// curvature wins. The result bounds the infimum over all extensions from
/// above only.
pub fn search_min_curvature(
    f: &SetFunction,
    m: &MatroidOracle,
    resolution: usize,
    width: usize,
    tol: f64,
) -> Result<ExtensionResult> {
    let n = m.ground_size();
    if n > SEARCH_CAP {
        return Err(Error::SizeCap { n, cap: SEARCH_CAP });
    }
    if resolution < 2 || width < 1 {
        return Err(Error::InvalidParameter(format!(
            "search needs resolution >= 2 and width >= 1 (got {resolution}, {width})"
        )));
    }
    let policy = ExtensionPolicy::Search { resolution, width };
    let b = matroid_curvature(f, m, ScanMode::Independent, tol)?.value;
    let base = PartialTable::from_matroid(f, m)?;

    let mut seed = BeamState {
        table: base.clone(),
        min_marginal: vec![f64::INFINITY; n],
        choices: Vec::new(),
        score: 0.0,
    };
    for &s in m.enumerate_independent()? {
        seed.record(s, tol)?;
    }
    let mut beam = vec![seed];
    for a in dependent_sets(m) {
        let mut children = Vec::new();
        for state in &beam {
            let star = bstar(&state.table, a)?;
            let up = d_upper(&state.table, a)?;
            if up.value < -tol {
                continue;
            }
            let upper = up.value.max(0.0);
            let mut points: Vec<f64> = if upper.is_finite() {
                (0..resolution)
                    .map(|k| upper * k as f64 / (resolution - 1) as f64)
                    .collect()
            } else {
                vec![0.0]
            };
            let target = d_lower_target_b(&state.table, a, b)?;
            if target <= upper + tol {
                points.push(target.min(upper));
            }
            points.sort_by(f64::total_cmp);
            points.dedup();
            let anchor = state.table.get(star)?;
            for d in points {
                let mut child = state.clone();
                child.table.set(a, anchor + d);
                child.choices.push(d);
                child.record(a, tol)?;
                children.push(child);
            }
        }
        children.sort_by(|x, y| x.score.total_cmp(&y.score));
        children.truncate(width);
        beam = children;
        if beam.is_empty() {
            break;
        }
    }

    let mut best: Option<ExtensionResult> = None;
    let mut consider = |candidate: ExtensionResult, origin: String| {
        if !candidate.is_feasible() {
            return;
        }
        let c = candidate.achieved_c().unwrap_or(f64::INFINITY);
        if best
            .as_ref()
            .is_none_or(|b| c < b.achieved_c().unwrap_or(f64::INFINITY))
        {
            let mut candidate = candidate;
            candidate.policy = policy;
            candidate.origin = Some(origin);
            best = Some(candidate);
        }
    };

    for state in &beam {
        let (table, layers, status) =
            construct(base.clone(), m, b, Chooser::Replay(&state.choices), tol)?;
        consider(
            finish(policy, b, table, layers, status, tol)?,
            "beam".to_string(),
        );
    }
    let mut first_failure = None;
    for fixed in [
        ExtensionPolicy::Zero,
        ExtensionPolicy::Max,
        ExtensionPolicy::TargetB,
    ] {
        let r = extend(f, m, fixed, tol)?;
        if first_failure.is_none() && !r.is_feasible() {
            first_failure = Some(r.clone());
        }
        consider(r, format!("{fixed} policy"));
    }

    match best {
        Some(r) => Ok(r),
        None => {
            let mut r = first_failure.expect("no feasible candidate implies a failed policy");
            r.policy = policy;
            r.origin = Some("no feasible candidate".into());
            Ok(r)
        }
    }
}

/// Result of re-checking an extension against the function it extends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionVerification {
    /// First independent set where `g` and `f` differ: `(set, f, g)`.
    pub disagreement: Option<(SubsetKey, f64, f64)>,
    pub polymatroid: PolymatroidReport,
    pub greedy_picks_f: Vec<usize>,
    pub greedy_picks_g: Vec<usize>,
    pub optimal_f: f64,
    pub optimal_g: f64,
    pub achieved_c: f64,
    pub matroid_curvature: f64,
    /// Smallest submodularity slack over all dependent sets.
    pub min_slack: Option<FeasibilityWitness>,
    #[serde(skip)]
    tol: f64,
}

impl ExtensionVerification {
    pub fn agrees(&self) -> bool {
        self.disagreement.is_none()
    }

    pub fn solutions_match(&self) -> bool {
        self.greedy_picks_f == self.greedy_picks_g && self.optimal_f == self.optimal_g
    }

    pub fn curvature_floor_holds(&self) -> bool {
        self.achieved_c >= self.matroid_curvature - self.tol
    }

    pub fn slacks_nonnegative(&self) -> bool {
        self.min_slack.is_none_or(|w| w.slack >= -self.tol)
    }

    pub fn passed(&self) -> bool {
        self.agrees()
            && self.polymatroid.passed()
            && self.solutions_match()
            && self.curvature_floor_holds()
            && self.slacks_nonnegative()
    }
}

/// Smallest slack `g(B) - g(B*) + g(A - a) - g(B - a)` over every set `A`
/// outside the matroid, using the final values of `g`.
pub fn min_feasibility_slack(
    g: &PartialTable,
    m: &MatroidOracle,
) -> Result<Option<FeasibilityWitness>> {
    let mut worst: Option<FeasibilityWitness> = None;
    for a in dependent_sets(m) {
        if let Some(w) = d_upper(g, a)?.witness {
            if worst.is_none_or(|cur| w.slack < cur.slack) {
                worst = Some(w);
            }
        }
    }
    Ok(worst)
}

/// Re-checks a feasible extension: agreement with `f` on the matroid,
/// exhaustive polymatroid properties on the power set, identical greedy and
/// optimal solutions, and the curvature floor `c(g) >= b(f)`.
pub fn verify_extension(
    result: &ExtensionResult,
    f: &SetFunction,
    m: &MatroidOracle,
    tol: f64,
) -> Result<ExtensionVerification> {
    let g = result.g().filter(|_| result.is_feasible()).ok_or_else(|| {
        Error::InvalidParameter("only feasible extensions can be verified".into())
    })?;
    let n = m.ground_size();

    let mut disagreement = None;
    for &s in m.enumerate_independent()? {
        let (fv, gv) = (f.evaluate(s)?, g.evaluate(s)?);
        if fv != gv {
            disagreement = Some((s, fv, gv));
            break;
        }
    }

    let sets: Vec<SubsetKey> = all_subsets(n).collect();
    let polymatroid = polymatroid_report(&result.table.values, &sets, n, tol);

    let greedy_f = greedy(f, m, tol)?;
    let greedy_g = greedy(&g, m, tol)?;
    let optimal_f = exact(f, m, ScanMode::Independent, tol)?.value;
    let optimal_g = exact(&g, m, ScanMode::Independent, tol)?.value;

    let achieved_c = total_curvature_with(n, |s| g.evaluate(s), tol)?.value;
    let b = matroid_curvature(f, m, ScanMode::Independent, tol)?.value;

    Ok(ExtensionVerification {
        disagreement,
        polymatroid,
        greedy_picks_f: greedy_f.picks,
        greedy_picks_g: greedy_g.picks,
        optimal_f,
        optimal_g,
        achieved_c,
        matroid_curvature: b,
        min_slack: min_feasibility_slack(&result.table, m)?,
        tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IffTerm {
    pub element: usize,
    /// `g(X) - g(X - a)`.
    pub marginal: f64,
    /// `(1 - b) g({a})`.
    pub required: f64,
    /// `(marginal - required) / g({a})`, i.e. `b` minus the curvature term
    /// of `a`; `None` when `g({a})` is zero.
    pub normalized_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IffReport {
    pub holds: bool,
    pub terms: Vec<IffTerm>,
    /// Elements where the marginal meets the requirement with equality.
    pub equality_at: Vec<usize>,
}

/// Checks whether the total curvature of `g` equals `b`: every marginal at
/// the full set must be at least `(1 - b) g({a})` and one must be tight.
///
/// Gaps are compared after dividing by `g({a})`, which makes the verdict
/// coincide with `|c(g) - b| <= tol`. Elements with `g({a}) = 0` carry no
/// constraint; if every element is like that the condition reduces to
/// `b = 0`.
pub fn verify_iff_condition(g: &SetFunction, b: f64, tol: f64) -> Result<IffReport> {
    if !g.is_total() {
        return Err(Error::NotTotal);
    }
    let n = g.ground_size();
    let full = SubsetKey::full(n);
    let top = g.evaluate(full)?;
    let mut terms = Vec::with_capacity(n);
    for a in 0..n {
        let single = g.evaluate(SubsetKey::singleton(a))? - g.evaluate(SubsetKey::EMPTY)?;
        let marginal = top - g.evaluate(full.without(a))?;
        let required = (1.0 - b) * single;
        terms.push(IffTerm {
            element: a,
            marginal,
            required,
            normalized_gap: (single > tol).then(|| (marginal - required) / single),
        });
    }
    let gaps: Vec<(usize, f64)> = terms
        .iter()
        .filter_map(|t| t.normalized_gap.map(|gap| (t.element, gap)))
        .collect();
    let equality_at: Vec<usize> = gaps
        .iter()
        .filter(|(_, gap)| gap.abs() <= tol)
        .map(|(a, _)| *a)
        .collect();
    let holds = if gaps.is_empty() {
        b.abs() <= tol
    } else {
        gaps.iter().all(|(_, gap)| *gap >= -tol) && !equality_at.is_empty()
    };
    Ok(IffReport {
        holds,
        terms,
        equality_at,
    })
}
