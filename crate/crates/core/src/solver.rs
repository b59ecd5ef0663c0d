//! Greedy and exhaustive maximization over the independent sets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matroid::MatroidOracle;
use crate::objective::SetFunction;
use crate::subset::SubsetKey;

/// How ties between equally good greedy candidates are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Take the lowest element index among candidates within tolerance of
    /// the best value.
    #[default]
    MinIndex,
    /// Follow every tied candidate and report every distinct greedy set.
    EnumerateAll,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedySolution {
    /// Elements in the order they were picked.
    pub picks: Vec<usize>,
    /// Objective value after each pick.
    pub values: Vec<f64>,
    pub final_value: f64,
}

impl GreedySolution {
    pub fn set(&self) -> SubsetKey {
        SubsetKey::from_elements(self.picks.iter().copied())
    }
}

/// Feasible extensions of `current` with their objective values.
fn candidates(f: &SetFunction, m: &MatroidOracle, current: SubsetKey) -> Result<Vec<(usize, f64)>> {
    (0..m.ground_size())
        .filter(|&j| !current.contains(j) && m.contains(current.with(j)))
        .map(|j| f.evaluate(current.with(j)).map(|v| (j, v)))
        .collect()
}

fn best_value(cands: &[(usize, f64)]) -> f64 {
    cands.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max)
}

/// Builds a greedy solution, breaking ties towards the lowest element index.
///
/// Only prefix sets are evaluated and they are always independent, so this
/// works for objectives defined on the matroid alone.
pub fn greedy(f: &SetFunction, m: &MatroidOracle, tol: f64) -> Result<GreedySolution> {
    let mut current = SubsetKey::EMPTY;
    let mut picks = Vec::new();
    let mut values = Vec::new();
    loop {
        let cands = candidates(f, m, current)?;
        if cands.is_empty() {
            break;
        }
        let best = best_value(&cands);
        let &(j, v) = cands
            .iter()
            .find(|c| c.1 >= best - tol)
            .expect("non-empty candidate list has a maximum");
        current = current.with(j);
        picks.push(j);
        values.push(v);
    }
    let final_value = match values.last() {
        Some(&v) => v,
        None => f.evaluate(SubsetKey::EMPTY)?,
    };
    Ok(GreedySolution {
        picks,
        values,
        final_value,
    })
}

/// Every distinct greedy set reachable under some tie-breaking rule, each
/// with one representative pick order, in (cardinality, mask) order of the
/// final set.
pub fn all_greedy_solutions(
    f: &SetFunction,
    m: &MatroidOracle,
    tol: f64,
) -> Result<Vec<GreedySolution>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut stack = vec![(SubsetKey::EMPTY, Vec::new(), Vec::new())];
    while let Some((current, picks, values)) = stack.pop() {
        if !seen.insert(current) {
            continue;
        }
        let cands = candidates(f, m, current)?;
        if cands.is_empty() {
            let final_value = match values.last() {
                Some(&v) => v,
                None => f.evaluate(SubsetKey::EMPTY)?,
            };
            out.push(GreedySolution {
                picks,
                values,
                final_value,
            });
            continue;
        }
        let best = best_value(&cands);
        for &(j, v) in cands.iter().rev().filter(|c| c.1 >= best - tol) {
            let mut p = picks.clone();
            p.push(j);
            let mut vs = values.clone();
            vs.push(v);
            stack.push((current.with(j), p, vs));
        }
    }
    out.sort_by_key(|g| g.set().order_key());
    Ok(out)
}

/// Which sets the exhaustive solver scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    #[default]
    Independent,
    /// Bases only; enough when the objective is monotone.
    Bases,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalSolution {
    pub set: SubsetKey,
    pub value: f64,
    /// Every scanned set whose value is within tolerance of the optimum.
    pub all_optima: Vec<SubsetKey>,
}

/// Exhaustive maximum over the independent sets (or the bases). The
/// representative optimum is the first set in (cardinality, mask) order
/// attaining the exact maximum.
pub fn exact(
    f: &SetFunction,
    m: &MatroidOracle,
    mode: ScanMode,
    tol: f64,
) -> Result<OptimalSolution> {
    let sets = match mode {
        ScanMode::Independent => m.enumerate_independent()?,
        ScanMode::Bases => m.bases()?,
    };
    let scored = sets
        .iter()
        .map(|&s| f.evaluate(s).map(|v| (s, v)))
        .collect::<Result<Vec<_>>>()?;
    let mut ordered = scored.clone();
    ordered.sort_by_key(|(s, _)| s.order_key());
    let (set, value) =
        ordered
            .iter()
            .copied()
            .fold((SubsetKey::EMPTY, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
    let all_optima = ordered
        .iter()
        .filter(|(_, v)| *v >= value - tol)
        .map(|(s, _)| *s)
        .collect();
    Ok(OptimalSolution {
        set,
        value,
        all_optima,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub value: f64,
    /// Set when the optimum is zero; the ratio is then reported as 1.
    pub degenerate: bool,
}

/// Approximation ratio `greedy / optimal`.
pub fn ratio(greedy_value: f64, optimal_value: f64) -> Ratio {
    if optimal_value <= 0.0 {
        Ratio {
            value: 1.0,
            degenerate: true,
        }
    } else {
        Ratio {
            value: greedy_value / optimal_value,
            degenerate: false,
        }
    }
}
