//! Set-function objectives and polymatroid property checks.
//!
//! An objective is either a table (defined on the independent sets only, or
//! on the whole power set) or one of the parametric families: expected
//! fraction of accomplished subtasks, Gaussian information gain with a
//! two-dimensional diagonal measurement model, and additive weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::MatroidOracle;
use crate::subset::{all_subsets, check_enumerable, SubsetKey};

/// Default absolute slack for every comparison in property checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalDomain {
    /// Values exist only on the independent sets of a matroid.
    Matroid,
    PowerSet,
}

/// Set function stored as an explicit value per subset.
#[derive(Debug, Clone, PartialEq)]
pub struct TableFunction {
    n: usize,
    domain: EvalDomain,
    values: Vec<Option<f64>>,
}

impl TableFunction {
    /// Builds a table from `(set, value)` entries.
    ///
    /// A power-set table needs exactly one entry for every subset; a
    /// matroid-only table needs exactly one entry for every independent set
    /// of `matroid` and nothing else.
    pub fn new(
        n: usize,
        domain: EvalDomain,
        entries: impl IntoIterator<Item = (SubsetKey, f64)>,
        matroid: Option<&MatroidOracle>,
    ) -> Result<Self> {
        check_enumerable(n)?;
        let mut values = vec![None; 1 << n];
        for (s, v) in entries {
            s.check_within(n)?;
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "value of {s} is not finite"
                )));
            }
            if values[s.mask() as usize].replace(v).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate entry for {s}")));
            }
        }
        match domain {
            EvalDomain::PowerSet => {
                if let Some(i) = values.iter().position(Option::is_none) {
                    return Err(Error::InvalidParameter(format!(
                        "power-set table is missing {}",
                        SubsetKey::from_mask(i as u32)
                    )));
                }
            }
            EvalDomain::Matroid => {
                let m = matroid.ok_or_else(|| {
                    Error::InvalidParameter("matroid-only table needs its matroid".into())
                })?;
                for s in all_subsets(n) {
                    let listed = values[s.mask() as usize].is_some();
                    let independent = m.contains(s);
                    if listed && !independent {
                        return Err(Error::InvalidParameter(format!(
                            "table lists {s}, which is not independent"
                        )));
                    }
                    if independent && !listed {
                        return Err(Error::InvalidParameter(format!(
                            "table is missing independent set {s}"
                        )));
                    }
                }
            }
        }
        Ok(TableFunction { n, domain, values })
    }

    /// Power-set table from a dense vector indexed by mask.
    pub fn total(values: Vec<f64>) -> Result<Self> {
        let n = values.len().trailing_zeros() as usize;
        if values.len() != 1 << n {
            return Err(Error::InvalidParameter(format!(
                "dense table length {} is not a power of two",
                values.len()
            )));
        }
        check_enumerable(n)?;
        Ok(TableFunction {
            n,
            domain: EvalDomain::PowerSet,
            values: values.into_iter().map(Some).collect(),
        })
    }

    pub fn get(&self, s: SubsetKey) -> Result<f64> {
        s.check_within(self.n)?;
        self.values[s.mask() as usize].ok_or(Error::Domain { set: s })
    }

    /// Defined `(set, value)` pairs in (cardinality, mask) order.
    pub fn entries(&self) -> Vec<(SubsetKey, f64)> {
        all_subsets(self.n)
            .filter_map(|s| self.values[s.mask() as usize].map(|v| (s, v)))
            .collect()
    }

    pub fn set(&mut self, s: SubsetKey, value: f64) {
        self.values[s.mask() as usize] = Some(value);
    }

    pub fn domain(&self) -> EvalDomain {
        self.domain
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetFunction {
    Table(TableFunction),
    /// `success_prob[i][j]` is the probability that agent `j` accomplishes
    /// subtask `i`.
    TaskScheduling {
        success_prob: Vec<Vec<f64>>,
    },
    InfoGain {
        alphas: Vec<f64>,
    },
    Additive {
        weights: Vec<f64>,
    },
}

impl SetFunction {
    pub fn task_scheduling(success_prob: Vec<Vec<f64>>) -> Result<Self> {
        validate_success_prob(&success_prob)?;
        Ok(SetFunction::TaskScheduling { success_prob })
    }

    pub fn info_gain(alphas: Vec<f64>) -> Result<Self> {
        validate_alphas(&alphas)?;
        Ok(SetFunction::InfoGain { alphas })
    }

    pub fn additive(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "additive weight {w} must be finite and nonnegative"
            )));
        }
        Ok(SetFunction::Additive { weights })
    }

    pub fn ground_size(&self) -> usize {
        match self {
            SetFunction::Table(t) => t.n,
            SetFunction::TaskScheduling { success_prob } => success_prob[0].len(),
            SetFunction::InfoGain { alphas } => alphas.len(),
            SetFunction::Additive { weights } => weights.len(),
        }
    }

    pub fn domain(&self) -> EvalDomain {
        match self {
            SetFunction::Table(t) => t.domain,
            _ => EvalDomain::PowerSet,
        }
    }

    pub fn is_total(&self) -> bool {
        self.domain() == EvalDomain::PowerSet
    }

    pub fn evaluate(&self, s: SubsetKey) -> Result<f64> {
        s.check_within(self.ground_size())?;
        match self {
            SetFunction::Table(t) => t.get(s),
            SetFunction::TaskScheduling { success_prob } => Ok(task_fraction(success_prob, s)),
            SetFunction::InfoGain { alphas } => Ok(information_gain(alphas, s)),
            SetFunction::Additive { weights } => Ok(s.elements().map(|e| weights[e]).sum()),
        }
    }

    /// Copy of this function restricted to the independent sets of `m`.
    pub fn restrict_to(&self, m: &MatroidOracle) -> Result<SetFunction> {
        let entries = m
            .enumerate_independent()?
            .iter()
            .map(|&s| self.evaluate(s).map(|v| (s, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SetFunction::Table(TableFunction::new(
            self.ground_size(),
            EvalDomain::Matroid,
            entries,
            Some(m),
        )?))
    }
}

fn validate_success_prob(p: &[Vec<f64>]) -> Result<()> {
    let width = p.first().map_or(0, Vec::len);
    if width == 0 {
        return Err(Error::InvalidParameter(
            "success probabilities need at least one subtask and one agent".into(),
        ));
    }
    for (i, row) in p.iter().enumerate() {
        if row.len() != width {
            return Err(Error::InvalidParameter(format!(
                "subtask {i} lists {} probabilities, expected {width}",
                row.len()
            )));
        }
        if let Some(v) = row.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "success probability {v} must lie in (0, 1]"
            )));
        }
    }
    Ok(())
}

fn validate_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("no measurement alphas".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !(0.5..=1.0).contains(*a)) {
        return Err(Error::InvalidParameter(format!(
            "alpha {a} must lie in [0.5, 1]"
        )));
    }
    Ok(())
}

fn task_fraction(p: &[Vec<f64>], s: SubsetKey) -> f64 {
    let total: f64 = p
        .iter()
        .map(|row| 1.0 - s.elements().map(|j| 1.0 - row[j]).product::<f64>())
        .sum();
    total / p.len() as f64
}

fn information_gain(alphas: &[f64], s: SubsetKey) -> f64 {
    let (first, second) = s
        .elements()
        .fold((1.0, 1.0), |(x, y), j| (x + alphas[j], y + 1.0 - alphas[j]));
    0.5 * (first * second).ln()
}

/// Expected fraction of subtasks accomplished by the agents in `s`.
pub fn task_scheduling_value(success_prob: &[Vec<f64>], s: SubsetKey) -> Result<f64> {
    validate_success_prob(success_prob)?;
    Ok(task_fraction(
        success_prob,
        s.check_within(success_prob[0].len())?,
    ))
}

/// Entropy reduction `-0.5 ln det P` of a standard-normal 2-vector after the
/// measurements in `s`, where measurement `j` adds `diag(alpha_j, 1 - alpha_j)`
/// to the information matrix. Natural logarithm.
pub fn info_gain_value(alphas: &[f64], s: SubsetKey) -> Result<f64> {
    validate_alphas(alphas)?;
    Ok(information_gain(alphas, s.check_within(alphas.len())?))
}

/// Values of `f` on every set of `domain`, indexed by mask.
pub fn tabulate(
    f: &SetFunction,
    m: &MatroidOracle,
    domain: EvalDomain,
) -> Result<Vec<Option<f64>>> {
    let n = f.ground_size();
    check_enumerable(n)?;
    let mut values = vec![None; 1 << n];
    match domain {
        EvalDomain::PowerSet => {
            for s in all_subsets(n) {
                values[s.mask() as usize] = Some(f.evaluate(s)?);
            }
        }
        EvalDomain::Matroid => {
            for &s in m.enumerate_independent()? {
                values[s.mask() as usize] = Some(f.evaluate(s)?);
            }
        }
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneWitness {
    pub smaller: SubsetKey,
    pub larger: SubsetKey,
    pub smaller_value: f64,
    pub larger_value: f64,
}

/// Violation of `f(A+j) - f(A) >= f(B+j) - f(B)` for `A ⊆ B`, `j ∉ B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmodularWitness {
    pub a: SubsetKey,
    pub b: SubsetKey,
    pub element: usize,
    pub gain_at_a: f64,
    pub gain_at_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolymatroidReport {
    pub empty_value: f64,
    pub monotone: Option<MonotoneWitness>,
    pub submodular: Option<SubmodularWitness>,
    #[serde(skip)]
    tol: f64,
}

impl PolymatroidReport {
    pub fn empty_ok(&self) -> bool {
        self.empty_value.abs() <= self.tol
    }

    pub fn passed(&self) -> bool {
        self.empty_ok() && self.monotone.is_none() && self.submodular.is_none()
    }
}

fn domain_sets(m: &MatroidOracle, n: usize, domain: EvalDomain) -> Result<Vec<SubsetKey>> {
    check_enumerable(n)?;
    Ok(match domain {
        EvalDomain::PowerSet => all_subsets(n).collect(),
        EvalDomain::Matroid => m.enumerate_independent()?.to_vec(),
    })
}

/// Finds the first `A ⊂ A+j` (both in the domain) with `f(A+j) < f(A) - tol`.
pub fn check_monotone(
    f: &SetFunction,
    m: &MatroidOracle,
    domain: EvalDomain,
    tol: f64,
) -> Result<Option<MonotoneWitness>> {
    let n = f.ground_size();
    let values = tabulate(f, m, domain)?;
    Ok(first_monotone_violation(
        &values,
        &domain_sets(m, n, domain)?,
        n,
        tol,
    ))
}

pub(crate) fn first_monotone_violation(
    values: &[Option<f64>],
    sets: &[SubsetKey],
    n: usize,
    tol: f64,
) -> Option<MonotoneWitness> {
    sets.iter().find_map(|&a| {
        let va = values[a.mask() as usize]?;
        (0..n).filter(|&j| !a.contains(j)).find_map(|j| {
            let b = a.with(j);
            let vb = values[b.mask() as usize]?;
            (vb < va - tol).then_some(MonotoneWitness {
                smaller: a,
                larger: b,
                smaller_value: va,
                larger_value: vb,
            })
        })
    })
}

/// Checks diminishing returns through the equivalent local condition
/// `f(A+i) + f(A+j) >= f(A+i+j) + f(A)`; on a matroid domain only quadruples
/// whose largest set is independent are examined.
pub fn check_submodular(
    f: &SetFunction,
    m: &MatroidOracle,
    domain: EvalDomain,
    tol: f64,
) -> Result<Option<SubmodularWitness>> {
    let n = f.ground_size();
    let values = tabulate(f, m, domain)?;
    Ok(first_submodular_violation(
        &values,
        &domain_sets(m, n, domain)?,
        n,
        tol,
    ))
}

pub(crate) fn first_submodular_violation(
    values: &[Option<f64>],
    sets: &[SubsetKey],
    n: usize,
    tol: f64,
) -> Option<SubmodularWitness> {
    let at = |s: SubsetKey| values[s.mask() as usize];
    sets.iter().find_map(|&a| {
        let va = at(a)?;
        (0..n).filter(|&i| !a.contains(i)).find_map(|i| {
            let b = a.with(i);
            ((i + 1)..n).filter(|&j| !a.contains(j)).find_map(|j| {
                let top = at(b.with(j))?;
                let gain_at_a = at(a.with(j))? - va;
                let gain_at_b = top - at(b)?;
                (gain_at_a < gain_at_b - tol).then_some(SubmodularWitness {
                    a,
                    b,
                    element: j,
                    gain_at_a,
                    gain_at_b,
                })
            })
        })
    })
}

pub fn check_polymatroid(
    f: &SetFunction,
    m: &MatroidOracle,
    domain: EvalDomain,
    tol: f64,
) -> Result<PolymatroidReport> {
    let n = f.ground_size();
    let values = tabulate(f, m, domain)?;
    Ok(polymatroid_report(
        &values,
        &domain_sets(m, n, domain)?,
        n,
        tol,
    ))
}

pub(crate) fn polymatroid_report(
    values: &[Option<f64>],
    sets: &[SubsetKey],
    n: usize,
    tol: f64,
) -> PolymatroidReport {
    PolymatroidReport {
        empty_value: values[0].unwrap_or(f64::NAN),
        monotone: first_monotone_violation(values, sets, n, tol),
        submodular: first_submodular_violation(values, sets, n, tol),
        tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = DEFAULT_TOLERANCE;

    fn set(elems: &[usize]) -> SubsetKey {
        SubsetKey::from_elements(elems.iter().copied())
    }

    fn task_4() -> SetFunction {
        SetFunction::task_scheduling(vec![vec![0.4, 0.6, 0.8, 0.9]]).unwrap()
    }

    fn sensing_3() -> SetFunction {
        SetFunction::info_gain(vec![0.5, 0.6, 0.8]).unwrap()
    }

    /// Direct 2x2 determinant of the posterior covariance, built by
    /// inverting the accumulated information matrix step by step.
    fn info_gain_oracle(alphas: &[f64], s: SubsetKey) -> f64 {
        let (mut p11, mut p22) = (1.0f64, 1.0f64);
        for j in s.elements() {
            p11 = 1.0 / (1.0 / p11 + alphas[j]);
            p22 = 1.0 / (1.0 / p22 + (1.0 - alphas[j]));
        }
        -0.5 * (p11 * p22).ln()
    }

    fn power_table(values: &[(SubsetKey, f64)], n: usize) -> SetFunction {
        SetFunction::Table(
            TableFunction::new(n, EvalDomain::PowerSet, values.iter().copied(), None).unwrap(),
        )
    }

    #[test]
    fn empty_set_is_zero() {
        for f in [
            task_4(),
            sensing_3(),
            SetFunction::additive(vec![1.0, 2.0]).unwrap(),
        ] {
            assert_eq!(f.evaluate(SubsetKey::EMPTY).unwrap(), 0.0);
        }
    }

    #[test]
    fn additive_value() {
        let f = SetFunction::additive(vec![1.0, 2.0]).unwrap();
        assert_eq!(f.evaluate(set(&[0, 1])).unwrap(), 3.0);
    }

    #[test]
    fn task_scheduling_values() {
        let p = vec![vec![0.4, 0.6, 0.8, 0.9]];
        assert!((task_scheduling_value(&p, set(&[1, 2])).unwrap() - 0.92).abs() < 1e-12);
        assert!((task_scheduling_value(&p, set(&[2, 3])).unwrap() - 0.98).abs() < 1e-12);
        let two = vec![vec![0.5, 0.5], vec![1.0, 1.0]];
        assert!((task_scheduling_value(&two, set(&[0])).unwrap() - 0.75).abs() < 1e-12);
        assert!(task_scheduling_value(&[vec![0.0, 0.5]], set(&[0])).is_err());
        assert!(SetFunction::task_scheduling(vec![vec![0.5, -0.1]]).is_err());
        assert!(SetFunction::task_scheduling(vec![vec![0.5], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn info_gain_values() {
        let a = [0.5, 0.6, 0.8];
        assert_eq!(info_gain_value(&a, SubsetKey::EMPTY).unwrap(), 0.0);
        let v = info_gain_value(&a, set(&[0])).unwrap();
        assert!((v - 0.5 * 2.25f64.ln()).abs() < 1e-12);
        let v = info_gain_value(&a, set(&[1, 2])).unwrap();
        assert!((v - 0.5 * 3.84f64.ln()).abs() < 1e-12);
        let v = info_gain_value(&a, set(&[0, 1, 2])).unwrap();
        assert!((v - 0.5 * 6.09f64.ln()).abs() < 1e-12);
        for s in all_subsets(3) {
            let v = info_gain_value(&a, s).unwrap();
            assert!((v - info_gain_oracle(&a, s)).abs() < 1e-12);
        }
        assert!(info_gain_value(&[0.4], set(&[0])).is_err());
        assert!(info_gain_value(&[1.1], set(&[0])).is_err());
    }

    #[test]
    fn matroid_only_table_rejects_outside_queries() {
        let m = MatroidOracle::uniform(4, 2).unwrap();
        let f = task_4().restrict_to(&m).unwrap();
        assert_eq!(f.domain(), EvalDomain::Matroid);
        assert!((f.evaluate(set(&[2, 3])).unwrap() - 0.98).abs() < 1e-12);
        assert!(matches!(
            f.evaluate(set(&[0, 1, 2])),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn matroid_table_must_match_independent_sets() {
        let m = MatroidOracle::uniform(2, 1).unwrap();
        let missing = TableFunction::new(
            2,
            EvalDomain::Matroid,
            [(SubsetKey::EMPTY, 0.0), (set(&[0]), 1.0)],
            Some(&m),
        );
        assert!(missing.is_err());
        let extra = TableFunction::new(
            2,
            EvalDomain::Matroid,
            [
                (SubsetKey::EMPTY, 0.0),
                (set(&[0]), 1.0),
                (set(&[1]), 1.0),
                (set(&[0, 1]), 2.0),
            ],
            Some(&m),
        );
        assert!(extra.is_err());
    }

    #[test]
    fn monotone_checks() {
        let m = MatroidOracle::uniform(4, 2).unwrap();
        let add = SetFunction::additive(vec![1.0, 0.0, 3.0, 2.0]).unwrap();
        assert!(check_monotone(&add, &m, EvalDomain::PowerSet, TOL)
            .unwrap()
            .is_none());
        assert!(check_monotone(&task_4(), &m, EvalDomain::PowerSet, TOL)
            .unwrap()
            .is_none());

        let f = power_table(
            &[
                (SubsetKey::EMPTY, 0.0),
                (set(&[0]), 1.0),
                (set(&[1]), 0.0),
                (set(&[0, 1]), 0.5),
            ],
            2,
        );
        let m2 = MatroidOracle::uniform(2, 2).unwrap();
        let w = check_monotone(&f, &m2, EvalDomain::PowerSet, TOL)
            .unwrap()
            .unwrap();
        assert_eq!((w.smaller, w.larger), (set(&[0]), set(&[0, 1])));
    }

    #[test]
    fn submodular_checks() {
        let m = MatroidOracle::uniform(3, 2).unwrap();
        assert!(
            check_submodular(&sensing_3(), &m, EvalDomain::PowerSet, TOL)
                .unwrap()
                .is_none()
        );
        let f = power_table(
            &[
                (SubsetKey::EMPTY, 0.0),
                (set(&[0]), 0.0),
                (set(&[1]), 0.0),
                (set(&[0, 1]), 1.0),
            ],
            2,
        );
        let m2 = MatroidOracle::uniform(2, 2).unwrap();
        let w = check_submodular(&f, &m2, EvalDomain::PowerSet, TOL)
            .unwrap()
            .unwrap();
        assert_eq!((w.a, w.b, w.element), (SubsetKey::EMPTY, set(&[0]), 1));
    }

    /// Exhaustive triple scan straight from the definition, used as an
    /// independent check of the local condition.
    fn submodular_by_definition(values: &[f64], n: usize) -> bool {
        all_subsets(n).all(|b| {
            all_subsets(n).filter(|a| a.is_subset_of(b)).all(|a| {
                (0..n).filter(|&j| !b.contains(j)).all(|j| {
                    let ga = values[a.with(j).mask() as usize] - values[a.mask() as usize];
                    let gb = values[b.with(j).mask() as usize] - values[b.mask() as usize];
                    ga >= gb - TOL
                })
            })
        })
    }

    #[test]
    fn local_and_full_submodularity_agree() {
        let m = MatroidOracle::uniform(3, 3).unwrap();
        let mut g: Vec<f64> = (0..8)
            .map(|i| info_gain_value(&[0.5, 0.6, 0.8], SubsetKey::from_mask(i)).unwrap())
            .collect();
        assert!(submodular_by_definition(&g, 3));
        g[7] = 2.0;
        let f = SetFunction::Table(TableFunction::total(g.clone()).unwrap());
        let local = check_submodular(&f, &m, EvalDomain::PowerSet, TOL).unwrap();
        assert_eq!(local.is_none(), submodular_by_definition(&g, 3));
    }

    #[test]
    fn polymatroid_checks() {
        let m = MatroidOracle::uniform(4, 2).unwrap();
        let r = check_polymatroid(&task_4(), &m, EvalDomain::Matroid, TOL).unwrap();
        assert!(r.passed());
        let add = SetFunction::additive(vec![3.0, 2.0, 1.0, 0.5]).unwrap();
        assert!(check_polymatroid(&add, &m, EvalDomain::PowerSet, TOL)
            .unwrap()
            .passed());
    }

    #[test]
    fn matroid_only_function_cannot_be_checked_on_power_set() {
        let m = MatroidOracle::uniform(4, 2).unwrap();
        let f = task_4().restrict_to(&m).unwrap();
        assert!(check_polymatroid(&f, &m, EvalDomain::PowerSet, TOL).is_err());
        assert!(check_polymatroid(&f, &m, EvalDomain::Matroid, TOL)
            .unwrap()
            .passed());
    }

    #[test]
    fn single_subtask_closed_form_matches_product() {
        let p = [0.3, 0.55, 0.7, 0.95, 0.15];
        let f = SetFunction::task_scheduling(vec![p.to_vec()]).unwrap();
        for s in all_subsets(5) {
            let mut miss = 1.0;
            for j in s.elements() {
                miss *= 1.0 - p[j];
            }
            assert!((f.evaluate(s).unwrap() - (1.0 - miss)).abs() < 1e-12);
        }
    }
}
