//! Matroid oracles: uniform, partition and explicitly listed families.

use std::collections::HashSet;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::subset::{all_subsets, check_enumerable, subsets_of_size, SubsetKey};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatroidSpec {
    Uniform {
        rank: usize,
    },
    /// Blocks must partition the ground set; at most `capacities[i]` elements
    /// may be taken from `blocks[i]`.
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    Explicit {
        family: Vec<SubsetKey>,
    },
}

/// Outcome of checking the hereditary and augmentation axioms on a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    /// `(member, missing_subset)` when some subset of a member is absent.
    pub hereditary_violation: Option<(SubsetKey, SubsetKey)>,
    /// `(smaller, larger)` when no element of `larger \ smaller` augments
    /// `smaller`.
    pub augmentation_violation: Option<(SubsetKey, SubsetKey)>,
}

impl AxiomReport {
    pub fn hereditary(&self) -> bool {
        self.hereditary_violation.is_none()
    }

    pub fn augmentation(&self) -> bool {
        self.augmentation_violation.is_none()
    }

    pub fn passed(&self) -> bool {
        self.hereditary() && self.augmentation()
    }
}

/// Checks both matroid axioms on a listed family by exhaustive scan.
///
/// Members are visited in (cardinality, mask) order, so the first witness
/// reported is deterministic.
pub fn verify_matroid_axioms(family: &[SubsetKey], n: usize) -> Result<AxiomReport> {
    if family.is_empty() {
        return Err(Error::InvalidMatroid("independent family is empty".into()));
    }
    let mut members: Vec<SubsetKey> = family
        .iter()
        .map(|s| s.check_within(n))
        .collect::<Result<_>>()?;
    members.sort_unstable_by_key(|s| s.order_key());
    members.dedup();
    let lookup: HashSet<SubsetKey> = members.iter().copied().collect();

    let hereditary_violation = members.iter().find_map(|&b| {
        b.maximal_proper_subsets()
            .find(|a| !lookup.contains(a))
            .map(|a| (b, a))
    });

    let augmentation_violation = members.iter().find_map(|&a| {
        members
            .iter()
            .filter(|b| b.len() > a.len())
            .find(|&&b| {
                !b.difference(a)
                    .elements()
                    .any(|j| lookup.contains(&a.with(j)))
            })
            .map(|&b| (a, b))
    });

    Ok(AxiomReport {
        hereditary_violation,
        augmentation_violation,
    })
}

/// Independence oracle with lazily cached enumerations.
#[derive(Debug)]
pub struct MatroidOracle {
    spec: MatroidSpec,
    n: usize,
    rank: usize,
    /// Block index per element (partition matroids only).
    block_of: Vec<usize>,
    explicit: HashSet<SubsetKey>,
    independent: OnceLock<Vec<SubsetKey>>,
    bases: OnceLock<Vec<SubsetKey>>,
}

impl Clone for MatroidOracle {
    fn clone(&self) -> Self {
        MatroidOracle {
            spec: self.spec.clone(),
            n: self.n,
            rank: self.rank,
            block_of: self.block_of.clone(),
            explicit: self.explicit.clone(),
            independent: self.independent.clone(),
            bases: self.bases.clone(),
        }
    }
}

impl MatroidOracle {
    /// Validates `spec` against a ground set of `n` elements.
    ///
    /// Explicit families are checked against both axioms here and rejected
    /// with the witness on failure.
    pub fn new(spec: MatroidSpec, n: usize) -> Result<Self> {
        let mut block_of = Vec::new();
        let mut explicit = HashSet::new();
        let rank = match &spec {
            MatroidSpec::Uniform { rank } => {
                if *rank < 1 || *rank > n {
                    return Err(Error::InvalidMatroid(format!(
                        "uniform rank {rank} must lie in 1..={n}"
                    )));
                }
                *rank
            }
            MatroidSpec::Partition { blocks, capacities } => {
                if blocks.len() != capacities.len() {
                    return Err(Error::InvalidMatroid(format!(
                        "{} blocks but {} capacities",
                        blocks.len(),
                        capacities.len()
                    )));
                }
                block_of = vec![usize::MAX; n];
                for (b, block) in blocks.iter().enumerate() {
                    for &e in block {
                        if e >= n {
                            return Err(Error::InvalidMatroid(format!(
                                "block {b} names element {e} outside the ground set"
                            )));
                        }
                        if block_of[e] != usize::MAX {
                            return Err(Error::InvalidMatroid(format!(
                                "element {e} appears in more than one block"
                            )));
                        }
                        block_of[e] = b;
                    }
                }
                if let Some(e) = block_of.iter().position(|&b| b == usize::MAX) {
                    return Err(Error::InvalidMatroid(format!(
                        "element {e} is not covered by any block"
                    )));
                }
                blocks
                    .iter()
                    .zip(capacities)
                    .map(|(b, &c)| c.min(b.len()))
                    .sum()
            }
            MatroidSpec::Explicit { family } => {
                check_enumerable(n)?;
                let report = verify_matroid_axioms(family, n)?;
                if let Some((b, a)) = report.hereditary_violation {
                    return Err(Error::InvalidMatroid(format!(
                        "not hereditary: {b} is listed but its subset {a} is not"
                    )));
                }
                if let Some((a, b)) = report.augmentation_violation {
                    return Err(Error::InvalidMatroid(format!(
                        "augmentation fails: no element of {b} extends {a}"
                    )));
                }
                explicit = family.iter().copied().collect();
                explicit.iter().map(|s| s.len()).max().unwrap_or(0)
            }
        };
        Ok(MatroidOracle {
            spec,
            n,
            rank,
            block_of,
            explicit,
            independent: OnceLock::new(),
            bases: OnceLock::new(),
        })
    }

    pub fn uniform(n: usize, rank: usize) -> Result<Self> {
        MatroidOracle::new(MatroidSpec::Uniform { rank }, n)
    }

    pub fn spec(&self) -> &MatroidSpec {
        &self.spec
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rank `K` when the matroid is uniform.
    pub fn uniform_rank(&self) -> Option<usize> {
        match self.spec {
            MatroidSpec::Uniform { rank } => Some(rank),
            _ => None,
        }
    }

    pub fn is_independent(&self, s: SubsetKey) -> Result<bool> {
        s.check_within(self.n)?;
        Ok(self.contains(s))
    }

    /// Membership test for subsets already known to lie in the ground set.
    pub(crate) fn contains(&self, s: SubsetKey) -> bool {
        match &self.spec {
            MatroidSpec::Uniform { rank } => s.len() <= *rank,
            MatroidSpec::Partition { capacities, .. } => {
                let mut counts = vec![0usize; capacities.len()];
                s.elements().all(|e| {
                    let b = self.block_of[e];
                    counts[b] += 1;
                    counts[b] <= capacities[b]
                })
            }
            MatroidSpec::Explicit { .. } => self.explicit.contains(&s),
        }
    }

    /// All independent sets in (cardinality, mask) order.
    pub fn enumerate_independent(&self) -> Result<&[SubsetKey]> {
        check_enumerable(self.n)?;
        Ok(self.independent.get_or_init(|| match self.spec {
            MatroidSpec::Uniform { rank } => (0..=rank)
                .flat_map(|k| subsets_of_size(self.n, k))
                .collect(),
            _ => all_subsets(self.n).filter(|&s| self.contains(s)).collect(),
        }))
    }

    /// All maximal independent sets in ascending mask order.
    pub fn bases(&self) -> Result<&[SubsetKey]> {
        let independent = self.enumerate_independent()?;
        Ok(self.bases.get_or_init(|| {
            independent
                .iter()
                .copied()
                .filter(|&s| (0..self.n).all(|e| s.contains(e) || !self.contains(s.with(e))))
                .collect()
        }))
    }
}
