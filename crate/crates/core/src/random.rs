//! Seeded random instances for property suites.
//!
//! Every generated objective is a polymatroid function on the whole power
//! set: task-scheduling and information-gain objectives by construction, and
//! weighted coverage tables because a union of covered items only grows and
//! each new item adds less once more items are already covered.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{InstanceFile, MatroidRecord, ObjectiveRecord, TableEntry};
use crate::matroid::{MatroidOracle, MatroidSpec};
use crate::subset::{all_subsets, check_enumerable, SubsetKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveFamily {
    TaskScheduling,
    InfoGain,
    Coverage,
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatroidFamily {
    Uniform,
    Partition,
    /// A truncated partition matroid listed set by set.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    pub n: usize,
    pub family: ObjectiveFamily,
    pub matroid: MatroidFamily,
    /// Rank of a uniform matroid; drawn at random when absent.
    pub rank: Option<usize>,
}

pub fn random_instance(spec: &RandomSpec) -> Result<InstanceFile> {
    let n = spec.n;
    check_enumerable(n)?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "ground set needs at least one element".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let labels: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    let names = |elems: &[usize]| elems.iter().map(|&e| labels[e].clone()).collect::<Vec<_>>();

    let matroid = match spec.matroid {
        MatroidFamily::Uniform => {
            let rank = match spec.rank {
                Some(k) => k,
                None => rng.gen_range(1..=n.saturating_sub(1).max(1)),
            };
            MatroidRecord::Uniform { rank }
        }
        MatroidFamily::Partition => {
            let (blocks, capacities) = random_partition(&mut rng, n);
            MatroidRecord::Partition {
                blocks: blocks.iter().map(|b| names(b)).collect(),
                capacities,
            }
        }
        MatroidFamily::Explicit => {
            let (blocks, capacities) = random_partition(&mut rng, n);
            let oracle = MatroidOracle::new(MatroidSpec::Partition { blocks, capacities }, n)?;
            let truncate_to = rng.gen_range(1..=oracle.rank());
            let family: Vec<SubsetKey> = oracle
                .enumerate_independent()?
                .iter()
                .copied()
                .filter(|s| s.len() <= truncate_to)
                .collect();
            MatroidRecord::Explicit {
                independent_sets: family
                    .iter()
                    .map(|s| names(&s.elements().collect::<Vec<_>>()))
                    .collect(),
            }
        }
    };

    let objective = match spec.family {
        ObjectiveFamily::TaskScheduling => {
            let subtasks = rng.gen_range(1..=2);
            let success_prob = (0..subtasks)
                .map(|_| (0..n).map(|_| rng.gen_range(0.05..=1.0)).collect())
                .collect();
            ObjectiveRecord::TaskScheduling {
                subtasks: Some(subtasks),
                success_prob,
            }
        }
        ObjectiveFamily::InfoGain => ObjectiveRecord::InfoGain {
            alphas: (0..n).map(|_| rng.gen_range(0.5..=1.0)).collect(),
        },
        ObjectiveFamily::Additive => ObjectiveRecord::Additive {
            weights: (0..n).map(|_| rng.gen_range(0.1..=1.0)).collect(),
        },
        ObjectiveFamily::Coverage => {
            let items = 2 * n + 2;
            let weights: Vec<f64> = (0..items).map(|_| rng.gen_range(0.1..=1.0)).collect();
            let covers: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let mut c: Vec<usize> = (0..items).filter(|_| rng.gen_bool(0.3)).collect();
                    if c.is_empty() {
                        c.push(rng.gen_range(0..items));
                    }
                    c
                })
                .collect();
            let entries = all_subsets(n)
                .map(|s| {
                    let mut covered = vec![false; items];
                    for e in s.elements() {
                        for &it in &covers[e] {
                            covered[it] = true;
                        }
                    }
                    let value = covered
                        .iter()
                        .zip(&weights)
                        .filter(|(c, _)| **c)
                        .map(|(_, w)| w)
                        .fold(0.0, |acc, w| acc + w);
                    TableEntry {
                        set: names(&s.elements().collect::<Vec<_>>()),
                        value,
                    }
                })
                .collect();
            ObjectiveRecord::Table {
                domain: crate::objective::EvalDomain::PowerSet,
                entries,
            }
        }
    };

    Ok(InstanceFile {
        id: Some(format!(
            "random-{}-{}-n{}-seed{}",
            family_name(spec.family),
            matroid_name(spec.matroid),
            n,
            spec.seed
        )),
        ground_set: labels,
        matroid,
        objective,
        tolerance: None,
    })
}

fn family_name(f: ObjectiveFamily) -> &'static str {
    match f {
        ObjectiveFamily::TaskScheduling => "task-scheduling",
        ObjectiveFamily::InfoGain => "info-gain",
        ObjectiveFamily::Coverage => "coverage",
        ObjectiveFamily::Additive => "additive",
    }
}

fn matroid_name(m: MatroidFamily) -> &'static str {
    match m {
        MatroidFamily::Uniform => "uniform",
        MatroidFamily::Partition => "partition",
        MatroidFamily::Explicit => "explicit",
    }
}

/// Random blocks (all non-empty) with capacities between 1 and the block size.
fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let count = rng.gen_range(1..=n.min(3));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut blocks = vec![Vec::new(); count];
    for (i, &e) in order.iter().enumerate() {
        let b = if i < count {
            i
        } else {
            rng.gen_range(0..count)
        };
        blocks[b].push(e);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    let capacities = blocks.iter().map(|b| rng.gen_range(1..=b.len())).collect();
    (blocks, capacities)
}

/// The mixed suite used by the property tests: seeds `0..count`, cycling
/// through every objective family (except additive) and matroid family, with
/// ground sets of 3 to `max_n` elements.
pub fn suite(count: u64, max_n: usize) -> impl Iterator<Item = RandomSpec> {
    const FAMILIES: [ObjectiveFamily; 3] = [
        ObjectiveFamily::TaskScheduling,
        ObjectiveFamily::InfoGain,
        ObjectiveFamily::Coverage,
    ];
    const MATROIDS: [MatroidFamily; 3] = [
        MatroidFamily::Uniform,
        MatroidFamily::Partition,
        MatroidFamily::Explicit,
    ];
    (0..count).map(move |seed| RandomSpec {
        seed,
        n: 3 + (seed as usize / 9) % (max_n - 2),
        family: FAMILIES[seed as usize % 3],
        matroid: MATROIDS[(seed as usize / 3) % 3],
        rank: None,
    })
}
