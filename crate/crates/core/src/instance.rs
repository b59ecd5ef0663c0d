//! JSON instance files.
//!
//! ```json
//! { "ground_set": ["a1","a2","a3","a4"],
//!   "matroid": {"type": "uniform", "rank": 2},
//!   "objective": {"type": "task_scheduling", "subtasks": 1,
//!                 "success_prob": [[0.4, 0.6, 0.8, 0.9]]} }
//! ```
//!
//! Sets are arrays of element labels; on output they are listed in ground-set
//! order.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matroid::{MatroidOracle, MatroidSpec};
use crate::objective::{EvalDomain, SetFunction, TableFunction, DEFAULT_TOLERANCE};
use crate::subset::{GroundSet, SubsetKey};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub ground_set: Vec<String>,
    pub matroid: MatroidRecord,
    pub objective: ObjectiveRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatroidRecord {
    Uniform {
        rank: usize,
    },
    Partition {
        blocks: Vec<Vec<String>>,
        capacities: Vec<usize>,
    },
    Explicit {
        independent_sets: Vec<Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub set: Vec<String>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveRecord {
    TaskScheduling {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subtasks: Option<usize>,
        success_prob: Vec<Vec<f64>>,
    },
    InfoGain {
        alphas: Vec<f64>,
    },
    Additive {
        weights: Vec<f64>,
    },
    Table {
        domain: EvalDomain,
        entries: Vec<TableEntry>,
    },
}

impl ObjectiveRecord {
    pub fn kind(&self) -> &'static str {
        match self {
            ObjectiveRecord::TaskScheduling { .. } => "task_scheduling",
            ObjectiveRecord::InfoGain { .. } => "info_gain",
            ObjectiveRecord::Additive { .. } => "additive",
            ObjectiveRecord::Table { .. } => "table",
        }
    }
}

impl MatroidRecord {
    pub fn kind(&self) -> &'static str {
        match self {
            MatroidRecord::Uniform { .. } => "uniform",
            MatroidRecord::Partition { .. } => "partition",
            MatroidRecord::Explicit { .. } => "explicit",
        }
    }
}

fn context_err(context: impl Into<String>, e: Error) -> Error {
    match e {
        Error::SizeCap { .. } => e,
        other => Error::Instance {
            context: context.into(),
            message: other.to_string(),
        },
    }
}

/// A parsed and validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    /// SHA-256 of the canonical JSON serialization.
    pub hash: String,
    pub ground: GroundSet,
    pub matroid: MatroidOracle,
    pub objective: SetFunction,
    pub tolerance: f64,
    pub file: InstanceFile,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        InstanceFile::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance records always serialize")
    }

    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("instance records always serialize");
        format!("{:x}", Sha256::digest(canonical.as_bytes()))
    }

    /// Validates every record and builds the oracle and objective.
    pub fn build(&self) -> Result<Instance> {
        let ground = GroundSet::new(self.ground_set.iter().cloned())
            .map_err(|e| context_err("ground_set", e))?;
        let n = ground.len();
        let tolerance = self.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::Instance {
                context: "tolerance".into(),
                message: format!("{tolerance} must be a finite nonnegative number"),
            });
        }

        let labels_to_set =
            |labels: &[String], ctx: String| ground.subset(labels).map_err(|e| context_err(ctx, e));

        let spec = match &self.matroid {
            MatroidRecord::Uniform { rank } => MatroidSpec::Uniform { rank: *rank },
            MatroidRecord::Partition { blocks, capacities } => {
                let blocks = blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        b.iter()
                            .map(|l| {
                                ground.index_of(l).ok_or_else(|| Error::Instance {
                                    context: format!("matroid.blocks[{i}]"),
                                    message: format!("unknown element label {l:?}"),
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                MatroidSpec::Partition {
                    blocks,
                    capacities: capacities.clone(),
                }
            }
            MatroidRecord::Explicit { independent_sets } => MatroidSpec::Explicit {
                family: independent_sets
                    .iter()
                    .enumerate()
                    .map(|(i, s)| labels_to_set(s, format!("matroid.independent_sets[{i}]")))
                    .collect::<Result<Vec<_>>>()?,
            },
        };
        let matroid = MatroidOracle::new(spec, n).map_err(|e| context_err("matroid", e))?;

        let objective = match &self.objective {
            ObjectiveRecord::TaskScheduling {
                subtasks,
                success_prob,
            } => {
                if let Some(k) = subtasks {
                    if *k != success_prob.len() {
                        return Err(Error::Instance {
                            context: "objective.subtasks".into(),
                            message: format!(
                                "declares {k} subtasks but success_prob has {} rows",
                                success_prob.len()
                            ),
                        });
                    }
                }
                if let Some((i, row)) = success_prob.iter().enumerate().find(|(_, r)| r.len() != n)
                {
                    return Err(Error::Instance {
                        context: format!("objective.success_prob[{i}]"),
                        message: format!("has {} entries for {n} elements", row.len()),
                    });
                }
                SetFunction::task_scheduling(success_prob.clone())
                    .map_err(|e| context_err("objective.success_prob", e))?
            }
            ObjectiveRecord::InfoGain { alphas } => {
                check_len("objective.alphas", alphas.len(), n)?;
                SetFunction::info_gain(alphas.clone())
                    .map_err(|e| context_err("objective.alphas", e))?
            }
            ObjectiveRecord::Additive { weights } => {
                check_len("objective.weights", weights.len(), n)?;
                SetFunction::additive(weights.clone())
                    .map_err(|e| context_err("objective.weights", e))?
            }
            ObjectiveRecord::Table { domain, entries } => {
                let parsed = entries
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        labels_to_set(&e.set, format!("objective.entries[{i}].set"))
                            .map(|s| (s, e.value))
                    })
                    .collect::<Result<Vec<_>>>()?;
                SetFunction::Table(
                    TableFunction::new(n, *domain, parsed, Some(&matroid))
                        .map_err(|e| context_err("objective.entries", e))?,
                )
            }
        };

        let hash = self.hash();
        Ok(Instance {
            id: self
                .id
                .clone()
                .unwrap_or_else(|| format!("instance-{}", &hash[..12])),
            hash,
            ground,
            matroid,
            objective,
            tolerance,
            file: self.clone(),
        })
    }
}

fn check_len(context: &str, got: usize, n: usize) -> Result<()> {
    if got == n {
        Ok(())
    } else {
        Err(Error::Instance {
            context: context.into(),
            message: format!("has {got} entries for {n} elements"),
        })
    }
}

/// Label arrays for a table over `ground`, in (cardinality, mask) order.
pub fn table_entries(ground: &GroundSet, values: &[(SubsetKey, f64)]) -> Vec<TableEntry> {
    values
        .iter()
        .map(|&(s, value)| TableEntry {
            set: ground.labels_of(s),
            value,
        })
        .collect()
}
