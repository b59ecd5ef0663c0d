//! Greedy maximization of polymatroid functions under matroid constraints,
//! with curvature-based certificates for the greedy approximation ratio.
//!
//! The crate covers four layers:
//!
//! * [`subset`] and [`matroid`]: bitmask subsets, matroid oracles and axiom
//!   verification.
//! * [`objective`]: tabulated and parametric set functions plus exhaustive
//!   monotonicity / submodularity checks.
//! * [`solver`], [`curvature`], [`extension`]: the greedy and exhaustive
//!   solvers, total and matroid curvature, the ratio bounds, and the
//!   construction of polymatroid extensions for functions that are only
//!   defined on the independent sets.
//! * [`instance`], [`report`], [`random`], [`reproduce`]: file formats, report
//!   assembly, seeded instance generation and the worked reference examples
//!   used by the `subcert` command-line tool.

pub mod curvature;
pub mod error;
pub mod extension;
pub mod instance;
pub mod matroid;
pub mod objective;
pub mod random;
pub mod report;
pub mod reproduce;
pub mod solver;
pub mod subset;

pub use error::{Error, Result};
pub use matroid::{MatroidOracle, MatroidSpec};
pub use objective::{EvalDomain, SetFunction, TableFunction};
pub use subset::{GroundSet, SubsetKey};
