use crate::subset::SubsetKey;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("subset {mask:#b} has bits outside a ground set of {n} elements")]
    InvalidSubset { mask: u32, n: usize },

    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),

    #[error("ground set of {n} elements exceeds the enumeration cap of {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error(
        "set {set} lies outside the domain of a matroid-only objective; \
         extend the function to the power set before querying it there"
    )]
    Domain { set: SubsetKey },

    #[error(
        "total curvature needs the objective on every subset of the ground set, \
         but this objective is defined on the independent sets only; \
         build a polymatroid extension first"
    )]
    NotTotal,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("curvature {0} lies outside [0, 1]")]
    InvalidCurvature(f64),

    #[error("construction order violated: {set} is needed but has no value yet")]
    ConstructionOrder { set: SubsetKey },

    #[error("instance error at {context}: {message}")]
    Instance { context: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
