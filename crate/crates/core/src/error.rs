use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph has no positive weights, no nontrivial ladder exists")]
    EmptyGraph,

    #[error("degenerate split at threshold {threshold}: {side} group is empty")]
    DegenerateSplit { threshold: f64, side: &'static str },

    #[error("no threshold yields a component holding {fraction} of the nodes")]
    NoGiantComponent { fraction: f64 },

    #[error("diameter undefined: no connected pair of nodes")]
    UndefinedDiameter,

    #[error("Laplacian block of size {size} is numerically singular")]
    SingularLaplacian { size: usize },

    #[error("collinear design: {0}")]
    CollinearDesign(String),

    #[error("indegree has zero variance, correlation {rho} cannot be realized")]
    UnrealizableCorrelation { rho: f64 },

    #[error("every cell is missing for statistic {0}")]
    AllCellsMissing(String),

    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("config: {0}")]
    Config(#[from] toml::de::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
