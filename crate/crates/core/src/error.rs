use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid distribution: {0}")]
    InvalidSpec(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("point {0:?} is not in the interior of the log-Laplace domain")]
    NotInterior(Vec<f64>),
    #[error("zero-mass face or hyperplane")]
    ZeroMass,
    #[error("hyperplane carries the full mass")]
    FullMass,
    #[error("hyperplane does not support the convex support")]
    NotSupporting,
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("the domain of K has empty interior")]
    EmptyInterior,
    #[error("refused: {0}")]
    Refused(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
