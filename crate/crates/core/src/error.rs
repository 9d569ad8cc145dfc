use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pole at distance {distance:e} from the boundary is too close (minimum {minimum:e})")]
    PoleTooClose { distance: f64, minimum: f64 },
    #[error("point {0} is not on the boundary")]
    NotOnBoundary(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("weight is non-finite or non-positive at node {0}")]
    NonFiniteWeight(String),
    #[error("Gram matrix is singular beyond regularization (condition estimate {condition:e})")]
    SingularGram { condition: f64 },
    #[error("infeasible jet constraints: {0}")]
    Infeasible(String),
    #[error("character periods live on different generators ({0} vs {1})")]
    MismatchedGenerators(usize, usize),
}

pub type Result<V> = std::result::Result<V, LabError>;
