use thiserror::Error;

/// Errors raised by the geometry, transport and potential layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem configuration: {0}")]
    InvalidConfig(String),

    #[error("point lies outside the dual complex: {0}")]
    OutOfCone(String),

    #[error("point lies outside the simplex: {0}")]
    OutOfSimplex(String),

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("grid is empty")]
    EmptyGrid,

    #[error("measure has zero total mass")]
    ZeroMass,

    #[error("marginals are infeasible: {0}")]
    Infeasible(String),

    #[error("instance of size {rows}x{cols} exceeds the exact solver cap")]
    ResourceLimit { rows: usize, cols: usize },

    #[error("sinkhorn did not converge at eps = {eps} within {iterations} iterations (marginal error {error:e})")]
    NonConvergence { eps: f64, iterations: usize, error: f64 },

    #[error("log-domain underflow at eps = {0}")]
    NumericalUnderflow(f64),

    #[error("invalid epsilon schedule: {0}")]
    InvalidSchedule(String),

    #[error("transport plan carries no dual potentials")]
    MissingDuals,

    #[error("term list is empty")]
    EmptyTerms,

    #[error("malformed monomial term: {0}")]
    MalformedTerm(String),

    #[error("chamber {0} has no interior points")]
    EmptyChamber(usize),

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("permutation does not preserve the degrees")]
    DegreeMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
