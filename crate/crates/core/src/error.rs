use thiserror::Error;

/// Errors raised by the simulation and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    Hermiticity { deviation: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("inconsistent state entries: {0}")]
    State(String),

    #[error("probe factor vanishes (g3 = g4 = 0); mixing angle undefined")]
    DegenerateProbe,

    #[error("degenerate condition: denominator {denominator:.3e} is too small")]
    DegenerateCondition { denominator: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("vector is not normalized (norm {norm})")]
    Normalization { norm: f64 },

    #[error("invalid probability vector: {0}")]
    Probability(String),

    #[error("argument outside its domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
