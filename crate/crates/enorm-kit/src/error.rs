use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("operator is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("energy budget infeasible: {0}")]
    Infeasible(String),

    #[error("dual bracket not found: h still decreasing at lambda = {lambda_cap:e}")]
    NoBracket { lambda_cap: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("empty Kraus family")]
    EmptyKraus,

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operator is not a contraction (norm {norm:e})")]
    NotContraction { norm: f64 },

    #[error("map is not subunital (largest eigenvalue of the adjoint at identity {lambda_max:e})")]
    NotSubunital { lambda_max: f64 },

    #[error("state violates the energy or trace constraint: {0}")]
    InfeasibleState(String),

    #[error("energy {energy} exceeds truncation threshold {limit} for {operator}")]
    GridTooLarge {
        operator: String,
        energy: f64,
        limit: f64,
    },

    #[error("unknown suite: {0}")]
    UnknownSuite(String),

    #[error("bad parameters: {0}")]
    BadParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
