use thiserror::Error;

/// Errors produced by the solvers and the report writers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation too short: ground state is still {ratio:.2e} of its peak near t_max = {t_max}")]
    InadequateTruncation { t_max: f64, ratio: f64 },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("factorization breakdown at pivot {pivot} with shift {shift}")]
    Factorization { pivot: usize, shift: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("band scan failed at tau = {tau}: {source}")]
    BandScan {
        tau: f64,
        /// Values that were computed before the failure, sorted by tau.
        partial: Vec<(f64, f64)>,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the failure comes from an eigensolver rather than from bad input.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::Factorization { .. } | Error::NotConverged { .. } => true,
            Error::BandScan { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
