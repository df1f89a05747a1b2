use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: at least 2 is required")]
    InvalidDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameter schedule undefined for n = {0} (need n >= 3)")]
    ScheduleUndefined(usize),

    #[error("vertex {vertex} has an empty annulus neighborhood")]
    MissingAnnulus { vertex: usize },

    #[error("degenerate experiment: {0}")]
    DegenerateExperiment(String),

    #[error("value iteration did not converge after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence {
        sweeps: usize,
        residual: f64,
        /// Residual after every sweep, in order.
        history: Vec<f64>,
    },

    #[error("episode {episode} did not reach the boundary within {max_steps} steps")]
    NonTermination { episode: usize, max_steps: usize },

    #[error("point lies outside the closed domain")]
    OutOfDomain,

    #[error("no feasible convex combination found among {samples} samples")]
    InfeasibleOracle { samples: usize },

    #[error("barrier exceeds the datum at boundary vertex {vertex} (excess {excess:e})")]
    BarrierPrecondition { vertex: usize, excess: f64 },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
