//! Continuum ground truth and verification of the discrete scheme.

mod barrier;
mod cases;
mod consistency;
mod extension;
mod linalg;
mod oracle;
mod study;
mod test_fn;
#[cfg(test)]
pub(crate) mod testing;

pub use barrier::{barrier_residual, barrier_slope, Barrier, BarrierResidual};
pub use cases::{CaseKind, EnvelopeCase};
pub use consistency::{
    consistency_report, discrete_operator, median, median_sorted, ConsistencyReport, VertexResidual,
};
pub use extension::{extend_values, sup_error, sup_error_against, ErrorSummary, EvalGrid, NearestVertex};
pub use linalg::{jacobi_eigenvalues, lambda_min, quadratic_form};
pub use oracle::{brute_envelope_oracle, MIN_ORACLE_SAMPLES};
pub use study::ConvergenceRecord;
pub use test_fn::{Quadratic, SmoothTestFunction};
