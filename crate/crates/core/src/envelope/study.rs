/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub r: f64,
    pub delta: f64,
    pub alpha: f64,
    pub seed: u64,
    pub sup_error: f64,
    pub mean_error: f64,
    pub sweeps: usize,
    /// Worst reflection error over the interior, relative to `r`.
    pub max_reflection_error: f64,
    /// Wall-clock seconds for build, solve and evaluation.
    pub runtime: f64,
}

impl ConvergenceRecord {
    pub fn is_consistent(&self) -> bool {
        self.sup_error >= self.mean_error && self.mean_error >= 0.0
    }
}
