//! Parameter schedules tying the sample size to the graph radius, annulus width
//! and cone aperture.

use crate::error::{Error, Result};

/// Power of `log n` in the asymptotic radius `r^{2d} = (log n)^p / sqrt(n)`.
pub const DEFAULT_LOG_POWER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub n: usize,
    /// Connection radius.
    pub r: f64,
    /// Relative annulus width: annulus radii are `(1 - delta) r` and `r`.
    pub delta: f64,
    /// Cone aperture parameter of the coverage sectors.
    pub alpha: f64,
}

impl GraphParams {
    pub fn new(n: usize, r: f64, delta: f64, alpha: f64) -> Result<Self> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(r) {
            return Err(Error::InvalidParameter(format!("radius {r} outside (0,1)")));
        }
        if !open_unit(delta) {
            return Err(Error::InvalidParameter(format!("delta {delta} outside (0,1)")));
        }
        if !open_unit(alpha) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0,1)")));
        }
        Ok(Self { n, r, delta, alpha })
    }

    /// Inner annulus radius `(1 - delta) r`.
    pub fn inner_radius(&self) -> f64 {
        (1.0 - self.delta) * self.r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleMode {
    /// Radius chosen from `n` so that `sqrt(n) r^{2d} / log n = (log n)^{p-1}` diverges.
    Asymptotic { log_power: f64 },
    /// Radius given explicitly.
    Practical { r: f64 },
}

impl ScheduleMode {
    pub fn asymptotic() -> Self {
        ScheduleMode::Asymptotic {
            log_power: DEFAULT_LOG_POWER,
        }
    }
}

/// `delta = r / sqrt(log n)` and `alpha = r / (log n)^{1/(2(d-1))}`, natural log.
pub fn schedule_params(n: usize, d: usize, mode: ScheduleMode) -> Result<GraphParams> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if n < 3 {
        return Err(Error::ScheduleUndefined(n));
    }
    let log_n = (n as f64).ln();
    let r = match mode {
        ScheduleMode::Asymptotic { log_power } => {
            (log_n.powf(log_power) / (n as f64).sqrt()).powf(1.0 / (2 * d) as f64)
        }
        ScheduleMode::Practical { r } => r,
    };
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "radius {r} outside (0,1) for n = {n}"
        )));
    }
    let delta = r / log_n.sqrt();
    let alpha = r / log_n.powf(1.0 / (2 * (d - 1)) as f64);
    GraphParams::new(n, r, delta, alpha)
}
