//! Experiment configuration: a JSON object with a `schema_version` field.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "d": 2,
//!   "domain": { "kind": "ball", "center": [0.5, 0.5], "radius": 0.3 },
//!   "datum": { "case": "saddle" },
//!   "schedule": { "mode": "practical", "runs": [{ "n": 5000, "r": 0.12 }] },
//!   "seeds": [1, 2, 3]
//! }
//! ```
//!
//! Optional sections: `fixture`, `solver`, `mc`, `eval_grid`, `coverage`, `output_dir`.

use std::path::{Path, PathBuf};

use rgg_envelope::dpp::BoundaryDatum;
use rgg_envelope::envelope::EnvelopeCase;
use rgg_envelope::geometry::{schedule_params, DomainSpec, GraphParams, ScheduleMode, DEFAULT_LOG_POWER};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub d: usize,
    pub domain: DomainConfig,
    pub datum: DatumConfig,
    #[serde(default)]
    pub schedule: Option<ScheduleConfig>,
    /// Explicit points in place of a sampled cloud.
    #[serde(default)]
    pub fixture: Option<FixtureConfig>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub eval_grid: EvalGridConfig,
    #[serde(default)]
    pub coverage: CoverageConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid { center: Vec<f64>, radii: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumConfig {
    Constant {
        c: f64,
    },
    Affine {
        a: Vec<f64>,
        b: f64,
    },
    Saddle,
    /// `below` where `x[axis] < threshold`, `above` otherwise.
    Step {
        axis: usize,
        threshold: f64,
        below: f64,
        above: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleConfig {
    Practical {
        runs: Vec<PracticalRun>,
    },
    Paper {
        n: Vec<usize>,
        #[serde(default = "default_log_power")]
        log_power: f64,
    },
}

fn default_log_power() -> f64 {
    DEFAULT_LOG_POWER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PracticalRun {
    pub n: usize,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureConfig {
    pub points: Vec<Vec<f64>>,
    pub r: f64,
    pub delta: f64,
    #[serde(default = "default_fixture_alpha")]
    pub alpha: f64,
}

fn default_fixture_alpha() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Defaults to `1e-9 max(1, sup |f|)`.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_max_sweeps")]
    pub max_sweeps: usize,
}

fn default_max_sweeps() -> usize {
    1_000_000
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: None,
            max_sweeps: default_max_sweeps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub episodes: usize,
    pub step_cap_factor: f64,
    /// Number of interior starting vertices, spread over the sorted interior.
    pub starts: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            episodes: 20_000,
            step_cap_factor: rgg_envelope::game::DEFAULT_STEP_CAP_FACTOR,
            starts: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalGridConfig {
    pub resolution: usize,
    /// Defaults to `r / 2`.
    #[serde(default)]
    pub margin: Option<f64>,
}

impl Default for EvalGridConfig {
    fn default() -> Self {
        Self {
            resolution: 100,
            margin: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageConfig {
    /// Angular spacing of the direction net; defaults to `alpha / 2`.
    #[serde(default)]
    pub spacing: Option<f64>,
}

/// One `(n, r, seed)` experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub params: GraphParams,
    pub seed: u64,
    pub fixture: Option<Vec<Vec<f64>>>,
}

impl RunSpec {
    /// Directory name of the run's outputs.
    pub fn label(&self) -> String {
        match self.fixture {
            Some(_) => format!("fixture-s{}", self.seed),
            None => format!("n{}-r{}-s{}", self.params.n, self.params.r, self.seed),
        }
    }
}

/// The datum of a config: an envelope case or a step function.
#[derive(Debug, Clone)]
pub enum Datum {
    Case(EnvelopeCase),
    Step {
        axis: usize,
        threshold: f64,
        below: f64,
        above: f64,
    },
}

impl BoundaryDatum for Datum {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Datum::Case(c) => c.datum(x),
            Datum::Step {
                axis,
                threshold,
                below,
                above,
            } => {
                if x[*axis] < *threshold {
                    *below
                } else {
                    *above
                }
            }
        }
    }

    fn id(&self) -> String {
        match self {
            Datum::Case(c) => c.name().to_string(),
            Datum::Step { .. } => "step".to_string(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        let domain = self.domain_spec()?;
        if domain.dim() != self.d {
            return bad(format!("domain has dimension {}, config says d = {}", domain.dim(), self.d));
        }
        self.datum()?;
        match (&self.schedule, &self.fixture) {
            (Some(_), Some(_)) => return bad("give either a schedule or a fixture, not both".into()),
            (None, None) => return bad("a schedule or a fixture is required".into()),
            (Some(ScheduleConfig::Practical { runs }), None) if runs.is_empty() => {
                return bad("at least one (n, r) run is required".into())
            }
            (Some(ScheduleConfig::Paper { n, .. }), None) if n.is_empty() => {
                return bad("at least one n is required".into())
            }
            _ => {}
        }
        if let Some(tol) = self.solver.tol {
            if !(tol > 0.0) {
                return bad(format!("solver tol must be positive, got {tol}"));
            }
        }
        if self.mc.episodes == 0 || self.mc.starts == 0 || !(self.mc.step_cap_factor > 0.0) {
            return bad("mc episodes, starts and step_cap_factor must be positive".into());
        }
        if self.eval_grid.resolution == 0 || self.eval_grid.margin.is_some_and(|m| !(m >= 0.0)) {
            return bad("eval_grid needs a positive resolution and a nonnegative margin".into());
        }
        if self.coverage.spacing.is_some_and(|s| !(s > 0.0)) {
            return bad("coverage spacing must be positive".into());
        }
        self.runs().map(|_| ())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec> {
        match &self.domain {
            DomainConfig::Ball { center, radius } => DomainSpec::ball(center.clone(), *radius),
            DomainConfig::Ellipsoid { center, radii } => DomainSpec::ellipsoid(center.clone(), radii.clone()),
        }
        .map_err(|e| CliError::Config(format!("domain: {e}")))
    }

    pub fn datum(&self) -> Result<Datum> {
        let domain = self.domain_spec()?;
        let err = |e: rgg_envelope::Error| CliError::Config(format!("datum: {e}"));
        Ok(match &self.datum {
            DatumConfig::Constant { c } => Datum::Case(EnvelopeCase::constant(domain, *c)),
            DatumConfig::Affine { a, b } => Datum::Case(EnvelopeCase::affine(domain, a.clone(), *b).map_err(err)?),
            DatumConfig::Saddle => Datum::Case(EnvelopeCase::saddle_on(domain).map_err(err)?),
            DatumConfig::Step {
                axis,
                threshold,
                below,
                above,
            } => {
                if *axis >= self.d {
                    return Err(CliError::Config(format!("step axis {axis} out of range")));
                }
                Datum::Step {
                    axis: *axis,
                    threshold: *threshold,
                    below: *below,
                    above: *above,
                }
            }
        })
    }

    /// Expands the schedule and seed list into runs ordered by `(n, r, seed)`.
    pub fn runs(&self) -> Result<Vec<RunSpec>> {
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        let err = |e: rgg_envelope::Error| CliError::Config(format!("schedule: {e}"));
        let mut params = Vec::new();
        if let Some(fx) = &self.fixture {
            let p = GraphParams::new(fx.points.len(), fx.r, fx.delta, fx.alpha).map_err(err)?;
            return Ok(seeds
                .iter()
                .map(|&seed| RunSpec {
                    params: p,
                    seed,
                    fixture: Some(fx.points.clone()),
                })
                .collect());
        }
        match &self.schedule {
            Some(ScheduleConfig::Practical { runs }) => {
                for run in runs {
                    params.push(schedule_params(run.n, self.d, ScheduleMode::Practical { r: run.r }).map_err(err)?);
                }
            }
            Some(ScheduleConfig::Paper { n, log_power }) => {
                for &n in n {
                    let mode = ScheduleMode::Asymptotic { log_power: *log_power };
                    params.push(schedule_params(n, self.d, mode).map_err(err)?);
                }
            }
            None => return Err(CliError::Config("missing schedule".into())),
        }
        params.sort_by(|a, b| a.n.cmp(&b.n).then(a.r.total_cmp(&b.r)));
        params.dedup();
        Ok(params
            .iter()
            .flat_map(|p| {
                seeds.iter().map(move |&seed| RunSpec {
                    params: *p,
                    seed,
                    fixture: None,
                })
            })
            .collect())
    }
}
