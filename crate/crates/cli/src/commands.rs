//! The five pipeline stages. Each writes per-run files under `<out>/<label>/`
//! and, where the stage aggregates runs, a table directly under `<out>`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rgg_envelope::dpp::{datum_sup_norm, solve_dpp, SolverOptions, ValueField};
use rgg_envelope::envelope::{median, sup_error, ConvergenceRecord, EvalGrid, NearestVertex};
use rgg_envelope::game::{monte_carlo_value, step_cap, McEstimate};
use rgg_envelope::geometry::DomainSpec;
use rgg_envelope::rgg::{coverage_report, Board, CoverageReport, ProximityGraph, Region, VertexClassification};
use rgg_envelope::Error as CoreError;
use serde::{Deserialize, Serialize};

use crate::cache::{CacheStatus, GraphCache};
use crate::config::{Datum, ExperimentConfig, RunSpec};
use crate::error::{CliError, Result};
use crate::output::{fmt_f64, write_json, Csv};

/// Resolved inputs shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub cache: GraphCache,
}

impl Context {
    /// `out` and `seeds` override the config's output directory and seed list.
    pub fn new(mut config: ExperimentConfig, out: Option<PathBuf>, seeds: Option<Vec<u64>>) -> Result<Self> {
        if let Some(seeds) = seeds {
            config.seeds = seeds;
        }
        config.validate()?;
        let out = out.unwrap_or_else(|| config.output_dir.clone());
        let cache = GraphCache::locate(&out);
        Ok(Self { config, out, cache })
    }

    pub fn load(path: &Path, out: Option<PathBuf>, seeds: Option<Vec<u64>>) -> Result<Self> {
        Self::new(ExperimentConfig::load(path)?, out, seeds)
    }

    fn run_dir(&self, run: &RunSpec) -> PathBuf {
        self.out.join(run.label())
    }

    fn graph(&self, run: &RunSpec) -> Result<(ProximityGraph, CacheStatus)> {
        self.cache.load_or_build(self.config.d, run)
    }

    fn board(&self, run: &RunSpec, domain: &DomainSpec) -> Result<Board> {
        let (graph, _) = self.graph(run)?;
        let board = Board::new(graph, domain, run.params.delta).map_err(|e| CliError::core(run.label(), e))?;
        let comp = board.classes().component().len();
        if comp < board.len() {
            eprintln!(
                "warning: {}: largest component holds {comp} of {} vertices; the rest carry no value",
                run.label(),
                board.len()
            );
        }
        Ok(board)
    }

    fn solver_options(&self, board: &Board, f: &Datum) -> SolverOptions {
        let mut opts = SolverOptions::for_sup_norm(datum_sup_norm(board, f));
        if let Some(tol) = self.config.solver.tol {
            opts.tol = tol;
        }
        opts.max_sweeps = self.config.solver.max_sweeps;
        opts
    }

    fn solve(&self, run: &RunSpec, board: &Board, f: &Datum) -> Result<(ValueField, SolverOptions)> {
        let opts = self.solver_options(board, f);
        let field = solve_dpp(board, f, opts).map_err(|e| CliError::core(run.label(), e))?;
        Ok((field, opts))
    }
}

/// Largest reflection error over the stencil, relative to `r`.
pub fn stencil_reflection_error(board: &Board) -> f64 {
    let st = board.stencil();
    let worst = (0..st.vertices().len()).map(|k| st.max_error_at(k)).fold(0.0, f64::max);
    worst / board.graph().radius()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildEntry {
    pub label: String,
    pub key: String,
    pub status: String,
    pub vertices: usize,
    pub edges: usize,
}

/// Samples and connects every run's cloud, reusing cache entries.
///
/// Writes `<out>/cache_manifest.csv`; hit/miss status goes to the returned
/// entries only, so the manifest is identical across re-runs.
pub fn cmd_build(ctx: &Context) -> Result<Vec<BuildEntry>> {
    let mut manifest = Csv::new(&["label", "n", "r", "seed", "key", "vertices", "edges"]);
    let mut entries = Vec::new();
    for run in ctx.config.runs()? {
        let (graph, status) = ctx.graph(&run)?;
        let key = GraphCache::key(ctx.config.d, &run);
        let edges = graph.adjacency().1.len() / 2;
        manifest.row(&[
            run.label(),
            run.params.n.to_string(),
            fmt_f64(run.params.r),
            run.seed.to_string(),
            key.clone(),
            graph.len().to_string(),
            edges.to_string(),
        ]);
        entries.push(BuildEntry {
            label: run.label(),
            key,
            status: format!("{status:?}").to_lowercase(),
            vertices: graph.len(),
            edges,
        });
    }
    manifest.write(&ctx.out.join("cache_manifest.csv"))?;
    Ok(entries)
}

/// Run summary written next to `values.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub d: usize,
    pub n: usize,
    pub r: f64,
    pub delta: f64,
    pub alpha: f64,
    pub seed: u64,
    pub datum: String,
    pub component_size: usize,
    pub interior: usize,
    pub boundary: usize,
    pub sweeps: usize,
    pub residual: f64,
    pub tol: f64,
    pub monotone: bool,
    pub max_reflection_error: f64,
}

fn values_csv(board: &Board, values: &[f64]) -> Csv {
    let d = board.graph().cloud().dim();
    let mut header = vec!["vertex_index".to_string()];
    header.extend((1..=d).map(|k| format!("x_{k}")));
    header.extend(["region".to_string(), "value".to_string()]);
    let mut csv = Csv::new(&header);
    let classes = board.classes();
    for v in 0..board.len() {
        let region = classes.region(v);
        if region == Region::Outside {
            continue;
        }
        let mut row = vec![v.to_string()];
        row.extend(board.point(v).iter().map(|&c| fmt_f64(c)));
        row.push(region.as_str().to_string());
        row.push(fmt_f64(values[v]));
        csv.row(&row);
    }
    csv
}

/// Solves the DPP for every run; writes `values.csv` and `summary.json`.
pub fn cmd_solve(ctx: &Context) -> Result<Vec<RunSummary>> {
    let domain = ctx.config.domain_spec()?;
    let f = ctx.config.datum()?;
    let mut out = Vec::new();
    for run in ctx.config.runs()? {
        let board = ctx.board(&run, &domain)?;
        let (field, opts) = ctx.solve(&run, &board, &f)?;
        let dir = ctx.run_dir(&run);
        values_csv(&board, field.values()).write(&dir.join("values.csv"))?;
        let classes = board.classes();
        let summary = RunSummary {
            label: run.label(),
            d: ctx.config.d,
            n: run.params.n,
            r: run.params.r,
            delta: run.params.delta,
            alpha: run.params.alpha,
            seed: run.seed,
            datum: field.datum_id.clone(),
            component_size: classes.component().len(),
            interior: classes.interior().len(),
            boundary: classes.boundary().len(),
            sweeps: field.sweeps,
            residual: field.residual,
            tol: opts.tol,
            monotone: field.monotone,
            max_reflection_error: stencil_reflection_error(&board),
        };
        write_json(&dir.join("summary.json"), &summary)?;
        out.push(summary);
    }
    Ok(out)
}

/// Interior vertices spread evenly over the interior list.
pub fn start_vertices(classes: &VertexClassification, count: usize) -> Vec<usize> {
    let interior = classes.interior();
    let mut starts: Vec<usize> = (0..count)
        .map(|k| interior[(2 * k + 1) * interior.len() / (2 * count)])
        .collect();
    starts.dedup();
    starts
}

#[derive(Debug, Clone, PartialEq)]
pub struct McRow {
    pub label: String,
    pub x0: usize,
    pub u_dpp: f64,
    pub estimate: McEstimate,
}

impl McRow {
    pub fn agrees(&self) -> bool {
        (self.estimate.mean - self.u_dpp).abs() <= 3.0 * self.estimate.stderr
    }
}

/// Plays the greedy game from the configured starts; writes `mc.csv` per run.
///
/// Fails with [`CliError::McDisagreement`] after writing every table if any
/// estimate is more than three standard errors from the DPP value.
pub fn cmd_simulate(ctx: &Context) -> Result<Vec<McRow>> {
    let domain = ctx.config.domain_spec()?;
    let f = ctx.config.datum()?;
    let mc = &ctx.config.mc;
    let mut rows = Vec::new();
    for run in ctx.config.runs()? {
        let board = ctx.board(&run, &domain)?;
        let (field, _) = ctx.solve(&run, &board, &f)?;
        let cap = step_cap(mc.step_cap_factor, ctx.config.d, run.params.r);
        let mut csv = Csv::new(&["x0_index", "u_dpp", "mc_mean", "mc_stderr", "N", "tau_mean", "tau_max"]);
        for x0 in start_vertices(board.classes(), mc.starts) {
            let estimate = monte_carlo_value(&board, &field, x0, mc.episodes, run.seed, cap)
                .map_err(|e| CliError::core(run.label(), e))?;
            let row = McRow {
                label: run.label(),
                x0,
                u_dpp: field.values()[x0],
                estimate,
            };
            csv.row(&[
                x0.to_string(),
                fmt_f64(row.u_dpp),
                fmt_f64(estimate.mean),
                fmt_f64(estimate.stderr),
                estimate.episodes.to_string(),
                fmt_f64(estimate.tau_mean),
                estimate.tau_max.to_string(),
            ]);
            rows.push(row);
        }
        csv.write(&ctx.run_dir(&run).join("mc.csv"))?;
    }
    let bad = rows.iter().filter(|r| !r.agrees()).count();
    if bad > 0 {
        return Err(CliError::McDisagreement { count: bad });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutcome {
    pub records: Vec<ConvergenceRecord>,
    /// Runs with an empty interior annulus, excluded from the tables.
    pub below_threshold: Vec<String>,
}

#[derive(Serialize)]
struct StudySummary<'a> {
    runtimes: Vec<(String, f64)>,
    below_threshold: &'a [String],
}

/// Convergence study over the schedule; writes `convergence.csv`,
/// `plotdata.csv` and `study_summary.json` (which holds the timings).
pub fn cmd_study(ctx: &Context) -> Result<StudyOutcome> {
    let domain = ctx.config.domain_spec()?;
    let Datum::Case(case) = ctx.config.datum()? else {
        return Err(CliError::Config("a study needs a datum with a closed-form envelope".into()));
    };
    let f = Datum::Case(case.clone());
    let mut records = Vec::new();
    let mut runtimes = Vec::new();
    let mut below = Vec::new();
    for run in ctx.config.runs()? {
        let start = Instant::now();
        let board = match ctx.board(&run, &domain) {
            Err(CliError::Core {
                source: CoreError::MissingAnnulus { vertex },
                ..
            }) => {
                eprintln!("note: {}: vertex {vertex} has an empty annulus; run excluded", run.label());
                below.push(run.label());
                continue;
            }
            other => other?,
        };
        let (field, _) = ctx.solve(&run, &board, &f)?;
        let index = NearestVertex::new(&board).map_err(|e| CliError::core(run.label(), e))?;
        let margin = ctx.config.eval_grid.margin.unwrap_or(run.params.r / 2.0);
        let grid = EvalGrid::new(ctx.config.eval_grid.resolution, margin);
        let err = sup_error(field.values(), &index, &case, &grid).map_err(|e| CliError::core(run.label(), e))?;
        let runtime = start.elapsed().as_secs_f64();
        runtimes.push((run.label(), runtime));
        records.push(ConvergenceRecord {
            n: run.params.n,
            r: run.params.r,
            delta: run.params.delta,
            alpha: run.params.alpha,
            seed: run.seed,
            sup_error: err.sup,
            mean_error: err.mean,
            sweeps: field.sweeps,
            max_reflection_error: stencil_reflection_error(&board),
            runtime,
        });
    }

    let mut conv = Csv::new(&[
        "n",
        "r",
        "delta",
        "alpha",
        "seed",
        "sup_error",
        "mean_error",
        "sweeps",
        "max_reflection_error",
    ]);
    for rec in &records {
        conv.row(&[
            rec.n.to_string(),
            fmt_f64(rec.r),
            fmt_f64(rec.delta),
            fmt_f64(rec.alpha),
            rec.seed.to_string(),
            fmt_f64(rec.sup_error),
            fmt_f64(rec.mean_error),
            rec.sweeps.to_string(),
            fmt_f64(rec.max_reflection_error),
        ]);
    }
    conv.write(&ctx.out.join("convergence.csv"))?;

    let mut plot = Csv::new(&["n", "r", "median_sup_error", "runs"]);
    for group in records.chunk_by(|a, b| a.n == b.n && a.r.to_bits() == b.r.to_bits()) {
        let errs: Vec<f64> = group.iter().map(|r| r.sup_error).collect();
        plot.row(&[
            group[0].n.to_string(),
            fmt_f64(group[0].r),
            fmt_f64(median(&errs)),
            group.len().to_string(),
        ]);
    }
    plot.write(&ctx.out.join("plotdata.csv"))?;
    write_json(
        &ctx.out.join("study_summary.json"),
        &StudySummary {
            runtimes,
            below_threshold: &below,
        },
    )?;
    Ok(StudyOutcome {
        records,
        below_threshold: below,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow {
    pub label: String,
    pub run: RunSpec,
    pub report: CoverageReport,
}

/// Sector coverage of every run; writes `coverage.csv`.
///
/// Fails with [`CliError::CoverageFailure`] after writing the table if any run
/// has an interior vertex with an empty annulus.
pub fn cmd_coverage(ctx: &Context) -> Result<Vec<CoverageRow>> {
    let domain = ctx.config.domain_spec()?;
    let mut rows = Vec::new();
    for run in ctx.config.runs()? {
        let (graph, _) = ctx.graph(&run)?;
        let classes = VertexClassification::new(&graph, &domain).map_err(|e| CliError::core(run.label(), e))?;
        let spacing = ctx.config.coverage.spacing.unwrap_or(run.params.alpha / 2.0);
        let report = coverage_report(&graph, &classes, &run.params, spacing)
            .map_err(|e| CliError::core(run.label(), e))?;
        rows.push(CoverageRow {
            label: run.label(),
            run,
            report,
        });
    }
    let mut csv = Csv::new(&[
        "n",
        "r",
        "delta",
        "alpha",
        "seed",
        "sectors_tested",
        "sectors_empty",
        "max_reflection_error",
        "mean_reflection_error",
        "expected_sector_count",
        "empty_annuli",
    ]);
    for row in &rows {
        let (p, rep) = (&row.run.params, &row.report);
        csv.row(&[
            p.n.to_string(),
            fmt_f64(p.r),
            fmt_f64(p.delta),
            fmt_f64(p.alpha),
            row.run.seed.to_string(),
            rep.sectors_tested.to_string(),
            rep.sectors_empty.to_string(),
            fmt_f64(rep.max_reflection_error),
            fmt_f64(rep.mean_reflection_error),
            fmt_f64(rep.expected_sector_count),
            rep.empty_annuli.to_string(),
        ]);
    }
    csv.write(&ctx.out.join("coverage.csv"))?;
    if let Some(row) = rows.iter().find(|r| r.report.empty_annuli > 0) {
        for r in rows.iter().filter(|r| r.report.empty_annuli > 0) {
            eprintln!(
                "error: {}: {} interior vertices have an empty annulus (below the empirical n0)",
                r.label, r.report.empty_annuli
            );
        }
        return Err(CliError::CoverageFailure {
            run: row.label.clone(),
            empty: row.report.empty_annuli,
        });
    }
    Ok(rows)
}
