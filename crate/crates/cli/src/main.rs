use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rgg_envelope_cli::commands::{cmd_build, cmd_coverage, cmd_simulate, cmd_solve, cmd_study};
use rgg_envelope_cli::{CliError, Context};

#[derive(Parser)]
#[command(name = "rgg-envelope", version, about = "Convex envelopes from games on random geometric graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample clouds and build proximity graphs into the cache.
    Build(Common),
    /// Solve the DPP per run; writes values.csv and summary.json.
    Solve(Common),
    /// Cross-check the solver by Monte Carlo play; writes mc.csv.
    Simulate(Common),
    /// Convergence study against the closed-form envelope.
    Study(Common),
    /// Sector coverage and reflection-error diagnostics.
    Coverage(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated seeds replacing the config's list.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (Command::Build(c)
    | Command::Solve(c)
    | Command::Simulate(c)
    | Command::Study(c)
    | Command::Coverage(c)) = &cli.command;
    if let Some(jobs) = c.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let ctx = Context::load(&c.config, c.out.clone(), c.seeds.clone())?;
    match cli.command {
        Command::Build(_) => {
            for e in cmd_build(&ctx)? {
                println!("{}: {} ({} vertices, {} edges)", e.label, e.status, e.vertices, e.edges);
            }
        }
        Command::Solve(_) => {
            for s in cmd_solve(&ctx)? {
                println!("{}: {} sweeps, residual {:.3e}", s.label, s.sweeps, s.residual);
            }
        }
        Command::Simulate(_) => {
            let rows = cmd_simulate(&ctx)?;
            println!("{} starting vertices agree within 3 standard errors", rows.len());
        }
        Command::Study(_) => {
            let out = cmd_study(&ctx)?;
            for r in &out.records {
                println!("n={} r={} seed={}: sup error {:.4e}", r.n, r.r, r.seed, r.sup_error);
            }
        }
        Command::Coverage(_) => {
            for row in cmd_coverage(&ctx)? {
                println!(
                    "{}: {}/{} sectors empty, max reflection error {:.3}",
                    row.label, row.report.sectors_empty, row.report.sectors_tested, row.report.max_reflection_error
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
