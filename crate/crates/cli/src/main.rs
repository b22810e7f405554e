use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nfg_cli::commands::{self, RunOptions};
use nfg_cli::experiments::{run_experiment, ExperimentOptions, EXPERIMENTS};
use nfg_cli::spec::ModelSpec;
use nfg_cli::suite::run_suite;
use nfg_cli::{CliError, CliResult, DEFAULT_SEED};
use nfg_core::BpConfig;

/// Primal and dual normal factor graphs: exact sums, BP, samplers and figure data.
#[derive(Debug, Parser)]
#[command(name = "nfg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Model description (JSON).
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reduced sizes and realization counts.
    #[arg(long, global = true)]
    quick: bool,
    /// Number of recorded samples for samplers.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// BP damping in [0, 1).
    #[arg(long, global = true)]
    damping: Option<f64>,
    /// BP convergence tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a model and print its primal and dual factor tables.
    Model,
    /// Exact marginals in both domains and the duality residual.
    Exact,
    /// Belief propagation in both domains.
    Bp,
    /// Gibbs sampling in both domains.
    Gibbs,
    /// Subgraphs-world process, mapped to the primal domain.
    Swp,
    /// Primal/dual marginal mapping on exact marginals.
    Map,
    /// Gaussian model variances: exact and sampled.
    Gaussian,
    /// Regenerate the data behind one figure as CSV.
    Experiment {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXPERIMENTS))]
        name: String,
    },
    /// Run the validation suite and print a pass/fail matrix.
    Validate,
}

impl Cli {
    fn bp(&self) -> BpConfig {
        let d = BpConfig::default();
        BpConfig {
            damping: self.damping.unwrap_or(d.damping),
            tol: self.tol.unwrap_or(d.tol),
            ..d
        }
    }

    fn spec(&self) -> CliResult<ModelSpec> {
        let path = self
            .spec
            .as_deref()
            .ok_or_else(|| CliError::Spec("--spec FILE is required for this command".into()))?;
        ModelSpec::from_file(path)
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(format!("writing {}", p.display()), e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("writing stdout", e))
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let bp = cli.bp();
    bp.validate()?;
    let opts = RunOptions { seed: cli.seed, samples: cli.samples, bp };
    let value = match &cli.command {
        Command::Model => commands::model(&cli.spec()?)?,
        Command::Exact => commands::exact(&cli.spec()?)?,
        Command::Bp => commands::bp(&cli.spec()?, &opts)?,
        Command::Gibbs => commands::gibbs(&cli.spec()?, &opts)?,
        Command::Swp => commands::swp(&cli.spec()?, &opts)?,
        Command::Map => commands::map(&cli.spec()?)?,
        Command::Gaussian => commands::gaussian(&cli.spec()?, &opts)?,
        Command::Experiment { name } => {
            let eo = ExperimentOptions { seed: cli.seed, quick: cli.quick, samples: cli.samples, bp };
            let table = run_experiment(name, &eo)?;
            match &cli.out {
                Some(p) => {
                    let side = table.write_files(p)?;
                    eprintln!("wrote {} and {}", p.display(), side.display());
                }
                None => emit(None, &table.to_csv_string()?)?,
            }
            return Ok(());
        }
        Command::Validate => {
            let report = run_suite(cli.seed, |c| println!("{}", c.line()));
            println!(
                "{} of {} checks passed in {:.1}s (seed {})",
                report.checks.len() - report.failures(),
                report.checks.len(),
                report.seconds,
                report.seed
            );
            if let Some(p) = &cli.out {
                emit(Some(p), &(serde_json::to_string_pretty(&report)? + "\n"))?;
            }
            return match report.failures() {
                0 => Ok(()),
                failed => Err(CliError::Validation { failed }),
            };
        }
    };
    emit(cli.out.as_deref(), &(serde_json::to_string_pretty(&value)? + "\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nfg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
