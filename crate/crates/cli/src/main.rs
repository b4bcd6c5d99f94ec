use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dznd_cli::sweep::{cmd_sweep, SweepSpec};
use dznd_cli::{cmd_run, parse_gamma, parse_model, verify, CliError, RunSpec};
use dznd_core::solver::{DEFAULT_DIVERGENCE_THRESHOLD, DEFAULT_DURATION, DEFAULT_SEED};
use dznd_core::Outcome;

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DIVERGED: u8 = 3;
const EXIT_VERIFY_FAILED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "dznd",
    version,
    about = "Discrete zeroing dynamics for time-variant Sylvester-conjugate equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Built-in problem: example1 or example2.
    #[arg(long, default_value = "example2")]
    problem: String,

    /// Simulated time span in seconds.
    #[arg(long, default_value_t = DEFAULT_DURATION)]
    duration: f64,

    /// Seed for the random initial state.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Residual above which a run counts as diverged.
    #[arg(long, default_value_t = DEFAULT_DIVERGENCE_THRESHOLD)]
    divergence_threshold: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run one model and write trajectory.csv, summary.txt and residual.svg.
    Run {
        #[command(flatten)]
        common: Common,

        /// dznd1-2i or dznd2-2i.
        #[arg(long, default_value = "dznd1-2i")]
        model: String,

        /// Gain as a, a+bi or a-bi.
        #[arg(long, default_value = "10", allow_hyphen_values = true)]
        gamma: String,

        /// Step size in seconds.
        #[arg(long)]
        epsilon: f64,
    },
    /// Run a grid of models, gains and step sizes; write sweep.csv and order_report.txt.
    Sweep {
        #[command(flatten)]
        common: Common,

        #[arg(long = "model", required = true)]
        models: Vec<String>,

        #[arg(long = "gamma", required = true, allow_hyphen_values = true)]
        gammas: Vec<String>,

        #[arg(long = "epsilon", required = true)]
        epsilons: Vec<f64>,
    },
    /// Run the built-in property checks.
    Verify,
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run {
            common,
            model,
            gamma,
            epsilon,
        } => {
            let spec = RunSpec {
                problem: common.problem,
                model: parse_model(&model)?,
                gamma: parse_gamma(&gamma)?,
                epsilon,
                duration: common.duration,
                seed: common.seed,
                out: common.out,
                divergence_threshold: common.divergence_threshold,
            };
            let traj = cmd_run(&spec)?;
            println!("{}", traj.outcome);
            Ok(match traj.outcome {
                Outcome::Completed => 0,
                Outcome::Diverged { .. } => EXIT_DIVERGED,
            })
        }
        Command::Sweep {
            common,
            models,
            gammas,
            epsilons,
        } => {
            let spec = SweepSpec {
                problem: common.problem,
                models: models
                    .iter()
                    .map(|m| parse_model(m))
                    .collect::<Result<_, _>>()?,
                gammas: gammas
                    .iter()
                    .map(|g| parse_gamma(g))
                    .collect::<Result<_, _>>()?,
                epsilons,
                duration: common.duration,
                seed: common.seed,
                out: common.out,
                divergence_threshold: common.divergence_threshold,
            };
            let report = cmd_sweep(&spec)?;
            println!(
                "{} runs written to {}",
                report.rows.len(),
                spec.out.display()
            );
            Ok(0)
        }
        Command::Verify => {
            let groups = verify::all_groups();
            for g in &groups {
                print!("{}", g.render());
            }
            Ok(if groups.iter().all(|g| g.passed) {
                0
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Io(_) | CliError::Csv(_) | CliError::Solver(_) => EXIT_IO,
            })
        }
    }
}
