use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use syzygp_cli::problem::ProblemSpec;
use syzygp_cli::{run, Command, Options, Outcome, EXIT_ERROR};
use syzygp_core::algebra::BaseOrder;

#[derive(Parser)]
#[command(
    name = "syzygp",
    version,
    about = "Gaussian processes constrained by linear operator equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Monomial order for Gröbner computations.
    #[arg(long, value_enum, default_value_t = Order::Degrevlex, global = true)]
    order: Order,

    /// Observation noise variance, overriding the problem file.
    #[arg(long, global = true)]
    noise: Option<f64>,

    /// Absolute diagonal jitter, overriding the problem file.
    #[arg(long, global = true)]
    jitter: Option<f64>,

    /// Directory for output files; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute B = rker(A), A' = lker(B) and decide parametrizability.
    Parametrize { problem: PathBuf },
    /// Push the prior through B and print the covariance entries.
    Pushforward { problem: PathBuf },
    /// Choose hyperparameters by log marginal likelihood.
    Fit { problem: PathBuf },
    /// Posterior mean and standard deviation at the query points, as CSV.
    Predict { problem: PathBuf },
    /// Verify annihilation, symmetry and the operator residual of the posterior mean.
    Check {
        problem: PathBuf,
        /// Number of random points for the residual.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Parse a problem file and print it in canonical form.
    Format { problem: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Degrevlex,
    Lex,
}

fn read(path: &PathBuf) -> Result<ProblemSpec, String> {
    let src = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ProblemSpec::parse(&src).map_err(|e| format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message))
}

// A closed pipe (as with `| head`) is not an error.
fn print(text: &str) -> Result<(), String> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(format!("stdout: {e}")),
        _ => Ok(()),
    }
}

fn emit(out: &Option<PathBuf>, outcome: &Outcome) -> Result<(), String> {
    let files = [
        ("report.txt", Some(&outcome.report)),
        ("kernel.txt", outcome.kernel.as_ref()),
        ("fit.txt", outcome.fit.as_ref()),
        ("predictions.csv", outcome.csv.as_ref()),
        ("check.txt", outcome.check.as_ref()),
    ];
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            for (name, text) in files {
                if let Some(text) = text {
                    let path = dir.join(name);
                    fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
                }
            }
        }
        None => {
            for text in files.into_iter().filter_map(|(_, t)| t) {
                print(text)?;
            }
        }
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<i32, String> {
    let mut opts = Options {
        order: match cli.order {
            Order::Degrevlex => BaseOrder::DegRevLex,
            Order::Lex => BaseOrder::Lex,
        },
        noise: cli.noise,
        jitter: cli.jitter,
        seed: cli.seed,
        ..Options::default()
    };
    let (path, command) = match &cli.command {
        Cmd::Parametrize { problem } => (problem, Command::Parametrize),
        Cmd::Pushforward { problem } => (problem, Command::Pushforward),
        Cmd::Fit { problem } => (problem, Command::Fit),
        Cmd::Predict { problem } => (problem, Command::Predict),
        Cmd::Check { problem, samples } => {
            opts.samples = *samples;
            (problem, Command::Check)
        }
        Cmd::Format { problem } => {
            print(&read(problem)?.to_string())?;
            return Ok(0);
        }
    };
    let spec = read(path)?;
    let outcome = run(&spec, command, &opts).map_err(|e| format!("{}: {e}", path.display()))?;
    emit(&cli.out, &outcome)?;
    if !outcome.parametrizable {
        eprintln!("not parametrizable; A' in the report is the largest parametrizable subsystem");
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
