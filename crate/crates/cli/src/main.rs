//! Command-line front end: symmetry checks, algebra structure, determining
//! systems, adjoint matrices, optimal-system normal forms and the numeric
//! verification suites.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad
//! input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{CliError, Global, Outcome};

#[derive(Parser, Debug)]
#[command(name = "liesym", version, about = "Lie point symmetries of scalar PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Override the main tolerance of the command.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for random sampling.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Bind a constant, e.g. `--const k=1.0`. Repeatable.
    #[arg(long = "const", global = true, value_name = "NAME=VALUE")]
    constants: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that vector fields are point symmetries of a PDE.
    CheckSymmetry {
        /// PDE file (`lhs = ...`, `solve_for = u_..`); built-in equation if absent.
        #[arg(long)]
        pde: Option<PathBuf>,
        /// Field file (`xi1 = ...` etc.); the seven built-in generators if absent.
        #[arg(long)]
        field: Vec<PathBuf>,
    },
    /// Commutator table, Killing form and Levi decomposition.
    Structure {
        #[arg(long)]
        killing: bool,
        #[arg(long)]
        levi: bool,
    },
    /// Determining system of a PDE.
    Detsys {
        #[arg(long)]
        pde: Option<PathBuf>,
    },
    /// Adjoint matrices of the generators.
    Adjoint,
    /// Normal form of one algebra element, or a randomized sweep.
    Optimal {
        /// Seven comma-separated coefficients.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "sweep")]
        coeffs: Option<String>,
        /// Number of random elements to normalize.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// Numeric verification suites.
    Verify {
        suite: Suite,
        /// Sample count for the invariant checks.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Suite {
    Flows,
    Invariants,
    Transport,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let g = Global::new(cli.tol, cli.seed, &cli.constants)?;
    match cli.command {
        Command::CheckSymmetry { pde, field } => commands::check_symmetry(pde.as_deref(), &field, &g),
        Command::Structure { killing, levi } => Ok(commands::structure(killing, levi)),
        Command::Detsys { pde } => commands::detsys(pde.as_deref(), &g),
        Command::Adjoint => Ok(commands::adjoint()),
        Command::Optimal { coeffs, sweep } => commands::optimal(coeffs.as_deref(), sweep, &g),
        Command::Verify { suite, samples } => Ok(match suite {
            Suite::Flows => commands::verify_flows(&g),
            Suite::Invariants => commands::verify_invariants(samples, &g),
            Suite::Transport => commands::verify_transport(&g),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
