mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Invocation;

#[derive(Parser)]
#[command(
    name = "slagbvp",
    version,
    about = "Second boundary value problem for the special Lagrangian equation in the plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write fields and a summary.
    Solve(Common),
    /// Solve, then certify the a-priori estimates; exits 5 if any check fails.
    Verify(Common),
    /// Solve by continuation and write the parameter path.
    Continuation(Common),
    /// Solve both directions and report c + c' - π.
    Dual(Common),
    /// Tabulate the defining functions of both domains.
    BuildDomain(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use an N×N grid.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Newton tolerance.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Run node loops on one thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn invocation(self) -> Invocation {
        Invocation {
            config: self.config,
            out: self.out,
            grid: self.grid,
            tol: self.tol,
            sequential: self.sequential,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(c) => commands::solve(c.invocation()),
        Command::Verify(c) => commands::verify(c.invocation()),
        Command::Continuation(c) => commands::continuation(c.invocation()),
        Command::Dual(c) => commands::dual(c.invocation()),
        Command::BuildDomain(c) => commands::build_domain(c.invocation()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slagbvp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
