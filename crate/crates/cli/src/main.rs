//! `koszul-ainfty`: minimal A∞-models of Ext algebras over F_p and the
//! checks around them.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails,
//! 2 on usage or parse errors.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{BettiArgs, CheckArgs, CliError, DualizeArgs, ExtArgs, GrArgs, MinimalModelArgs, Outcome};

#[derive(Debug, Parser)]
#[command(name = "koszul-ainfty", version, about = "Exact minimal A∞-models of Ext algebras over F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transfer an A∞-structure onto Ext and check it.
    MinimalModel(MinimalModelArgs),
    /// Betti numbers of the abelian group Z_p^d, by bar and Koszul resolutions.
    Betti(BettiArgs),
    /// The Ext algebra with its Yoneda product.
    Ext(ExtArgs),
    /// The associated graded of a truncated Iwasawa algebra.
    Gr(GrArgs),
    /// Run the checkers on an A∞-structure, morphism or module file.
    Check(CheckArgs),
    /// Dualize a finite complex and check End(I)^op -> End(P).
    Dualize(DualizeArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("KOSZUL_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("KOSZUL_THREADS must be a positive integer (got {value:?})")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure threads: {e}")))
}

fn run(cli: &Cli) -> Result<(Outcome, Option<&std::path::Path>), CliError> {
    configure_threads()?;
    Ok(match &cli.command {
        Command::MinimalModel(a) => (commands::run_minimal_model(a)?, a.common.output.as_deref()),
        Command::Betti(a) => (commands::run_betti(a)?, a.common.output.as_deref()),
        Command::Ext(a) => (commands::run_ext(a)?, a.common.output.as_deref()),
        Command::Gr(a) => (commands::run_gr(a)?, a.common.output.as_deref()),
        Command::Check(a) => (commands::run_check(a)?, a.common.output.as_deref()),
        Command::Dualize(a) => (commands::run_dualize(a)?, a.common.output.as_deref()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((outcome, path)) => {
            for line in &outcome.summary {
                eprintln!("{line}");
            }
            if let Err(e) = output::emit(path, &outcome.artifact) {
                eprintln!("{}", error_json(&format!("cannot write output: {e}")));
                return ExitCode::from(2);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("FAIL");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", error_json(&e.to_string()));
            ExitCode::from(2)
        }
    }
}

fn error_json(message: &str) -> String {
    json!({"schema": koszul_core::json::SCHEMA, "kind": "error", "exit_code": 2, "message": message}).to_string()
}
