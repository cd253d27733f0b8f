use std::process::ExitCode;

use clap::Parser;

mod commands;
mod config;

use commands::{Failure, EXIT_USAGE};
use config::{Cli, Command, Threads};

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = config::resolve(cli.command.flags()).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: e.0,
    })?;
    let threads = match cfg.threads {
        Threads::Auto => 0,
        Threads::Count(n) => n,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure {
            code: EXIT_USAGE,
            message: format!("cannot start {threads} threads: {e}"),
        })?;
    pool.install(|| match &cli.command {
        Command::Fixpoint(_) => commands::fixpoint(&cfg),
        Command::Verify(_) => commands::verify(&cfg),
        Command::Dimension(_) => commands::dimension(&cfg),
        Command::Figures(_) => commands::figures(&cfg),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
