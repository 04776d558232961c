use std::process::ExitCode;

use clap::Parser;
use revsynth::cli::{run, Cli, CliError, RunConfig, THREADS_ENV};

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn execute() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            return Err(CliError {
                code: "usage",
                message: e
                    .to_string()
                    .trim_start_matches("error: ")
                    .trim_end()
                    .to_string(),
                exit_code: 1,
            })
        }
    };
    let cfg = RunConfig::from_cli(cli)?;
    let output = run(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, output).map_err(|e| CliError {
            code: "io",
            message: format!("{}: {e}", path.display()),
            exit_code: 1,
        }),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    match execute() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code as u8)
        }
    }
}
