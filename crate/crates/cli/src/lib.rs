//! Command-line runner for the verification suites.

pub mod config;
pub mod eval;
pub mod output;
pub mod suites;

use config::{Command, Format};
use qvir_core::Status;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const INCONCLUSIVE: i32 = 2;
    pub const CONFIG: i32 = 3;
}

/// A failing check outranks an inconclusive one.
pub fn exit_code(records: &[suites::Record]) -> i32 {
    let any = |s: Status| records.iter().any(|r| r.report.status == s);
    if any(Status::Fail) {
        exit::FAIL
    } else if any(Status::Inconclusive) {
        exit::INCONCLUSIVE
    } else {
        exit::PASS
    }
}

/// Runs a parsed command line, writing to stdout/stderr; returns the exit code.
pub fn run(cli: config::Cli) -> i32 {
    match cli.command {
        Command::Verify { suite } => {
            let cfg = match config::resolve(&cli.opts, &suite) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit::CONFIG;
                }
            };
            let records = match suites::run(&cfg) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit::CONFIG;
                }
            };
            let text = match cfg.format {
                Format::Json => output::to_json(&records) + "\n",
                Format::Csv => output::to_csv(&records),
                Format::Text => output::to_text(&records),
            };
            print!("{text}");
            exit_code(&records)
        }
        Command::Eval(args) => {
            let cfg = match config::resolve(&cli.opts, &[]) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit::CONFIG;
                }
            };
            match eval::evaluate(&args, &cfg) {
                Ok(lines) => {
                    for l in lines {
                        println!("{l}");
                    }
                    exit::PASS
                }
                Err(eval::EvalError::Config(e)) => {
                    eprintln!("error: {e}");
                    exit::CONFIG
                }
                Err(eval::EvalError::Math(e)) => {
                    eprintln!("error: {e}");
                    exit::INCONCLUSIVE
                }
            }
        }
    }
}
