mod args;
mod commands;
mod config;
mod output;

use args::{Cli, Command, Format};
use clap::error::ErrorKind;
use clap::Parser;
use commands::{CliError, Context};
use std::ffi::OsString;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_PRECONDITION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_ASSERT: u8 = 4;
const EXIT_USAGE: u8 = 64;

fn run(argv: Vec<OsString>) -> u8 {
    let argv = match config::merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PRECONDITION;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    if let Some(t) = cli.global.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("error: cannot start {t} worker threads");
            return EXIT_PRECONDITION;
        }
    }
    let ctx = Context { global: &cli.global, started: Instant::now() };
    let result = match &cli.command {
        Command::Specfun(a) => commands::specfun(&ctx, a),
        Command::GmcSlope(a) => commands::gmc_slope(&ctx, a),
        Command::GmcSupercritical(a) => commands::gmc_supercritical(&ctx, a),
        Command::GmcMultifractal(a) => commands::gmc_multifractal(&ctx, a),
        Command::PathsVerify(a) => commands::paths_verify(&ctx, a),
        Command::PathsReflection(a) => commands::paths_reflection(&ctx, a),
        Command::RmtMom(a) => commands::rmt_mom(&ctx, a),
        Command::RmtToeplitz(a) => commands::rmt_toeplitz(&ctx, a),
        Command::RmtFh(a) => commands::rmt_fh(&ctx, a),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(CliError::Precondition(m)) => {
            eprintln!("error: {m}");
            return EXIT_PRECONDITION;
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("error: {m}");
            return EXIT_NUMERICAL;
        }
    };
    let written = match &cli.global.output {
        Some(path) => std::fs::File::create(path).and_then(|f| {
            let w = std::io::BufWriter::new(f);
            match cli.global.format {
                Format::Csv => outcome.table.write_csv(w),
                Format::Json => outcome.table.write_json(w),
            }
        }),
        None => {
            let w = std::io::stdout().lock();
            match cli.global.format {
                Format::Csv => outcome.table.write_csv(w),
                Format::Json => outcome.table.write_json(w),
            }
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write results: {e}");
        return EXIT_NUMERICAL;
    }
    println!("{}", outcome.summary);
    match outcome.pass {
        Some(false) => EXIT_ASSERT,
        _ => 0,
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()))
}
