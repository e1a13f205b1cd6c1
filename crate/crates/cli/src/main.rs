mod args;
mod commands;

use std::process::ExitCode;

use clap::{error::ErrorKind, CommandFactory, FromArgMatches};

use args::{Cli, Command};
use commands::Outcome;

const EXIT_USAGE: u8 = 1;
const EXIT_TRUNCATION: u8 = 2;
const EXIT_VERIFY: u8 = 3;

fn main() -> ExitCode {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let eta2_explicit = matches
        .subcommand_matches("qfunc")
        .and_then(|m| m.value_source("eta2"))
        .is_some_and(|s| s == clap::parser::ValueSource::CommandLine);
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };

    // Sequential dense kernels keep floating-point reductions in a fixed
    // order, so repeated runs produce identical bytes. Parallelism comes from
    // the scan and grid loops instead.
    faer::set_global_parallelism(faer::Par::Seq);
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }

    let result = match &cli.command {
        Command::Evolve(a) => commands::evolve_cmd(a),
        Command::Qfunc(a) => commands::qfunc_cmd(a, eta2_explicit),
        Command::EnergyScan(a) => commands::energy_scan_cmd(a),
        Command::Spectrum(a) => commands::spectrum_cmd(a),
        Command::Resonances(a) => commands::resonances_cmd(a),
        Command::Verify(a) => commands::verify_cmd(a),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::TruncationUnsafe) => ExitCode::from(EXIT_TRUNCATION),
        Ok(Outcome::VerificationFailed) => ExitCode::from(EXIT_VERIFY),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
