mod args;
mod commands;
mod output;

use affsurf::Error;
use args::{Cli, Command};
use clap::Parser;
use std::io::Write;
use std::process::ExitCode;

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PEqualsMinusN(_)
        | Error::POutOfRange { .. }
        | Error::NotDivergentRange { .. }
        | Error::DeltaOutOfRange(_)
        | Error::EmptyFloatingBody(_)
        | Error::ConstructionRefused(_)
        | Error::IllConditionedGrid(_) => EXIT_DOMAIN,
        Error::NotConverged(_) | Error::NotIsotropic(_) | Error::SingularCovariance => EXIT_VIOLATION,
        _ => EXIT_INPUT,
    }
}

fn run(cli: &Cli) -> affsurf::Result<output::Outcome> {
    let common = &cli.common;
    match &cli.command {
        Command::Asp { body, p, method } => commands::cmd_asp(common, body, *p, *method),
        Command::Floating { body, delta } => commands::cmd_floating(common, body, *delta),
        Command::Mvee { body } => commands::cmd_mvee(common, body),
        Command::John { body } => commands::cmd_john(common, body),
        Command::Isotropic { body, method } => commands::cmd_isotropic(common, body, *method),
        Command::Santalo { body } => commands::cmd_santalo(common, body),
        Command::Extremal { body, kind, p, probe } => commands::cmd_extremal(common, body, kind, *p, *probe),
        Command::Thinshell { body, c_thin, directions } => commands::cmd_thinshell(common, body, *c_thin, *directions),
        Command::Quermass { body, t, estimator, alphas, non_quermass } => commands::cmd_quermass(
            common,
            body.as_deref(),
            t.as_deref(),
            estimator.as_deref(),
            alphas,
            non_quermass.as_deref(),
        ),
        Command::Verify { suite, body, corpus, n, trials } => {
            commands::cmd_verify(common, *suite, body.as_deref(), corpus, *n, *trials)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    affsurf::util::init_threads();
    match run(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.render(cli.common.format).as_bytes());
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATION)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
