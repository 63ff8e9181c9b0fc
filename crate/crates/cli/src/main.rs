#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;
mod output;
mod setup;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::Config;
use error::Result;

fn run(cli: &Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Probability(a) => commands::probability(a, &cfg),
        Command::Fisher(a) => commands::fisher(a, &cfg),
        Command::Simulate(a) => commands::simulate(a, &cfg),
        Command::Estimate(a) => commands::estimate(a, &cfg),
        Command::Trials(a) => commands::trials(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
