mod args;
mod commands;
mod error;
mod output;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn run(cli: Cli) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", cli.jobs)))?;
    pool.install(|| match &cli.command {
        Command::Simulate(a) => commands::simulate::run(a),
        Command::Reconstruct(a) => commands::reconstruct::run(a),
        Command::Eval(a) => commands::eval::run(a),
        Command::Experiment(e) => commands::experiment::run(e),
    })
}

fn main() {
    let code = match run(Cli::parse()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("polarforge: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
