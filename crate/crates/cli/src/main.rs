mod args;
mod commands;
mod output;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bound(a) => commands::bound_cmd(a),
        Command::Sweep(a) => commands::sweep_cmd(a),
        Command::RegionMap(a) => commands::region_map_cmd(a),
        Command::Laminate(a) => commands::laminate_cmd(a),
        Command::Verify(a) => commands::verify_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
