use std::process::ExitCode;

use clap::Parser;

use crjoin::cli::{run, with_big_stack, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(with_big_stack(move || run(&cli)))
}
