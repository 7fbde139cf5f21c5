use clap::Parser;
use hsfft_cli::{execute, Cli};

fn main() {
    if let Err(failure) = execute(Cli::parse()) {
        eprintln!("error: {failure}");
        std::process::exit(failure.code);
    }
}
