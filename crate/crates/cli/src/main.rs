mod args;
mod commands;
mod failure;
mod output;
mod sweep;
mod verify;

use clap::Parser;

fn main() {
    let cli = commands::Cli::parse();
    if let Err(e) = commands::run(cli) {
        eprintln!("treefid: {e}");
        std::process::exit(e.code());
    }
}
