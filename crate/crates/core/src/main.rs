use clap::Parser;
use pdsplit::cli::{self, Cli};

fn main() {
    cli::init_logging();
    std::process::exit(cli::run(Cli::parse()));
}
