use clap::Parser;

use boxhhg::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
