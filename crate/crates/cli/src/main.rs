use clap::Parser;
use piezo_cli::{run, Cli};

fn main() {
    let config = Cli::parse().into_config();
    std::process::exit(run(&config));
}
