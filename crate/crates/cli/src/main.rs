use clap::Parser;
use msland::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(execute(cli, |k| std::env::var(k).ok()));
}
