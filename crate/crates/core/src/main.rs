use clap::Parser;

use subfn_core::harness::cli::{init_threads, run, Cli};

fn main() {
    init_threads();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
