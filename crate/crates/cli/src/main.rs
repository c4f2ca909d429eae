//! `seqbound` — classify DNA reads under triplet models and explore the
//! classifier's decision boundary on the Hamming graph.

mod args;
mod commands;
mod output;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();

    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .expect("rayon pool is configured once at startup");
    }

    if let Err(err) = commands::run(&cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
