//! Binary entry point. See the crate documentation for the commands.

use clap::Parser;

use minspan::cli::{run, Cli, CliError};

/// Caps the rayon worker pool when MINSPAN_THREADS is set. All parallel
/// reductions merge in document order, so the pool size never changes any
/// byte of the output.
fn configure_threads() {
    let Ok(value) = std::env::var("MINSPAN_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(error) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: cannot apply MINSPAN_THREADS={n}: {error}");
            }
        }
        _ => eprintln!("warning: ignoring invalid MINSPAN_THREADS value {value:?}"),
    }
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    if let Err(error) = run(cli) {
        eprintln!("error: {error}");
        let code = match error {
            CliError::Usage(_) => 2,
            _ => 1,
        };
        std::process::exit(code);
    }
}
