use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use toric_poset::cli_io::{run, OutputFormat, RunConfig};
use toric_poset::Mode;

/// Compute the poset of layers of a central toric arrangement, or the
/// intersection lattice of a central hyperplane arrangement.
///
/// The input file holds the d x N integer matrix X, one row per line;
/// its columns are the defining vectors.
#[derive(Parser, Debug)]
#[command(name = "toric-poset", version)]
struct Args {
    /// Matrix file
    #[arg(value_name = "PATH", required_unless_present = "input")]
    path: Option<PathBuf>,

    /// Matrix file (alternative to the positional argument)
    #[arg(long, value_name = "PATH", conflicts_with = "path")]
    input: Option<PathBuf>,

    #[arg(long, default_value = "toric", value_parser = ["toric", "hyperplane"])]
    mode: String,

    #[arg(long, default_value = "summary", value_parser = ["json", "dot", "summary"])]
    format: String,

    /// Also compute the Möbius function and characteristic polynomial
    #[arg(long)]
    invariants: bool,

    /// Cross-check against the brute-force geometric construction
    #[arg(long)]
    verify: bool,

    /// Refuse inputs with more than K columns
    #[arg(long = "max-n", value_name = "K", default_value_t = 20,
          value_parser = clap::value_parser!(u32).range(1..))]
    max_n: u32,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = RunConfig {
        input_path: args.input.or(args.path).expect("clap enforces an input"),
        mode: args.mode.parse::<Mode>().expect("validated by clap"),
        output_format: args
            .format
            .parse::<OutputFormat>()
            .expect("validated by clap"),
        compute_invariants: args.invariants,
        verify: args.verify,
        max_ground_set: args.max_n as usize,
    };
    let code = run(&config, &mut io::stdout().lock(), &mut io::stderr().lock());
    let _ = io::stdout().flush();
    ExitCode::from(code as u8)
}
