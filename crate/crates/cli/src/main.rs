//! `tbcodes` command-line tool.
//!
//! Exit status: 0 on success, 1 on validation or usage errors, 2 on capacity
//! or contract errors. Errors go to stderr as `error: <kind>: <detail>`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tbcodes::Error;

#[derive(Parser)]
#[command(name = "tbcodes", version, about = "Trivariate bicycle codes: construction, simulation and decoding")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

/// Where the code comes from: a built-in name or a spec file.
#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
pub struct CodeArg {
    /// Built-in code: tb12, tb24, tb56, tb88, surface3, surface5, surface7, ...
    #[arg(long)]
    pub code: Option<String>,
    /// TB spec JSON file, e.g. {"l":2,"m":3,"a":[["x",1],["y",2]],"b":[["x",2],["z",4]]}
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build a code and print its parameters.
    Construct {
        #[command(flatten)]
        code: CodeArg,
        /// Also print every stabilizer generator.
        #[arg(long)]
        print_stabilizers: bool,
    },
    /// Minimum distance: exhaustive when small, otherwise an upper bound.
    Distance {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a logical basis, or check one given with --logicals.
    Logicals {
        #[command(flatten)]
        code: CodeArg,
        /// Basis file: one `X part ; Z part` line per logical qubit.
        #[arg(long)]
        logicals: Option<PathBuf>,
    },
    /// Write a memory circuit in the text circuit format.
    Circuit {
        #[command(flatten)]
        code: CodeArg,
        /// Syndrome rounds (default: the code distance).
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long, default_value = "z")]
        basis: tbcodes::Basis,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample detector and observable bits from a circuit file (.b8 output).
    Sample {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the detector error model of a circuit file.
    Dem {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode sampled shots with MWPM and report failures.
    Decode {
        #[arg(long)]
        circuit: PathBuf,
        /// Shots in .b8 format, as written by `sample`.
        #[arg(long)]
        shots: PathBuf,
        /// Per-shot CSV: shot,predicted,measured,failed.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Dump the matching graph as text.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Z-basis memory experiment; one CSV row per physical error rate.
    Memory {
        #[command(flatten)]
        code: CodeArg,
        /// Physical error rates, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long)]
        shots: usize,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the rows to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Random search over monomial specs of a given torus size.
    Search {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        w_a: usize,
        #[arg(long, default_value_t = 2)]
        w_b: usize,
        #[arg(long, default_value_t = 50)]
        max_power: u32,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 200)]
        distance_trials: usize,
        #[arg(long, default_value_t = 1)]
        min_k: usize,
        #[arg(long, default_value_t = 1)]
        min_d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print at most this many hits.
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Fit R(d) = alpha * d^(-beta) to the codes of a results CSV.
    Fit {
        #[arg(long)]
        csv: PathBuf,
    },
    /// Check that a physical gate sequence implements a logical Clifford.
    VerifyGate {
        #[command(flatten)]
        code: CodeArg,
        /// Gate list, one gate per line, 1-based qubits.
        #[arg(long)]
        gates: PathBuf,
        /// Claimed logical gate: I, X:i, Z:i, H:i, S:i, CNOT:c,t or CZ:a,b.
        #[arg(long)]
        claim: String,
        /// Logical basis file (default: a computed basis).
        #[arg(long)]
        logicals: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity(_) | Error::Contract(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: validation: --threads must be at least 1");
            return ExitCode::from(1);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    match commands::run(cli.command, cli.json) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            let detail = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {detail}", e.kind());
            ExitCode::from(exit_code(&e))
        }
    }
}
