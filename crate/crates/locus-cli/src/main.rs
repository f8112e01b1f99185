//! locus: construct, certify, and simulate locally recoverable erasure
//! codes from declarative JSON configs.
//!
//! Exit codes: 0 on success (certificates at least consistent; claim
//! mismatches are reported as flags but do not fail), 1 on usage or
//! parameter-gate errors, 2 when a certificate is refuted.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use locus_core::oracle::{Budget, SimRow};
use locus_core::report::{
    certify_job, construct_job, simulate_job, sim_rows_to_csv, Descriptor, JobConfig, PatternSpec,
};

#[derive(Parser)]
#[command(name = "locus", version, about = "Locally recoverable erasure code toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code from a config file and write its descriptor.
    Construct {
        /// JSON job config.
        #[arg(long)]
        config: PathBuf,
        /// Output path for the descriptor JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all invariant suites and oracles over a descriptor.
    Certify {
        /// Descriptor JSON written by `construct`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Enumeration cap for the exhaustive oracles
        /// (overrides LOCUS_MAX_ENUM).
        #[arg(long)]
        max_enum: Option<u64>,
    },
    /// Stream repair-simulation rows as CSV.
    Simulate {
        /// Descriptor JSON written by `construct`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Pattern spec: random:<count>, explicit:<p;p;..>,
        /// grid:<l,s;..>, or window:<rows>:<l,s;..>.
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: u64,
    },
}

fn budget_from(max_enum: Option<u64>) -> Budget {
    let from_env = std::env::var("LOCUS_MAX_ENUM")
        .ok()
        .and_then(|v| v.parse().ok());
    match max_enum.or(from_env) {
        Some(cap) => Budget::with_max_enumerations(cap),
        None => Budget::default(),
    }
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Construct { config, out } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            let cfg = JobConfig::from_json(&text).map_err(|e| e.to_string())?;
            let descriptor = construct_job(&cfg).map_err(|e| e.to_string())?;
            fs::write(&out, descriptor.to_json())
                .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            eprintln!(
                "wrote descriptor: n = {}, k = {}, designed distance in [{}, {}]",
                descriptor.n,
                descriptor.k,
                descriptor.pre_certificate.distance_lower,
                descriptor.pre_certificate.distance_upper,
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify { input, max_enum } => {
            let text = fs::read_to_string(&input)
                .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
            let descriptor = Descriptor::from_json(&text).map_err(|e| e.to_string())?;
            let budget = budget_from(max_enum);
            let cert = certify_job(&descriptor, &budget).map_err(|e| e.to_string())?;
            println!("{}", cert.to_json());
            for flag in &cert.flags {
                eprintln!("flag: {flag}");
            }
            Ok(if cert.exit_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Simulate { input, pattern, seed, trials } => {
            let text = fs::read_to_string(&input)
                .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
            let descriptor = Descriptor::from_json(&text).map_err(|e| e.to_string())?;
            let spec = PatternSpec::parse(&pattern).map_err(|e| e.to_string())?;
            if trials == 0 {
                println!("{}", SimRow::csv_header());
                return Ok(ExitCode::SUCCESS);
            }
            let rows = simulate_job(&descriptor, &spec, seed, trials).map_err(|e| e.to_string())?;
            print!("{}", sim_rows_to_csv(&rows));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
