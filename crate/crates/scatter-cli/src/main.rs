use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scatter_cli::commands;
use scatter_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(name = "scatter", version, about = "Fixed-energy inverse scattering: forward data, reconstruction, checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute f, h, b, u for the configured potential.
    Forward,
    /// Reconstruct v from a dataset directory.
    Reconstruct {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Check the kernel and dbar identities; exit 2 if any fails.
    Verify {
        /// Reverse the contour used for W (negative control).
        #[arg(long)]
        debug_misorient: bool,
    },
    /// det A(x, s, t) scan of the time-evolved data.
    Nv {
        #[arg(long)]
        dataset: PathBuf,
        /// Comma-separated times; overrides the config t-grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Option<Vec<f64>>,
    },
    /// Estimate c0 of the decay bound of G+.
    CalibrateC0,
    /// Write the contour nodes and weights.
    ContourDump,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_json(&std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Validation(e.to_string()))?;
    }
    let out = &cli.out;
    let print = |v: serde_json::Value| println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    match cli.command {
        Command::Forward => print(serde_json::to_value(commands::cmd_forward(&cfg, out)?)?),
        Command::Reconstruct { dataset } => print(serde_json::to_value(commands::cmd_reconstruct(&cfg, &dataset, out)?)?),
        Command::Verify { debug_misorient } => {
            let r = commands::cmd_verify(&cfg, debug_misorient, out)?;
            r.checks.iter().for_each(|c| println!("{}", c.line()));
            if !r.passed {
                return Err(CliError::Validation("identity checks failed".into()));
            }
        }
        Command::Nv { dataset, t } => {
            if let Some(t) = t {
                cfg.nv.t_grid = t;
            }
            cfg.validate()?;
            let r = commands::cmd_nv(&cfg, &dataset, out)?;
            print(serde_json::json!({ "slices": r.slices.len(), "flagged_cells": r.flagged_cells(), "flagged_fraction": r.flagged_fraction, "threshold_stable": r.threshold_stable, "slice_errors": r.slice_errors }));
        }
        Command::CalibrateC0 => print(serde_json::to_value(commands::cmd_calibrate_c0(&cfg, out)?)?),
        Command::ContourDump => print(commands::cmd_contour_dump(&cfg, out)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
