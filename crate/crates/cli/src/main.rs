//! `amoeba`: amoeba filtering, amoeba active contours, reference PDE solvers and verification.

use std::path::PathBuf;
use std::process::ExitCode;

use amoeba_cli::{execute, exit_code, parse_override, Config, Invocation, RunContext, UsageError};
use clap::{Parser, Subcommand};
use serde_json::Value;

#[derive(Debug, Parser)]
#[command(name = "amoeba", version, about = "Amoeba median filtering, amoeba active contours and PDE references")]
struct Cli {
    /// JSON config, or a manifest.json from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Recorded in the manifest; all subcommands are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Config override `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterated amoeba median filter of a PGM image.
    Amf { input: PathBuf },
    /// Amoeba active contours on the pilot image `f`.
    Aac {
        f: PathBuf,
        /// Initial level set: PGM path, `circle:cx,cy,r` or `rect:x0,y0,x1,y1`.
        #[arg(long)]
        u0: Option<String>,
    },
    /// Geodesic active contours or self-snakes by explicit finite differences.
    Pde {
        /// Pilot image for geodesic active contours.
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long)]
        u0: Option<String>,
        /// `gac` or `selfsnakes`.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Verification suite: coeffs, selfsnakes, jmiv, theorem or force.
    Verify { suite: String },
    /// Coefficient curves J1, J2, J3 as CSV.
    Curves {
        /// `l1` or `l2`.
        #[arg(long)]
        metric: Option<String>,
        /// Comma-separated angles in radians.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alphas: Option<Vec<f64>>,
        #[arg(long)]
        s_min: Option<f64>,
        #[arg(long)]
        s_max: Option<f64>,
        #[arg(long)]
        s_count: Option<usize>,
        /// Output CSV; defaults to `<out>/curves.csv`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut overrides = cli.set.iter().map(|s| parse_override(s)).collect::<anyhow::Result<Vec<_>>>()?;
    let mut put = |k: &str, v: Value| overrides.push((k.to_string(), v));
    let inv = match cli.command {
        Command::Amf { input } => Invocation::Amf { input },
        Command::Aac { f, u0 } => {
            if let Some(u0) = u0 {
                put("u0", u0.into());
            }
            Invocation::Aac { f }
        }
        Command::Pde { f, u0, mode } => {
            if let Some(u0) = u0 {
                put("u0", u0.into());
            }
            if let Some(m) = mode {
                put("pde_mode", m.into());
            }
            Invocation::Pde { f }
        }
        Command::Verify { suite } => Invocation::Verify { suite },
        Command::Curves { metric, alphas, s_min, s_max, s_count, output } => {
            if let Some(m) = metric {
                put("metric", m.into());
            }
            if let Some(a) = alphas {
                put("alphas", a.into());
            }
            if let Some(v) = s_min {
                put("s_min", v.into());
            }
            if let Some(v) = s_max {
                put("s_max", v.into());
            }
            if let Some(v) = s_count {
                put("s_count", v.into());
            }
            Invocation::Curves { output }
        }
    };
    let cfg = Config::load(cli.config.as_deref(), &overrides)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(UsageError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let ctx = RunContext { out: cli.out, threads: cli.threads, seed: cli.seed };
    let outcome = execute(&inv, &cfg, &ctx)?;
    for line in &outcome.report {
        println!("{line}");
    }
    for p in &outcome.outputs {
        log::info!("wrote {}", p.display());
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
