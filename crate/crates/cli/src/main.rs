//! `loopint`: runs the index, property and Monte Carlo pipelines and writes JSON reports.
//!
//! Exit codes: 0 every check passed, 2 a tolerance failed, 3 inconclusive,
//! 64 usage or configuration error, 1 any other error.

mod pipelines;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use loopint::cache::SpectralCache;
use loopint::config::RunConfig;
use loopint::report::Report;

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "loopint", version, about = "Loop-space path integrals on flat tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// configuration file in `key = value` form
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// seed for random chains and Monte Carlo streams
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// report directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Gauss-Legendre points per axis for simplex integrals
    #[arg(long, global = true)]
    quad_order: Option<usize>,
    /// Monte Carlo loop samples per panel
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// degree of the twisting line bundle
    #[arg(long, global = true, allow_hyphen_values = true)]
    flux: Option<i32>,
    /// Fourier cutoff of flat models
    #[arg(long, global = true)]
    lambda: Option<i32>,
    /// print the report to stdout as well
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Index of the twisted Dirac operator via the path integral, heat trace and localization
    Index,
    /// Randomized algebraic and analytic property checks
    Props {
        /// deliberately break one property to exercise the failure path
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
    /// Wiener-measure Monte Carlo against the operator-side integral map
    McCompare,
}

/// An error attributable to the invocation rather than the computation.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn load_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
            RunConfig::parse(&text).map_err(|e| Usage(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    let overrides = [
        ("seed", c.seed.map(|v| v.to_string())),
        ("out", c.out.as_ref().map(|v| v.to_string_lossy().into_owned())),
        ("quad", c.quad_order.map(|v| format!("gauss:{v}"))),
        ("samples", c.samples.map(|v| v.to_string())),
        ("flux", c.flux.map(|v| v.to_string())),
        ("lambda", c.lambda.map(|v| v.to_string())),
    ];
    for (key, v) in overrides {
        if let Some(v) = v {
            cfg.set(key, &v).map_err(|e| Usage(format!("--{key}: {e}")))?;
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Report> {
    let cfg = load_config(&cli.common)?;
    let cache = SpectralCache::from_env();
    let report = match &cli.command {
        Command::Index => pipelines::cmd_index(&cfg, cache.as_ref())?,
        Command::Props { corrupt } => {
            if let Some(p) = corrupt {
                if !pipelines::PROPERTIES.contains(&p.as_str()) {
                    return Err(Usage(format!("--corrupt: unknown property '{p}'")).into());
                }
            }
            pipelines::cmd_props(&cfg, corrupt.as_deref(), cache.as_ref())?
        }
        Command::McCompare => pipelines::cmd_mc_compare(&cfg, cache.as_ref())?,
    };
    let path = report.write(&cfg.out).with_context(|| format!("writing report to {}", cfg.out.display()))?;
    if cli.common.json {
        println!("{}", report.to_json());
    }
    for c in &report.checks {
        eprintln!("{:<44} {:>12.3e} / {:<10.3e} {:?}", c.name, c.error, c.tolerance, c.status);
    }
    eprintln!("{:?}: {}", report.status, path.display());
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(r) => ExitCode::from(r.status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<Usage>() { EXIT_USAGE } else { 1 })
        }
    }
}
