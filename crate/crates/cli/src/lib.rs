//! Command-line front end for `intersective-core`: argument parsing, JSON
//! configuration, output files and thread control.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{ArgAction, Parser, Subcommand};
use intersective_core::Limits;

use commands::{Outcome, EXIT_ERROR, EXIT_OK};

pub const VERSION_STRING: &str = "intersective-spec-1";
pub const RESIDUE_CAP_ENV: &str = "INTERSECTIVE_RESIDUE_CAP";

#[derive(Parser, Debug)]
#[command(name = "intersective", disable_version_flag = true, about = "Intersectivity scans and recurrence experiments")]
pub struct Cli {
    /// Print the version string and exit.
    #[arg(short = 'V', long, action = ArgAction::SetTrue)]
    version: bool,
    /// Write JSON output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the parallel scans.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scan a polynomial for roots modulo every prime-ideal power up to a norm bound.
    Check {
        poly: String,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long)]
        bound: u64,
        #[arg(long, default_value_t = 1)]
        depth_min: u32,
    },
    /// Certify one of the special families.
    #[command(subcommand)]
    Certify(Certify),
    /// Joint scan of a polynomial family.
    Joint {
        #[arg(required = true)]
        polys: Vec<String>,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long)]
        bound: u64,
        #[arg(long, default_value_t = 1)]
        depth_min: u32,
        /// Also compare against the gcd over the field.
        #[arg(long)]
        gcd: bool,
    },
    /// Coordinate components of a polynomial against the integral basis.
    Decompose {
        poly: String,
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Return-set scan of a measure-preserving system.
    ScanReturns {
        #[arg(long)]
        config: PathBuf,
    },
    /// Correlation integrals at given shifts.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Window estimate of a uniformity seminorm.
    Ghk {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Density experiments on subsets of the lattice.
    Density {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum Certify {
    /// `x^2 + c`.
    QuadConst {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 1000)]
        scan_bound: u64,
    },
    /// `(x^2 - alpha)(x^2 - beta)(x^2 - alpha*beta)` over the Gaussian integers.
    ThreeQuadratics {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    /// Search Gaussian prime pairs meeting the residue conditions.
    Search {
        #[arg(long, default_value_t = 200)]
        max_norm: u64,
        #[arg(long, default_value_t = 1)]
        limit: usize,
    },
}

fn limits() -> Result<Limits> {
    match std::env::var(RESIDUE_CAP_ENV) {
        Ok(v) => Ok(Limits {
            residue_cap: v.trim().parse().with_context(|| format!("{RESIDUE_CAP_ENV}={v:?} is not an integer"))?,
        }),
        Err(_) => Ok(Limits::default()),
    }
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    let limits = limits()?;
    match cmd {
        Command::Check {
            poly,
            field,
            bound,
            depth_min,
        } => commands::check(&poly, &field, bound, depth_min, &limits),
        Command::Certify(Certify::QuadConst { c, field, scan_bound }) => {
            commands::certify_quad_const(&c, &field, scan_bound, &limits)
        }
        Command::Certify(Certify::ThreeQuadratics { alpha, beta }) => {
            commands::certify_three_quadratics(&alpha, &beta, &limits)
        }
        Command::Certify(Certify::Search { max_norm, limit }) => {
            commands::search_three_quadratics(max_norm, limit, &limits)
        }
        Command::Joint {
            polys,
            field,
            bound,
            depth_min,
            gcd,
        } => commands::joint(&polys, &field, bound, depth_min, gcd, &limits),
        Command::Decompose { poly, field } => commands::decompose(&poly, &field),
        Command::ScanReturns { config } => commands::scan_returns(&commands::read_config(&config)?),
        Command::Simulate { config } => commands::simulate(&commands::read_config(&config)?),
        Command::Ghk { config, k } => commands::ghk(&commands::read_config(&config)?, k),
        Command::Density { config } => commands::density(&commands::read_config(&config)?),
    }
}

/// Runs one invocation, writing JSON to `out` (or `--out`) and the human
/// summary to `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    if cli.version {
        let _ = writeln!(out, "{VERSION_STRING}");
        return EXIT_OK;
    }
    let Some(cmd) = cli.command else {
        let _ = writeln!(err, "error: a subcommand is required (see --help)");
        return EXIT_ERROR;
    };
    let result = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .context("building thread pool")
            .and_then(|pool| pool.install(|| dispatch(cmd))),
        None => dispatch(cmd),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            return EXIT_ERROR;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.stdout).with_context(|| format!("writing {}", path.display())),
        None => out.write_all(outcome.stdout.as_bytes()).context("writing output"),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e:#}");
        return EXIT_ERROR;
    }
    let _ = writeln!(err, "{}", outcome.summary);
    outcome.code
}
