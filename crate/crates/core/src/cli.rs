//! Command-line surface of the `htype` binary.
//!
//! Exit codes: 0 on success, 2 for validation errors, 3 when a
//! reconstructed geodesic misses its target.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use crate::algebra::{Covector, GroupPoint, HTypeAlgebra};
use crate::connect::{classify_with, DEFAULT_ALPHA_CAP};
use crate::error::{Error, Result};
use crate::geodesics::{Geodesic, GeodesicSpec};
use crate::io::{
    algebra_to_json, connection_to_json, figure_rows, geodesic_samples_json, load_algebra,
    parse_csv_vector, write_figure_csv, write_geodesic_csv, Figure,
};
use crate::numeric::DEFAULT_SEED;
use crate::par::Execution;

/// Environment variable overriding the seed of brute-force distance runs.
pub const SEED_ENV: &str = "HTYPE_SEED";

/// Seed from `HTYPE_SEED`, or the built-in default when it is unset.
pub fn seed_from_env() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("{SEED_ENV} must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

#[derive(Debug, Parser)]
#[command(name = "htype", version, about = "Geodesics, distances and cut locus of H-type groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = true)]
pub struct AlgebraSource {
    /// Algebra JSON file written by `build`.
    #[arg(long, conflicts_with_all = ["r", "m"])]
    pub alg: Option<PathBuf>,
    /// Center dimension, for an algebra built on the fly.
    #[arg(long, requires = "m")]
    pub r: Option<usize>,
    /// Horizontal dimension, for an algebra built on the fly.
    #[arg(long, requires = "r")]
    pub m: Option<usize>,
}

impl AlgebraSource {
    pub fn load(&self) -> Result<HTypeAlgebra> {
        match (&self.alg, self.r, self.m) {
            (Some(path), _, _) => load_algebra(path),
            (None, Some(r), Some(m)) => HTypeAlgebra::build(r, m),
            _ => Err(Error::Invalid("give --alg PATH or both --r and --m".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and verify an algebra, then write it as JSON.
    Build {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample one geodesic from the origin on a uniform grid.
    Geodesic {
        #[command(flatten)]
        algebra: AlgebraSource,
        /// Initial horizontal velocity, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        xdot0: String,
        /// Covector, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, default_value_t = 11)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find every geodesic from the origin to a target and classify it.
    Connect {
        #[command(flatten)]
        algebra: AlgebraSource,
        /// Horizontal part of the target, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Vertical part of the target, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Root search range for |theta|/2.
        #[arg(long, default_value_t = DEFAULT_ALPHA_CAP)]
        alpha_cap: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit two-column CSV data for the mu, nu and sinc profiles.
    Figures {
        #[arg(long, value_enum)]
        which: Figure,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn with_output<F>(out: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

pub fn cmd_build(r: usize, m: usize, out: &Path) -> Result<HTypeAlgebra> {
    let alg = HTypeAlgebra::build(r, m)?;
    let violation = alg.verify_relations();
    if violation != 0.0 {
        return Err(Error::RelationsViolated(violation));
    }
    std::fs::write(out, algebra_to_json(&alg)? + "\n")?;
    Ok(alg)
}

pub fn cmd_geodesic(
    alg: &HTypeAlgebra,
    xdot0: &[f64],
    theta: &[f64],
    samples: usize,
    horizon: f64,
    format: Format,
    out: &mut dyn Write,
) -> Result<()> {
    let spec = GeodesicSpec::new(DVector::from_row_slice(xdot0), Covector::from_vec(theta.to_vec())?);
    let rows = Geodesic::new(alg, spec.clone())?.sample(samples, horizon)?;
    match format {
        Format::Csv => write_geodesic_csv(out, alg, &rows),
        Format::Json => Ok(writeln!(out, "{}", geodesic_samples_json(alg, &spec, &rows)?)?),
    }
}

pub fn cmd_connect(alg: &HTypeAlgebra, x: &[f64], z: &[f64], alpha_cap: f64, out: &mut dyn Write) -> Result<()> {
    let target = GroupPoint::new(alg, x.to_vec(), z.to_vec())?;
    let res = classify_with(alg, &target, alpha_cap)?;
    writeln!(out, "{}", connection_to_json(&res)?)?;
    Ok(())
}

pub fn cmd_figures(which: Figure, max: f64, points: usize, out: &mut dyn Write) -> Result<()> {
    let rows = figure_rows(which, max, points, Execution::default())?;
    write_figure_csv(out, which, &rows)
}

/// Runs a parsed command, writing to `stdout` unless `--out` is given.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Build { r, m, out } => cmd_build(r, m, &out).map(|_| ()),
        Command::Geodesic {
            algebra,
            xdot0,
            theta,
            samples,
            horizon,
            format,
            out,
        } => {
            let alg = algebra.load()?;
            let (xdot0, theta) = (parse_csv_vector(&xdot0)?, parse_csv_vector(&theta)?);
            with_output(out.as_deref(), stdout, |w| {
                cmd_geodesic(&alg, &xdot0, &theta, samples, horizon, format, w)
            })
        }
        Command::Connect {
            algebra,
            x,
            z,
            alpha_cap,
            out,
        } => {
            let alg = algebra.load()?;
            let (x, z) = (parse_csv_vector(&x)?, parse_csv_vector(&z)?);
            with_output(out.as_deref(), stdout, |w| cmd_connect(&alg, &x, &z, alpha_cap, w))
        }
        Command::Figures {
            which,
            max,
            points,
            out,
        } => with_output(Some(&out), stdout, |w| cmd_figures(which, max, points, w)),
    }
}
