//! `dumbbell`: sweeps, spectra, profiles and inequality checks for dumbbell
//! surfaces of revolution.
//!
//! Exit status: 0 when every checked invariant holds, 2 when one fails or a
//! computation cannot be completed, 1 on usage or configuration errors.

// `!(a <= b)` is used on purpose so that NaN fails a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use config::{parse_dyadic, EpsSpec, Layer, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "dumbbell",
    version,
    about = "Spectral and curvature measurements on dumbbell surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Cap radius
    #[arg(long = "R", global = true)]
    radius: Option<f64>,
    /// Cylinder length
    #[arg(long = "L", global = true)]
    length: Option<f64>,
    /// Comma-separated neck radii
    #[arg(long, global = true, value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
    /// Neck radii 1/i for i = i0, 2 i0, ... <= i1 [default: 5:40]
    #[arg(long, global = true, value_name = "I0:I1")]
    eps_dyadic: Option<String>,
    /// Curvature norm exponent, in (1, 2] [default: 1.5]
    #[arg(long = "p", global = true)]
    p: Option<f64>,
    /// Curvature level K >= 0 [default: 0]
    #[arg(long = "K", global = true)]
    level: Option<f64>,
    /// Interior meridian nodes [default: 4000]
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Highest angular mode [default: 2]
    #[arg(long, global = true)]
    m_max: Option<u32>,
    /// Eigenvalues per mode [default: 4]
    #[arg(long, global = true)]
    k_eigs: Option<usize>,
    /// Worker threads [default: available cores]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Relative quadrature tolerance [default: 1e-10]
    #[arg(long, global = true)]
    tol_quad: Option<f64>,
    #[arg(long, global = true)]
    out_csv: Option<PathBuf>,
    #[arg(long, global = true)]
    out_json: Option<PathBuf>,
    /// Flat `key = value` settings file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One row of measurements per neck radius (CSV on stdout by default)
    Sweep,
    /// Per-mode eigenvalues for each neck radius, or for a round sphere
    Spectrum {
        /// Use the round sphere of radius R instead of the dumbbell
        #[arg(long)]
        sphere: bool,
    },
    /// Sampled profile (x, g, g', g'', kappa) for the first neck radius
    Profile {
        #[arg(long, default_value_t = 401)]
        samples: usize,
    },
    /// Inequality reports on fixed grids
    Claims,
    /// Total curvature, area and length against their bounds
    Gaussbonnet,
}

impl Common {
    fn layer(&self) -> Result<Layer> {
        let eps = match (&self.eps_list, &self.eps_dyadic) {
            (Some(_), Some(_)) => {
                anyhow::bail!("--eps-list and --eps-dyadic are mutually exclusive")
            }
            (Some(v), None) => Some(EpsSpec::List(v.clone())),
            (None, Some(t)) => Some(parse_dyadic(t)?),
            (None, None) => None,
        };
        Ok(Layer {
            radius: self.radius,
            length: self.length,
            eps,
            p: self.p,
            level: self.level,
            grid_n: self.grid_n,
            m_max: self.m_max,
            k_eigs: self.k_eigs,
            jobs: self.jobs,
            tol_quad: self.tol_quad,
            out_csv: self.out_csv.clone(),
            out_json: self.out_json.clone(),
        })
    }

    fn settings(&self) -> Result<Settings> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
                Layer::parse_file(&text)?
            }
            None => Layer::default(),
        };
        Settings::resolve(file.under(self.layer()?))
    }
}

fn run(cli: &Cli, settings: &Settings) -> Result<Vec<String>> {
    match cli.command {
        Command::Sweep => commands::sweep(settings),
        Command::Spectrum { sphere } => commands::spectrum(settings, sphere),
        Command::Profile { samples } => commands::profile(settings, samples),
        Command::Claims => commands::claims(settings),
        Command::Gaussbonnet => commands::gauss_bonnet(settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let settings = match cli.common.settings().and_then(|s| match cli.command {
        Command::Profile { samples } if samples < 2 => {
            anyhow::bail!("--samples must be at least 2")
        }
        _ => Ok(s),
    }) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match run(&cli, &settings) {
        Ok(violations) if violations.is_empty() => ExitCode::SUCCESS,
        Ok(violations) => {
            for v in violations {
                eprintln!("invariant violated: {v}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
