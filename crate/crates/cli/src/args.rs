use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "threephase", version, about = "Translation bounds and optimal laminates for two elastic materials plus void")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound, region and moduli at a single point.
    Bound(BoundArgs),
    /// Bound and moduli along a ρ grid at fixed fractions.
    Sweep(SweepArgs),
    /// Region labels over a (ρ, m1) grid at fixed m2.
    RegionMap(RegionMapArgs),
    /// Attaining structure at a point, or evaluation of a laminate file.
    Laminate(LaminateArgs),
    /// Seeded comparison of closed forms, oracle and structures.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
    Table,
}

#[derive(Debug, Args)]
pub struct MatArgs {
    /// Moduli K1,L1,K2,L2 of the two materials.
    #[arg(long, value_name = "K1,L1,K2,L2", value_delimiter = ',', default_value = "1,2,3,4", allow_hyphen_values = true)]
    pub mat: Vec<f64>,
}

impl MatArgs {
    pub fn moduli(&self) -> Result<[f64; 4], String> {
        <[f64; 4]>::try_from(self.mat.as_slice())
            .map_err(|_| format!("--mat takes 4 moduli, got {}", self.mat.len()))
    }
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub m1: f64,
    #[arg(long)]
    pub m2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub mat: MatArgs,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Also run the numerical oracle and fail when it deviates.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = 1e-5)]
    pub tol_oracle: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub mat: MatArgs,
    #[arg(long, default_value_t = 0.17)]
    pub m1: f64,
    #[arg(long, default_value_t = 0.35)]
    pub m2: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub rho_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub rho_max: f64,
    #[arg(long, default_value_t = 2001)]
    pub rho_steps: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct RegionMapArgs {
    #[command(flatten)]
    pub mat: MatArgs,
    #[arg(long, alias = "m2", default_value_t = 0.35)]
    pub m2_plane: f64,
    /// Cells along ρ and along m1.
    #[arg(long, value_name = "NxM", default_value = "400x400")]
    pub grid: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct LaminateArgs {
    #[command(flatten)]
    pub mat: MatArgs,
    #[arg(long, required_unless_present = "eval")]
    pub m1: Option<f64>,
    #[arg(long, required_unless_present = "eval")]
    pub m2: Option<f64>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "eval")]
    pub rho: Option<f64>,
    /// Build the single-scale periodic cell instead (region B only).
    #[arg(long, conflicts_with = "eval")]
    pub sg: bool,
    /// Evaluate a laminate tree read from a JSON file.
    #[arg(long, value_name = "PATH")]
    pub eval: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub mat: MatArgs,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Regions to sample, comma separated; the ten closed-form regions by default.
    #[arg(long, value_delimiter = ',')]
    pub regions: Vec<String>,
    #[arg(long, default_value_t = 1e-5)]
    pub tol_oracle: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_attainment: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol_residual: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

/// `NxM` with both sides at least 2.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("grid '{s}' is not of the form NxM"))?;
    let n: usize = a.trim().parse().map_err(|_| format!("grid '{s}': bad count '{a}'"))?;
    let m: usize = b.trim().parse().map_err(|_| format!("grid '{s}': bad count '{b}'"))?;
    if n < 2 || m < 2 {
        return Err(format!("grid {n}x{m} needs at least 2 cells per side"));
    }
    Ok((n, m))
}
