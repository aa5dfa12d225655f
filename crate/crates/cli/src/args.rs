use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use valdist_core::LambdaMode;

#[derive(Parser, Debug)]
#[command(name = "valdist", version, about = "Value-distribution densities of L-functions and family averages")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Directory for output files.
    #[arg(long, global = true, env = "VALDIST_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,

    /// Flat `key=value` file of defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Density of 2·Re log of the Euler product over p ≤ y on the torus.
    Mdensity(MDensityArgs),
    /// Density of log L(σ, χ_D) (or L′/L) over quadratic characters.
    Qdensity(QDensityArgs),
    /// Family averages compared with the density route.
    #[command(subcommand)]
    Empirical(EmpiricalCommand),
    /// Fundamental discriminants up to Y, optionally with the positivity filter.
    Discriminants(DiscriminantsArgs),
}

#[derive(Subcommand, Debug)]
pub enum EmpiricalCommand {
    /// Characters mod a prime q.
    Dirichlet(DirichletArgs),
    /// Real characters χ_D with |D| ≤ Y.
    Quadratic(QuadraticArgs),
    /// Monte Carlo over the torus of angles.
    Torus(TorusArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GridArgs {
    /// Fourier cutoff; chosen by probing the decay when absent.
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Threshold for the decay probe.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Odd number of Fourier samples; sized from x_max when absent.
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
    pub u_min: f64,
    #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
    pub u_max: f64,
    #[arg(long, default_value_t = 2001)]
    pub n_u: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MDensityArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long)]
    pub y: f64,
    /// Extra points at which to report the characteristic function.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Base name of the output files.
    #[arg(long, default_value = "mdensity")]
    pub name: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QDensityArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, value_parser = parse_mode, default_value = "logl")]
    pub mode: LambdaMode,
    /// Tolerance for the Euler-product tail of the characteristic function.
    #[arg(long, default_value_t = 1e-8, allow_hyphen_values = true)]
    pub tail_tol: f64,
    /// Fail unless the inverted density is real to 1e-8.
    #[arg(long)]
    pub check_real: bool,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = "qdensity")]
    pub name: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BinArgs {
    /// Number of histogram bins over [u-min, u-max]; no histogram when 0.
    #[arg(long, default_value_t = 0)]
    pub bins: usize,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    pub u_min: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub u_max: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DirichletArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, value_delimiter = ',', default_value = "1", allow_hyphen_values = true)]
    pub x: Vec<f64>,
    #[arg(long)]
    pub y: f64,
    /// Histogram 2·log|L(σ, χ)| instead of the truncated Euler log.
    #[arg(long)]
    pub full_l: bool,
    #[command(flatten)]
    pub histogram: BinArgs,
    #[arg(long, default_value = "dirichlet")]
    pub name: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViaArg {
    Oracle,
    Series,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QuadraticArgs {
    #[arg(long = "Y", alias = "big-y")]
    #[serde(rename = "Y")]
    pub big_y: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, value_delimiter = ',', default_value = "1", allow_hyphen_values = true)]
    pub x: Vec<f64>,
    #[arg(long, value_parser = parse_mode, default_value = "logl")]
    pub mode: LambdaMode,
    #[arg(long, value_enum, default_value_t = ViaArg::Oracle)]
    pub via: ViaArg,
    /// Smoothing length X of the series route; Y^(1/8) when absent.
    #[arg(long = "X", alias = "smoothing")]
    #[serde(rename = "X")]
    pub smoothing: Option<f64>,
    #[arg(long, default_value_t = 1e-8, allow_hyphen_values = true)]
    pub tail_tol: f64,
    #[command(flatten)]
    pub histogram: BinArgs,
    #[arg(long, default_value = "quadratic")]
    pub name: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TorusArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long)]
    pub y: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "1", allow_hyphen_values = true)]
    pub x: Vec<f64>,
    #[command(flatten)]
    pub histogram: BinArgs,
    #[arg(long, default_value = "torus")]
    pub name: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DiscriminantsArgs {
    #[arg(long = "Y", alias = "big-y")]
    #[serde(rename = "Y")]
    pub big_y: u64,
    /// Run the positivity filter at this σ.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub dagger_step: f64,
    #[arg(long, default_value = "discriminants")]
    pub name: String,
}

fn parse_mode(s: &str) -> Result<LambdaMode, String> {
    s.parse::<LambdaMode>().map_err(|e| e.to_string())
}
