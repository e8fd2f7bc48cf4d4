use std::f64::consts::{FRAC_PI_4, PI};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsmooth_core::sampling::Family;

#[derive(Parser, Debug)]
#[command(
    name = "qsmooth",
    version,
    about = "Retrodicted quantum measurements: inequality checks and figure data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the entropy inequalities on seeded random configurations.
    Verify(VerifyArgs),
    /// Average entropies of the qubit Gaussian model against the strength `a`.
    Fig2(QubitArgs),
    /// Conditional and unconditional averages of V against `a`.
    Fig3(QubitArgs),
    /// Subsystem entropies and mutual informations of the hybrid model against `q`.
    Fig4(HybridArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format. Defaults to json for `verify` and csv otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Single,
    Bipartite,
    ProjectiveBipartite,
    Tripartite,
    SameBasis,
    Unbiased,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Single => Family::Single,
            FamilyArg::Bipartite => Family::Bipartite,
            FamilyArg::ProjectiveBipartite => Family::ProjectiveBipartite,
            FamilyArg::Tripartite => Family::Tripartite,
            FamilyArg::SameBasis => Family::SameBasis,
            FamilyArg::Unbiased => Family::Unbiased,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cases per family.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub cases: u64,
    /// Restrict to these families (repeatable); all families when omitted.
    #[arg(long, value_enum)]
    pub family: Vec<FamilyArg>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct QubitArgs {
    #[arg(long, default_value_t = 0.02)]
    pub a_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub a_max: f64,
    /// Number of logarithmically spaced `a` values.
    #[arg(long, default_value_t = 60)]
    pub grid: usize,
    /// Polar angle of the second (projective) measurement axis.
    #[arg(long, default_value_t = FRAC_PI_4, allow_negative_numbers = true)]
    pub theta: f64,
    /// Azimuth of the second measurement axis.
    #[arg(long, default_value_t = PI, allow_negative_numbers = true)]
    pub phi: f64,
    /// Bloch radius of the initial state.
    #[arg(long, default_value_t = 0.9)]
    pub r: f64,
    /// Polar angle of the initial state.
    #[arg(long, default_value_t = FRAC_PI_4, allow_negative_numbers = true)]
    pub theta_i: f64,
    /// Azimuth of the initial state.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_i: f64,
    /// Report entropies in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct HybridArgs {
    /// Number of evenly spaced `q` values on [0, 1].
    #[arg(long, default_value_t = 101)]
    pub q_grid: usize,
    /// Bloch radius of the second macrostate; the first is maximally mixed.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Polar angle of the second macrostate.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_i: f64,
    /// Azimuth of the second macrostate.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_i: f64,
    #[arg(long)]
    pub bits: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}
