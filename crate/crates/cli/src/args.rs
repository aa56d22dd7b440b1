use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use susle::Rational;

fn rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "susle", version, about = "Super-SLE toolkit: singular vectors, drift checks, simulation and Monte Carlo tests")]
#[command(args_override_self = true)]
pub struct Cli {
    /// TOML file whose keys mirror the subcommand's long flags; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Upper bound on worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Check or solve for a singular vector in a Verma module.
    CheckSingular(CheckSingular),
    /// Exact test that the Grassmann-integrated drift is proportional to the singular vector.
    DriftCheck(DriftCheck),
    /// Simulate pointwise Loewner flows and write traces.
    Simulate(Simulate),
    /// Monte Carlo constancy test of the integrated process or of the classical observable.
    MartingaleMc(MartingaleMc),
    /// Exponential coordinates of a series b1 z + b0 + b-1/z + ...
    Expmap(Expmap),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckSingular(_) => "check-singular",
            Command::DriftCheck(_) => "drift-check",
            Command::Simulate(_) => "simulate",
            Command::MartingaleMc(_) => "martingale-mc",
            Command::Expmap(_) => "expmap",
        }
    }

    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::CheckSingular(a) => &a.out,
            Command::DriftCheck(a) => &a.out,
            Command::Simulate(a) => &a.out,
            Command::MartingaleMc(a) => &a.out,
            Command::Expmap(a) => &a.out,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Omit the timestamp field so that repeated runs are byte-identical.
    #[arg(long)]
    #[serde(skip)]
    pub no_timestamp: bool,
}

/// Weight and model parameters, all exact rationals written as `p/q`.
#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct ParamArgs {
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub kappa: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub c: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub h: Option<Rational>,
    /// U(1) charge of the N=2 highest weight.
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub alpha: Option<Rational>,
    /// Parameter of the N=2 family (with --alpha).
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub t: Option<Rational>,
    /// Coefficient of the J-1 noise in the N=2 model.
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub a: Option<Rational>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Unknown {
    C,
    H,
    Alpha,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckSingular {
    /// vir, ns1, ns2 (standard bracket table) or ns2-printed.
    #[arg(long)]
    pub algebra: String,

    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    /// `level2`, `level1`, `default`, or comma-separated PBW monomials such as "L-2,L-1 L-1".
    #[arg(long)]
    pub template: Option<String>,

    /// Comma-separated coefficients for the template monomials; checks that vector instead of solving.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,

    /// Weight to solve for when a template is given without coefficients.
    #[arg(long, value_enum)]
    pub solve_for: Option<Unknown>,

    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct DriftCheck {
    /// vir, ns1 or ns2.
    #[arg(long)]
    pub model: String,

    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DriverArgs {
    /// Base seed; the SUSLE_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Number of Euler steps (alternative to --horizon).
    #[arg(long, conflicts_with = "horizon")]
    pub steps: Option<usize>,
    /// Final time; the step count is horizon/dt rounded.
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimModel {
    Classical,
    Ns1,
    Ns2,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaDriftArg {
    Derived,
    Printed,
}

#[derive(Args, Debug, Serialize)]
pub struct Simulate {
    #[arg(long, value_enum)]
    pub model: SimModel,

    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    /// Starting point such as `0+2i`, `1.5-0.25i` or `2i`; repeatable.
    #[arg(long = "point", required = true, allow_hyphen_values = true)]
    pub points: Vec<String>,

    #[command(flatten)]
    #[serde(flatten)]
    pub driver: DriverArgs,

    #[arg(long, default_value_t = 1)]
    pub trials: u64,

    /// Keep every n-th step (the final state is always kept).
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,

    /// A point is frozen once |f| falls below this threshold.
    #[arg(long, default_value_t = 1e-6)]
    pub swallow_eps: f64,

    /// Drift of the odd N=1 component.
    #[arg(long, value_enum, default_value_t = ThetaDriftArg::Derived)]
    pub theta_drift: ThetaDriftArg,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum McModel {
    Vir,
    Ns1,
    Ns2,
    /// The classical observable h(f'/f)^2 + (c/12)Sf at --point.
    Observable,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ito,
    Literal,
}

#[derive(Args, Debug, Serialize)]
pub struct MartingaleMc {
    #[arg(long, value_enum)]
    pub model: McModel,

    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    /// Level cutoff, e.g. 3 or 5/2.
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub level: Option<Rational>,

    /// Sample point for the observable model.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,

    #[command(flatten)]
    #[serde(flatten)]
    pub driver: DriverArgs,

    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,

    /// Group integrator for the Q-process.
    #[arg(long, value_enum, default_value_t = Scheme::Ito)]
    pub scheme: Scheme,

    /// Track every coefficient instead of the quotient by the singular-vector submodule.
    #[arg(long)]
    pub no_quotient: bool,

    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct Expmap {
    /// Series JSON file, or `-` for standard input.
    #[arg(long, conflicts_with = "series")]
    pub input: Option<PathBuf>,

    /// Series JSON given inline.
    #[arg(long)]
    pub series: Option<String>,

    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}
