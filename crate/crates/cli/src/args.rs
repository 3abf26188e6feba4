use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ehp_duffing::OscillatorKind;

#[derive(Debug, Parser)]
#[command(
    name = "ehp-duffing",
    version,
    about = "Non-iterative time-finite-element integration of Duffing oscillators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in examples.
    Catalog(CatalogArgs),
    /// Integrate one example or a custom oscillator and write the trajectory.
    Simulate(SimulateArgs),
    /// Compare the integrator with the RKF45 reference on one example.
    Compare(CompareArgs),
    /// Step-size convergence study against a fine-step run.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ehp,
    Rkf45,
    Both,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Only list one oscillator type (hard, soft, inverted).
    #[arg(long = "type", value_parser = parse_kind)]
    pub kind: Option<OscillatorKind>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

fn parse_kind(s: &str) -> Result<OscillatorKind, String> {
    s.parse()
}

/// Oscillator and forcing parameters; each one given overrides the example.
#[derive(Debug, Default, Args)]
pub struct SystemArgs {
    /// Mass.
    #[arg(long)]
    pub m: Option<f64>,
    /// Damping coefficient.
    #[arg(long)]
    pub c: Option<f64>,
    /// Linear stiffness.
    #[arg(long)]
    pub k: Option<f64>,
    /// Cubic stiffness.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Initial displacement.
    #[arg(long)]
    pub u0: Option<f64>,
    /// Initial velocity.
    #[arg(long)]
    pub v0: Option<f64>,
    /// Forcing amplitude of F0 cos(omega t + phase).
    #[arg(long)]
    pub f0: Option<f64>,
    /// Forcing angular frequency.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Forcing phase.
    #[arg(long)]
    pub phase: Option<f64>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ToleranceArgs {
    /// RKF45 absolute error tolerance.
    #[arg(long, default_value_t = 1e-7)]
    pub abserr: f64,
    /// RKF45 relative error tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub relerr: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    /// Catalog example to start from, e.g. T1E1.
    #[arg(long)]
    pub example: Option<String>,
    #[command(flatten)]
    pub system: SystemArgs,
    /// Time step (example default, else 0.01).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Analysis time (example default, else 100).
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Ehp)]
    pub method: Method,
    /// Trajectory CSV (t,u,v,J). With --method both the RKF45 run goes to
    /// the same name with "-rkf45" before the extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Run summary as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Displacement history and phase portrait.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CompareArgs {
    #[arg(long)]
    pub example: String,
    /// Time step (example default).
    #[arg(long)]
    pub dt: Option<f64>,
    /// End of the compared interval (example default).
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub example: String,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.2, 0.1])]
    pub dts: Vec<f64>,
    #[arg(long = "reference-dt", default_value_t = 0.01)]
    pub reference_dt: f64,
    #[arg(long = "t-end", default_value_t = 100.0)]
    pub t_end: f64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Phase portraits of every run overlaid.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}
