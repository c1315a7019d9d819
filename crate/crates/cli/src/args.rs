use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "nsreg", version, about = "Navier-Stokes regularity experiments")]
pub struct Cli {
    /// TOML file with default values; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (trace.csv, meta.json, report.json, index.json).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the spectral solver and record norm traces.
    Simulate(SimArgs),
    /// Evaluate a regularity criterion from scalar data.
    Bounds(BoundsArgs),
    /// Classical horizon versus force-free criterion over a sweep of ‖u₀‖.
    Compare(CompareArgs),
    /// Empirical lower bounds on the embedding constants.
    Calibrate(CalibrateArgs),
    /// Simulate and verify the inequalities and certified bounds.
    Monitor(MonitorArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Shear,
    Zero,
    Random,
    Kolmogorov,
    Snapshot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForcingKind {
    Zero,
    Shear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderArg {
    Rk2,
    Rk4,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimArgs {
    #[arg(long, value_enum)]
    pub init: Option<InitKind>,
    /// Snapshot file read by `--init snapshot`.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shear amplitude, or target ‖u₀‖ of a random field.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Energy spectrum slope of random fields.
    #[arg(long)]
    pub slope: Option<f64>,
    #[arg(long, value_enum)]
    pub forcing: Option<ForcingKind>,
    #[arg(long)]
    pub force_amplitude: Option<f64>,
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    /// Courant number; enables adaptive steps capped by `--dt`.
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Also write the final state as a snapshot.
    #[arg(long)]
    pub save_snapshot: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct LedgerArgs {
    /// First Stokes eigenvalue λ₁.
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Product C_S·C_I of the embedding constants.
    #[arg(long)]
    pub holder_product: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
#[command(group(ArgGroup::new("criterion").args(["free", "steady", "timedep"])))]
pub struct BoundsArgs {
    #[arg(long)]
    pub free: bool,
    #[arg(long)]
    pub steady: bool,
    #[arg(long)]
    pub timedep: bool,
    /// ‖u₀‖
    #[arg(long)]
    pub l2: Option<f64>,
    /// ‖u₀‖₁²
    #[arg(long)]
    pub h1sq: Option<f64>,
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    /// ‖f‖ of a steady force.
    #[arg(long)]
    pub f: Option<f64>,
    /// ∫₀ᵀ‖f‖² of a time-dependent force.
    #[arg(long)]
    pub intf2: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[command(flatten)]
    pub ledger: LedgerArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CompareArgs {
    /// ‖u₀‖₁², held fixed.
    #[arg(long)]
    pub h1sq: Option<f64>,
    /// Values of ‖u₀‖, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<f64>>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// T* as a fraction of the classical horizon.
    #[arg(long)]
    pub tstar_fraction: Option<f64>,
    /// Attach a monitored simulation to every representable sweep point.
    #[arg(long)]
    pub simulate: bool,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[command(flatten)]
    pub ledger: LedgerArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibrationInit {
    Random,
    Shear,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CalibrateArgs {
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub ensemble: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub slope: Option<f64>,
    #[arg(long, value_enum)]
    pub init: Option<CalibrationInit>,
    /// Number of doubled padded grids in the extrapolated quadrature.
    #[arg(long)]
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MonitorArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub ledger: LedgerArgs,
    /// Number of random members (seeds seed, seed+1, …).
    #[arg(long)]
    pub ensemble: Option<usize>,
    /// Rescale random members so that the force-free criterion LHS equals this.
    #[arg(long)]
    pub target_lhs: Option<f64>,
    #[arg(long)]
    pub h1_tolerance: Option<f64>,
    #[arg(long)]
    pub energy_tolerance: Option<f64>,
    #[arg(long)]
    pub dominance_tolerance: Option<f64>,
    #[arg(long)]
    pub balance_tolerance: Option<f64>,
}
