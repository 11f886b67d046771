//! `paultrap`: trap analysis, stability maps, trajectories, parameter scans,
//! heating and rf dissipation estimates from the command line.
//!
//! Exit codes: 0 success, 2 input error, 3 physics or convergence failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "paultrap", version, about = "Design and analysis of rf Paul ion traps")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Trap configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file. Without it the artifact goes to stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel stages (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// rf nil, depth, secular frequencies, principal axes, a/q and efficiency.
    Analyze(AnalyzeArgs),
    /// Mathieu stability verdicts on an (a, q) grid, as CSV.
    StabilityMap(MapArgs),
    /// Integrate one ion trajectory from a displacement off the rf nil, as CSV.
    Trajectory(TrajectoryArgs),
    /// Re-run the analysis with one config value swept, as CSV.
    Scan(ScanArgs),
    /// Heating rate from a noise model, or a power-law fit to measurements.
    Heating(HeatingArgs),
    /// rf power dissipation, impedance and breakdown estimates.
    Dissipation(DissipationArgs),
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Also check psi >= 0 at this many random points in the search box.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct MapArgs {
    #[arg(long, default_value_t = -0.2, allow_negative_numbers = true)]
    pub a_min: f64,
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    pub a_max: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub q_min: f64,
    #[arg(long, default_value_t = 1.2, allow_negative_numbers = true)]
    pub q_max: f64,
    /// Rows (a values).
    #[arg(long, default_value_t = 50)]
    pub na: usize,
    /// Columns (q values).
    #[arg(long, default_value_t = 50)]
    pub nq: usize,
}

#[derive(Args, Debug)]
pub struct TrajectoryArgs {
    /// Start offset from the rf nil, m, as x,y,z.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [1e-6, 0.0, 0.0], allow_negative_numbers = true)]
    pub offset: Vec<f64>,
    /// Initial velocity, m/s, as vx,vy,vz.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 0.0, 0.0], allow_negative_numbers = true)]
    pub velocity: Vec<f64>,
    /// Uniform stray field, V/m, as ex,ey,ez.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 0.0, 0.0], allow_negative_numbers = true)]
    pub stray: Vec<f64>,
    /// Duration in rf periods.
    #[arg(long, default_value_t = 100.0)]
    pub periods: f64,
    /// Integration steps per rf period (at least 50 for the full field).
    #[arg(long, default_value_t = 100)]
    pub steps_per_period: usize,
    /// Keep every n-th step.
    #[arg(long, default_value_t = 1)]
    pub sample_every: usize,
    /// Integrate the secular motion in the pseudopotential only.
    #[arg(long)]
    pub pseudo: bool,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Dotted config path, e.g. drive.V0_volts or layout.aspect_ratio.
    #[arg(long)]
    pub param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub values: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct HeatingArgs {
    /// Fit ω·S_E versus distance from a CSV `d_m,omega_rad_s,S_E_V2m2Hz[,T_K]`.
    #[arg(long, value_name = "PATH")]
    pub measurements: Option<PathBuf>,
    /// Ion species (overridden by the config's ion when --config is given).
    #[arg(long, default_value = "Ca40")]
    pub ion: String,
    /// Secular angular frequency, rad/s.
    #[arg(long)]
    pub omega_m: Option<f64>,
    /// Drive angular frequency, rad/s (default: from the config).
    #[arg(long)]
    pub omega_rf: Option<f64>,
    /// Flat noise density, V^2/m^2/Hz (ignores the model flags).
    #[arg(long)]
    pub s_e: Option<f64>,
    /// Model noise density at the reference point, V^2/m^2/Hz.
    #[arg(long)]
    pub s0: Option<f64>,
    /// Reference angular frequency, rad/s.
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Reference distance, m.
    #[arg(long)]
    pub d0: Option<f64>,
    /// Ion-electrode distance, m (default: d0).
    #[arg(long)]
    pub distance: Option<f64>,
    /// Electrode temperature, K.
    #[arg(long, default_value_t = 0.0)]
    pub temperature: f64,
    /// Distance exponent (-4 model, -3.5 measured).
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub frequency_exponent: f64,
    /// Use the cryogenic temperature law as the noise reference (S0 = plateau).
    #[arg(long)]
    pub cryogenic: bool,
    /// Include the micromotion sideband term.
    #[arg(long)]
    pub cross: bool,
}

#[derive(Args, Debug)]
pub struct DissipationArgs {
    /// rf amplitude, V.
    #[arg(long)]
    pub v0: f64,
    /// Drive angular frequency, rad/s.
    #[arg(long)]
    pub omega: f64,
    /// Electrode capacitance, F.
    #[arg(long)]
    pub capacitance: f64,
    /// Series resistance, ohm.
    #[arg(long)]
    pub resistance: f64,
    /// Loss tangent (or use --material).
    #[arg(long)]
    pub tan_delta: Option<f64>,
    /// Loss-tangent preset name.
    #[arg(long)]
    pub material: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub inductance: f64,
    /// Bulk dielectric strength at the reference thickness, V/m.
    #[arg(long)]
    pub e_ref: Option<f64>,
    /// Reference thickness, m.
    #[arg(long)]
    pub d_ref: Option<f64>,
    /// Dielectric thickness or electrode gap for the breakdown estimate, m.
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub bulk_exponent: f64,
    #[arg(long, default_value_t = 0.5)]
    pub flashover_exponent: f64,
    #[arg(long, default_value_t = 0.4)]
    pub surface_ratio: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
