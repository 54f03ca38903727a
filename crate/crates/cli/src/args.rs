use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const UNITS: &str = "All frequencies and rates are in units of the cavity coupling γ₀; \
times are in units of 1/γ₀.";

#[derive(Debug, Parser)]
#[command(
    name = "jch",
    version,
    about = "Phonon-dressed decay, coherence and backflow of the Jaynes-Cummings-Holstein qubit",
    long_about = None,
    after_help = UNITS
)]
pub struct Cli {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
#[command(next_help_heading = "Model parameters")]
pub struct ModelArgs {
    /// Cavity coupling γ₀ [sets the unit: γ₀ = 1 unless rescaled]
    #[arg(long, global = true)]
    pub gamma0: Option<f64>,
    /// Lorentzian spectral width λ [units of γ₀]
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Qubit-cavity detuning Δ [units of γ₀]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Phonon frequency Ω [units of γ₀]
    #[arg(long = "omega-ph", global = true)]
    pub omega_ph: Option<f64>,
    /// Qubit-phonon coupling g_p [dimensionless]
    #[arg(long = "g-p", global = true)]
    pub g_p: Option<f64>,
    /// Qubit frequency ω₀ [units of γ₀; drops out of the rotating-frame results]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega0: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
#[command(next_help_heading = "Output")]
pub struct OutputArgs {
    /// Output file (or directory for multi-file sweeps); stdout if absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; defaults to the extension of --out, else csv
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Worker threads for sweeps [default: available cores]
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// TOML settings file [default: $JCH_CONFIG]
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TimeGridArgs {
    /// End of the time grid [units of 1/γ₀; default 10]
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid points including t = 0 [default 201]
    #[arg(long)]
    pub t_samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct AmplitudeArgs {
    /// Real amplitude a of the decaying level in a|0⟩ + b|1⟩ [default 1/√2]
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Real amplitude b [default 1/√2]
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decay rate Γ, Lamb shift S and their integrals γ, Φ over a time grid
    #[command(after_help = UNITS)]
    Rates {
        #[command(flatten)]
        time: TimeGridArgs,
    },
    /// l1 coherence C(t) of the reduced qubit state
    #[command(after_help = UNITS)]
    Coherence {
        #[command(flatten)]
        time: TimeGridArgs,
        #[command(flatten)]
        init: AmplitudeArgs,
    },
    /// Coherence-backflow measure N at one parameter point
    #[command(after_help = UNITS)]
    Nonmarkov {
        /// Integration horizon [units of 1/γ₀; default 50/γ₀]
        #[arg(long)]
        horizon: Option<f64>,
        /// Emit the sign intervals of Γ instead of the summary row
        #[arg(long)]
        intervals: bool,
        #[command(flatten)]
        init: AmplitudeArgs,
    },
    /// Parameter grids: a figure preset or explicit axes
    #[command(after_help = UNITS)]
    Sweep(SweepArgs),
    /// Independent checks: quadrature, exact simulation, polaron identities
    #[command(after_help = UNITS)]
    Oracle {
        #[command(subcommand)]
        kind: OracleKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    CoherenceVsTime,
    NmGrid,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Figure preset; model flags override its fixed parameters
    #[arg(long, value_enum, conflicts_with_all = ["mode", "axis1", "axis2"])]
    pub preset: Option<PresetArg>,
    /// Sweep type for explicit axes
    #[arg(long, value_enum, requires = "axis1")]
    pub mode: Option<ModeArg>,
    /// First axis: `name=v1,v2,...` or `name:min:max:count`
    #[arg(long)]
    pub axis1: Option<String>,
    /// Second axis, same syntax
    #[arg(long)]
    pub axis2: Option<String>,
    /// Name used for output files of explicit sweeps
    #[arg(long, default_value = "sweep")]
    pub name: String,
    /// End of the time grid or backflow horizon [units of 1/γ₀; default 50]
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Time points for coherence sweeps [default 1001]
    #[arg(long)]
    pub t_samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleCommon {
    /// Also run the analytic counterpart and report deviations
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Subcommand)]
pub enum OracleKind {
    /// Adaptive quadrature of the correlation function
    #[command(after_help = UNITS)]
    Quadrature {
        #[command(flatten)]
        time: TimeGridArgs,
        /// Absolute quadrature tolerance
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        common: OracleCommon,
    },
    /// Schrödinger evolution with a discretized cavity and phonon mode
    #[command(after_help = UNITS)]
    Exact {
        #[command(flatten)]
        time: TimeGridArgs,
        #[command(flatten)]
        init: AmplitudeArgs,
        /// Number of discrete cavity modes
        #[arg(long, default_value_t = 300)]
        modes: usize,
        /// Phonon Fock cutoff [default max(24, cutoff rule)]
        #[arg(long)]
        n_ph_max: Option<usize>,
        /// Half width of the mode window [units of γ₀; default 25λ]
        #[arg(long)]
        window: Option<f64>,
        /// Integrator step [units of 1/γ₀; default 0.05/‖H‖]
        #[arg(long)]
        dt: Option<f64>,
        #[command(flatten)]
        common: OracleCommon,
    },
    /// Lang-Firsov operator identities on truncated Fock matrices
    #[command(after_help = UNITS)]
    Polaron {
        /// Phonon Fock cutoff
        #[arg(long, default_value_t = 40)]
        n_ph_max: usize,
        #[command(flatten)]
        common: OracleCommon,
    },
}
