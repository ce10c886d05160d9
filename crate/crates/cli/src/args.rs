use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use expwell::secular::Parity;
use expwell::{Execution, PrecisionPolicy};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "expwell", version, about = "Bound states of V(x) = g²·exp|x|")]
pub struct Cli {
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Energy brackets of the levels n = 0..=n_max.
    Spectrum(SpectrumArgs),
    /// The even-parity bracketing table (n = 0, 2, 4) with the reference intervals.
    Table1(Table1Args),
    /// Secular function surface over a (g, k) grid.
    Figure3(Figure3Args),
    /// Odd-parity zeros k_n(g) over a g grid.
    Figure4(Figure4Args),
    /// Regular wavefunctions at k_n ± dk.
    Figure5(Figure5Args),
    /// Even-parity zeros in a window of k over a g grid.
    Figure6(Figure6Args),
    /// A sampled wavefunction.
    Wavefunction(WavefunctionArgs),
    /// Runs the acceptance suite.
    Check(CheckArgs),
}

/// Coupling, given as g or as g² (not both).
#[derive(Args, Debug, Clone)]
pub struct Coupling {
    /// Coupling g.
    #[arg(long, conflicts_with = "g2")]
    pub g: Option<f64>,
    /// Coupling squared, g².
    #[arg(long = "g2")]
    pub g2: Option<f64>,
}

impl Coupling {
    /// g, falling back to √default_g2 when neither flag is given.
    pub fn resolve(&self, default_g2: Option<f64>) -> Result<f64, CliError> {
        let g = match (self.g, self.g2, default_g2) {
            (Some(g), None, _) => g,
            (None, Some(g2), _) => positive("g2", g2)?.sqrt(),
            (None, None, Some(g2)) => g2.sqrt(),
            (None, None, None) => {
                return Err(CliError::Usage("one of --g or --g2 is required".into()))
            }
            (Some(_), Some(_), _) => {
                return Err(CliError::Usage(
                    "--g and --g2 are mutually exclusive".into(),
                ))
            }
        };
        positive("g", g)
    }
}

#[derive(Args, Debug, Clone)]
pub struct Precision {
    /// Base working precision in bits.
    #[arg(long, default_value_t = 128)]
    pub base_bits: u32,
    /// Escalation ceiling in bits.
    #[arg(long, default_value_t = 8192)]
    pub max_bits: u32,
    /// Requested decimal digits of the special-function values.
    #[arg(long, default_value_t = 30)]
    pub target_digits: u32,
    /// Evaluate on one thread.
    #[arg(long)]
    pub sequential: bool,
}

impl Precision {
    pub fn policy(&self) -> Result<PrecisionPolicy, CliError> {
        if self.target_digits == 0 {
            return Err(CliError::Usage("--target-digits must be positive".into()));
        }
        PrecisionPolicy::new(
            self.base_bits,
            self.max_bits,
            2,
            10f64.powi(-(self.target_digits as i32)),
        )
        .map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// CSV destination (stdout when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Asym,
    Regular,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepresentationArg {
    Asym,
    Regular,
    Fullline,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub coupling: Coupling,
    /// Highest level.
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Asym)]
    pub method: MethodArg,
    /// Only levels of this parity.
    #[arg(long, value_enum)]
    pub parity: Option<ParityArg>,
    /// Dirichlet cutoff R for the regular method (default: ln(E_max/g²) + 2.5).
    #[arg(long)]
    pub r: Option<f64>,
    /// Bisection tolerance on k.
    #[arg(long, default_value_t = 1e-12)]
    pub k_tol: f64,
    /// Add the Numerov oracle energy of every level.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub precision: Precision,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct Table1Args {
    /// Coupling (default g² = 2).
    #[command(flatten)]
    pub coupling: Coupling,
    /// Cutoff R for every row instead of the reference 3.0/3.0/3.4.
    #[arg(long)]
    pub r: Option<f64>,
    /// Bisection tolerance on k (default: the reference bracket widths).
    #[arg(long)]
    pub k_tol: Option<f64>,
    #[command(flatten)]
    pub precision: Precision,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct Figure3Args {
    #[arg(long, default_value_t = 0.2)]
    pub g_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub g_max: f64,
    #[arg(long, default_value_t = 15)]
    pub g_steps: usize,
    #[arg(long, default_value_t = 0.5)]
    pub k_min: f64,
    #[arg(long, default_value_t = 8.0)]
    pub k_max: f64,
    #[arg(long, default_value_t = 76)]
    pub k_steps: usize,
    #[arg(long, value_enum, default_value_t = ParityArg::Odd)]
    pub parity: ParityArg,
    #[command(flatten)]
    pub precision: Precision,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct Figure4Args {
    #[arg(long, default_value_t = 0.1)]
    pub g_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub g_max: f64,
    #[arg(long, default_value_t = 50)]
    pub g_steps: usize,
    /// Highest odd level.
    #[arg(long, default_value_t = 45)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub k_tol: f64,
    #[command(flatten)]
    pub precision: Precision,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct Figure5Args {
    /// Coupling (default g² = 2).
    #[command(flatten)]
    pub coupling: Coupling,
    /// Even or odd level whose wavefunctions are bracketed.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Offset of the lower and upper k from the level.
    #[arg(long, default_value_t = 1e-4)]
    pub dk: f64,
    /// End of the r grid (default: turning point + 2.5).
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,
    #[command(flatten)]
    pub precision: Precision,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct Figure6Args {
    #[arg(long, default_value_t = 6.25)]
    pub g_min: f64,
    #[arg(long, default_value_t = 9.75)]
    pub g_max: f64,
    #[arg(long, default_value_t = 8)]
    pub g_steps: usize,
    #[arg(long, default_value_t = 25.0)]
    pub k_min: f64,
    #[arg(long, default_value_t = 40.0)]
    pub k_max: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub k_tol: f64,
    #[command(flatten)]
    pub precision: Precision,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub coupling: Coupling,
    /// Level whose k is solved for.
    #[arg(long, conflicts_with = "k", required_unless_present = "k")]
    pub n: Option<usize>,
    /// Explicit k (then --parity selects the solution).
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, value_enum)]
    pub parity: Option<ParityArg>,
    #[arg(long, value_enum, default_value_t = RepresentationArg::Regular)]
    pub representation: RepresentationArg,
    /// End of the grid (default: turning point + 2.5).
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,
    /// Report the finite-difference ODE residual on stderr.
    #[arg(long)]
    pub residual: bool,
    #[command(flatten)]
    pub precision: Precision,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Only the quick criteria.
    #[arg(long, conflicts_with = "only")]
    pub fast: bool,
    /// Comma-separated criterion ids.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
    #[command(flatten)]
    pub precision: Precision,
    #[command(flatten)]
    pub output: Output,
}

pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be positive, got {v}"
        )))
    }
}

/// `steps + 1` evenly spaced points of [lo, hi].
pub fn linspace(name: &str, lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    positive(&format!("{name}-min"), lo)?;
    if !(hi > lo) || steps == 0 {
        return Err(CliError::Usage(format!(
            "need {name}-min < {name}-max and {name}-steps > 0"
        )));
    }
    let d = (hi - lo) / steps as f64;
    Ok((0..=steps)
        .map(|j| if j == steps { hi } else { lo + j as f64 * d })
        .collect())
}
