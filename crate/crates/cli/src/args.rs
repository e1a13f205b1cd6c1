use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kho_core::model::{parse_eta_sq, SystemParams};
use kho_core::C64;

#[derive(Debug, Parser)]
#[command(
    name = "kho",
    version,
    about = "Quantum delta-kicked harmonic oscillator simulator"
)]
pub struct Cli {
    /// Worker threads for scans and Q-function sampling (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate a state and write the per-kick mean-energy trace.
    Evolve(EvolveArgs),
    /// Sample Husimi Q functions of evolved states.
    Qfunc(QfuncArgs),
    /// Kicks needed to reach 50 and 200 ħω across a range of η².
    EnergyScan(EnergyScanArgs),
    /// Quasienergy spectra of the Floquet operator across a range of η².
    Spectrum(SpectrumArgs),
    /// Resonant η² values and sine moduli for a range of q.
    Resonances(ResonancesArgs),
    /// Run the self-verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Kick-period denominator: ωT = 2πr/q.
    #[arg(long, default_value_t = 4)]
    pub q: u32,
    /// Kick-period numerator.
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Kick strength κ.
    #[arg(long, default_value_t = -0.8, allow_negative_numbers = true)]
    pub kappa: f64,
    /// η², numeric or symbolic (`pi`, `pi/2`, `2pi/sqrt3`, `phi*pi`, `3/4*pi`).
    #[arg(long, default_value = "pi")]
    pub eta2: String,
}

impl ParamArgs {
    pub fn eta_sq(&self) -> kho_core::Result<f64> {
        parse_eta_sq(&self.eta2)
    }

    pub fn system(&self) -> kho_core::Result<SystemParams> {
        SystemParams::new(self.r, self.q, self.kappa, self.eta_sq()?)
    }
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number-basis size.
    #[arg(long, default_value_t = 500)]
    pub dim: usize,
    #[arg(long, default_value_t = 108)]
    pub kicks: usize,
    /// Initial coherent amplitude `re,im`; ground state when omitted.
    #[arg(long, value_parser = parse_complex)]
    pub alpha: Option<C64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the final state as JSON.
    #[arg(long)]
    pub state_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QfuncArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 500)]
    pub dim: usize,
    /// Kick count; with neither --kicks nor an explicit --eta2, writes the
    /// four panels η² ∈ {π, φπ} × N ∈ {36, 108}.
    #[arg(long)]
    pub kicks: Option<usize>,
    #[arg(long, value_parser = parse_complex)]
    pub alpha: Option<C64>,
    /// Half-width of the square α window.
    #[arg(long, default_value_t = 20.0)]
    pub window: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 201)]
    pub res: usize,
    /// Output file for a single panel, or directory for the default panels.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnergyScanArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 1000)]
    pub dim: usize,
    #[arg(long, default_value = "0.4pi")]
    pub scan_min: String,
    #[arg(long, default_value = "1.6pi")]
    pub scan_max: String,
    #[arg(long, default_value_t = 61)]
    pub scan_points: usize,
    /// Give up on a threshold after this many kicks.
    #[arg(long, default_value_t = 1500)]
    pub kicks: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 500)]
    pub dim: usize,
    #[arg(long, default_value = "0.2pi")]
    pub scan_min: String,
    #[arg(long, default_value = "1.8pi")]
    pub scan_max: String,
    #[arg(long, default_value_t = 161)]
    pub scan_points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResonancesArgs {
    /// Single q to report (default: 3 through 8).
    #[arg(long)]
    pub q: Option<u32>,
    /// Also classify this η² for each q.
    #[arg(long)]
    pub eta2: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "quick", value_parser = ["quick", "full"])]
    pub verify_level: String,
    /// Offset added to ζ in the lattice route only (sensitivity check).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub perturb_zeta: f64,
    /// Lattice snapshot JSON to check against a fresh recomputation.
    #[arg(long)]
    pub fixture_in: Option<PathBuf>,
    /// Write the default lattice snapshot JSON here.
    #[arg(long)]
    pub fixture_out: Option<PathBuf>,
    /// Write the report here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `re,im` or a bare real part.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re,im`, got {s:?}")),
    }
}
