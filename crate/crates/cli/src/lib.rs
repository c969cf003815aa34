//! Command-line front end: configuration, sweeps and deterministic CSV/SVG
//! emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Overrides, RunConfig, ScenarioKind};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "catzeno", version, about = "Zeno and anti-Zeno control of Schrödinger-cat decoherence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Cutoff ratio ω_c/ω₀ (repeatable).
    #[arg(long = "r", global = true, allow_negative_numbers = true)]
    r: Vec<f64>,
    /// Interruption interval in units of 1/ω_c (repeatable).
    #[arg(long = "omega-c-tau", global = true, allow_negative_numbers = true)]
    omega_c_tau: Vec<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Switch to a frequency-independent occupation N(ω) = N0.
    #[arg(long, global = true, allow_negative_numbers = true)]
    n0: Option<f64>,
    /// System–reservoir coupling.
    #[arg(long, global = true, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long, global = true, value_enum)]
    scenario: Option<ScenarioKind>,
    /// Also write SVG charts.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Measurement-modified rates over an ω_c τ grid.
    Rates,
    /// Normalised Wigner interference-peak curves.
    WignerPeak,
    /// Number distributions at snapshot times.
    PnSnapshots,
    /// Closed-form Wigner function on a phase-space grid.
    WignerField,
    /// Certify the closed forms against the brute-force oracles.
    Verify {
        /// Scale γ₋₁ fed to the closed forms (negative control).
        #[arg(long, hide = true, default_value_t = 1.0)]
        corrupt_gamma_minus: f64,
    },
    /// Print the resolved configuration.
    PrintConfig,
}

fn resolve(common: &Common) -> Result<RunConfig, CliError> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply(&Overrides {
        out: common.out.clone(),
        r: common.r.clone(),
        omega_c_tau: common.omega_c_tau.clone(),
        alpha: common.alpha,
        n0: common.n0,
        g: common.g,
        scenario: common.scenario,
        svg: common.svg,
    });
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = resolve(&cli.common)?;
    let artifacts = match cli.command {
        Command::Rates => commands::rates(&config, !cli.common.omega_c_tau.is_empty())?,
        Command::WignerPeak => commands::wigner_peak_curves(&config)?,
        Command::PnSnapshots => commands::pn_snapshots(&config)?,
        Command::WignerField => commands::wigner_field(&config)?,
        Command::Verify { corrupt_gamma_minus } => {
            print!("{}", commands::verify(&config, corrupt_gamma_minus)?);
            return Ok(());
        }
        Command::PrintConfig => {
            print!("{}", config.to_toml());
            return Ok(());
        }
    };
    for file in artifacts.files {
        log::info!("wrote {}", file.display());
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command;
/// returns the process exit code.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
