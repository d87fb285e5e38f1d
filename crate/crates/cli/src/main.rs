//! `szilard`: run the information-fuelled engine cycle, sweep temperatures,
//! compile gate pulses, or self-check the analytic oracles.
//!
//! Exit codes: 0 success, 1 internal invariant failure, 2 configuration or
//! validation error, 3 pulse compilation failure.

use clap::{Args, Parser, Subcommand};
use cli::config::{self, ExperimentConfig, Overrides};
use cli::{compile_cmd, run, selftest, sweep, CliError, Result};
use std::path::PathBuf;

#[derive(Debug, Args)]
struct CommonArgs {
    /// Experiment config file (TOML); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cycle variant: a, b, c or d.
    #[arg(long)]
    variant: Option<String>,
    /// Execution mode: ideal or pulse.
    #[arg(long)]
    mode: Option<String>,
    /// Molecule file (TOML), needed in pulse mode.
    #[arg(long)]
    molecule: Option<PathBuf>,
    /// Directory of compiled `<gate>.pulse` files, needed in pulse mode.
    #[arg(long)]
    pulses: Option<PathBuf>,
    /// RNG seed for shot noise and Monte Carlo sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path stem; `.json`/`.csv` extensions are appended.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json, csv or both.
    #[arg(long)]
    format: Option<String>,
    /// Enable Monte Carlo error bars with this many samples.
    #[arg(long = "mc-samples")]
    mc_samples: Option<usize>,
    /// Readout shots per observable: `exact` or a positive integer.
    #[arg(long)]
    shots: Option<String>,
}

impl CommonArgs {
    fn overrides(&self, kt: Option<f64>) -> Result<Overrides> {
        let mut o = Overrides { kt, ..Overrides::default() };
        if let Some(v) = &self.variant {
            o.variant = Some(v.parse().map_err(|e: String| CliError::Config(format!("variant: {e}")))?);
        }
        if let Some(m) = &self.mode {
            o.mode = Some(m.parse().map_err(|e: String| CliError::Config(format!("mode: {e}")))?);
        }
        if let Some(f) = &self.format {
            o.format = Some(f.parse().map_err(|e: String| CliError::Config(format!("format: {e}")))?);
        }
        if let Some(s) = &self.shots {
            o.shots = Some(config::parse_shots(s).map_err(CliError::Config)?);
        }
        o.molecule = self.molecule.clone();
        o.pulses = self.pulses.clone();
        o.seed = self.seed;
        o.out = self.out.clone();
        o.mc_samples = self.mc_samples;
        Ok(o)
    }

    fn load(&self, kt: Option<f64>) -> Result<ExperimentConfig> {
        let overrides = self.overrides(kt)?;
        ExperimentConfig::load(self.config.as_deref(), &overrides)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "szilard",
    version,
    about = "Four-qubit information-fuelled engine runner",
    after_help = "Units: energies in peV, angular frequencies in rad/s, times in seconds, \
                  angles in radians, entropies in nats."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one engine cycle and write the energy/entropy report.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Reservoir temperature k_B·T in peV.
        #[arg(long = "kT")]
        kt: Option<f64>,
    },
    /// Run ideal cycles over a list of temperatures into one CSV.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated k_B·T values in peV, e.g. `1.33,2.51,10.91`.
        #[arg(long = "kT")]
        kt_list: String,
    },
    /// Compile cycle gates into pulse files for a molecule.
    Compile {
        /// Molecule file (TOML).
        #[arg(long)]
        molecule: PathBuf,
        /// Output directory for `<gate>.pulse` files and `summary.json`.
        #[arg(long, default_value = "pulses")]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Reservoir temperature, fixes the thermalization angle.
        #[arg(long = "kT", default_value_t = 1.33)]
        kt: f64,
        /// Level-spacing parameter ω, rad/s.
        #[arg(long, default_value_t = 2000.0)]
        omega: f64,
        /// Compile a single gate by label, or `identity` for a zero pulse.
        #[arg(long)]
        gate: Option<String>,
        /// Pulse duration in seconds (default: per-gate setting).
        #[arg(long)]
        duration: Option<f64>,
        /// Number of pulse segments (default: per-gate setting).
        #[arg(long)]
        segments: Option<usize>,
        /// Fidelity goal override.
        #[arg(long)]
        goal: Option<f64>,
    },
    /// Check the analytic oracles and the pinned noise calibration.
    Selftest,
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { common, kt } => {
            let cfg = common.load(kt)?;
            run::cmd_run(&cfg)
        }
        Command::Sweep { common, kt_list } => {
            let cfg = common.load(None)?;
            sweep::cmd_sweep(&cfg, &kt_list)
        }
        Command::Compile {
            molecule,
            out,
            seed,
            kt,
            omega,
            gate,
            duration,
            segments,
            goal,
        } => compile_cmd::cmd_compile(&compile_cmd::CompileArgs {
            molecule,
            out,
            seed,
            kt,
            omega,
            gate,
            duration,
            segments,
            goal,
        }),
        Command::Selftest => selftest::cmd_selftest(),
    }
}

fn main() {
    match real_main() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
