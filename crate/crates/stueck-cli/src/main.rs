use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::Value;

use stueck_cli::commands::{self, GlobalOpts};
use stueck_cli::config::{ModelChoice, RunConfig};
use stueck_cli::error::{CliError, Result};
use stueck_cli::output::OutputFormat;
use stueck_cli::selftest;

#[derive(Parser)]
#[command(
    name = "stueck",
    version,
    about = "Signed-metric field evolution, guided trajectories, oscillation phases, \
             mass reconstruction, and relic-cloud sizes"
)]
struct Cli {
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every stochastic component (trajectory sampling).
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Output directory for generated files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured field; write snapshots, an index, and diagnostics.
    Evolve,
    /// Evolve the field and integrate a guided ensemble; write trajectories,
    /// diagnostics, and the equivariance report.
    Trajectories,
    /// Sweep survival probability over baseline or energy for both models.
    Oscillate,
    /// Invert oscillation observables into the signed mass spectrum.
    Masses {
        /// Small squared splitting [eV^2].
        #[arg(long)]
        dm21: Option<f64>,
        /// Large squared splitting [eV^2].
        #[arg(long)]
        dm32: Option<f64>,
        /// Squared tangent of the solar mixing angle.
        #[arg(long)]
        tan2theta: Option<f64>,
        /// Temporal model (prqm doubles both splittings before inversion).
        #[arg(long, value_enum)]
        model: Option<ModelChoice>,
    },
    /// Regenerate the reference mass table (both model columns by default).
    Table1 {
        /// Small squared splitting [eV^2].
        #[arg(long)]
        dm21: Option<f64>,
        /// Large squared splitting [eV^2].
        #[arg(long)]
        dm32: Option<f64>,
        /// Squared tangent of the solar mixing angle.
        #[arg(long)]
        tan2theta: Option<f64>,
        /// Restrict the table to one model column.
        #[arg(long, value_enum)]
        model: Option<ModelChoice>,
    },
    /// Relic-cloud size for one mass, with the LSS comparison.
    Cosmo {
        /// Constituent mass [eV].
        #[arg(long)]
        mass: Option<f64>,
        /// Comparison length [Mpc].
        #[arg(long)]
        lss: Option<f64>,
        /// Relic number density [1/m^3].
        #[arg(long)]
        density: Option<f64>,
        /// Gravitating-mass multiplier (cloud binds (1 + multiplier) x its own relics).
        #[arg(long)]
        multiplier: Option<f64>,
    },
    /// Full chain: observables -> masses -> cloud diameter -> verdict, for
    /// both models.
    Pipeline {
        /// Comparison length [Mpc].
        #[arg(long)]
        lss: Option<f64>,
    },
    /// Run the eight verification criteria; exits nonzero if any fails.
    Selftest,
}

/// Applies `STUECK_THREADS` (a cap on worker threads) before any parallel
/// work runs.
fn configure_threads() -> Result<()> {
    match std::env::var("STUECK_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => Err(CliError::Validation(
            "STUECK_THREADS must be a positive integer (not valid unicode)".into(),
        )),
        Ok(raw) => {
            let n: usize = raw.parse().map_err(|_| {
                CliError::Validation(format!(
                    "STUECK_THREADS must be a positive integer, got {raw:?}"
                ))
            })?;
            if n == 0 {
                return Err(CliError::Validation(
                    "STUECK_THREADS must be at least 1, got 0".into(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Numerical(format!("thread pool setup failed: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<Value> {
    configure_threads()?;
    let cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    let opts = GlobalOpts {
        seed: cli.seed,
        out: cli.out.clone(),
        format: cli.format,
    };
    match cli.command {
        Command::Evolve => commands::cmd_evolve(&cfg, &opts),
        Command::Trajectories => commands::cmd_trajectories(&cfg, &opts),
        Command::Oscillate => commands::cmd_oscillate(&cfg, &opts),
        Command::Masses {
            dm21,
            dm32,
            tan2theta,
            model,
        } => {
            let mut section = cfg.masses.clone();
            if let Some(v) = dm21 {
                section.dm2_21 = v;
            }
            if let Some(v) = dm32 {
                section.dm2_32 = v;
            }
            if let Some(v) = tan2theta {
                section.tan2_theta12 = v;
            }
            if let Some(m) = model {
                section.model = m;
            }
            commands::cmd_masses(&section, &opts)
        }
        Command::Table1 {
            dm21,
            dm32,
            tan2theta,
            model,
        } => {
            let mut section = cfg.masses.clone();
            if let Some(v) = dm21 {
                section.dm2_21 = v;
            }
            if let Some(v) = dm32 {
                section.dm2_32 = v;
            }
            if let Some(v) = tan2theta {
                section.tan2_theta12 = v;
            }
            commands::cmd_table1(&section, model, &opts)
        }
        Command::Cosmo {
            mass,
            lss,
            density,
            multiplier,
        } => {
            let mut section = cfg.cosmo.clone();
            if let Some(v) = mass {
                section.m_nu_ev = v;
            }
            if let Some(v) = lss {
                section.lss_scale_mpc = v;
            }
            if let Some(v) = density {
                section.number_density_per_m3 = v;
            }
            if let Some(v) = multiplier {
                section.mass_multiplier = v;
            }
            commands::cmd_cosmo(&section, &opts)
        }
        Command::Pipeline { lss } => {
            let mut cosmo = cfg.cosmo.clone();
            if let Some(v) = lss {
                cosmo.lss_scale_mpc = v;
            }
            commands::cmd_pipeline(&cfg.masses, &cosmo, &opts)
        }
        Command::Selftest => {
            let outcomes = selftest::run_all();
            for o in &outcomes {
                println!("{}", selftest::format_line(o));
            }
            let failed: Vec<String> = outcomes
                .iter()
                .filter(|o| !o.passed)
                .map(|o| format!("criterion {} ({})", o.id, o.name))
                .collect();
            if failed.is_empty() {
                Ok(serde_json::json!({
                    "schema_version": stueck_cli::output::SCHEMA_VERSION,
                    "command": "selftest",
                    "passed": outcomes.len(),
                    "failed": 0,
                    "outcomes": outcomes,
                }))
            } else {
                Err(CliError::Numerical(format!(
                    "{} of {} criteria failed: {}",
                    failed.len(),
                    outcomes.len(),
                    failed.join(", ")
                )))
            }
        }
    }
}

fn main() {
    // The runtime masks SIGPIPE, which turns a closed consumer
    // (`stueck evolve | head`) into a mid-print panic; restore the default
    // disposition so the process ends quietly instead.
    //
    // SAFETY: installs the no-op default handler before any other thread
    // exists.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(value) => match serde_json::to_string_pretty(&value) {
            Ok(text) => println!("{text}"),
            Err(e) => {
                eprintln!("error: could not render summary: {e}");
                std::process::exit(3);
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
