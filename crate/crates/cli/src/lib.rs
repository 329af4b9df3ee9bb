//! `qrep`: scenario runner for the crossed-cavity repeater model.
//!
//! Each subcommand reads a [`config::ScenarioConfig`], runs one analysis from
//! `qrep-core` and writes one table to the output directory.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{parse_config, ConfigError, ScenarioConfig};
use output::{render, Format, Provenance, Table};

#[derive(Debug, Parser)]
#[command(name = "qrep", version, about = "Crossed-cavity quantum repeater calculator")]
pub struct Cli {
    /// Scenario file (`section.key = value unit` per line).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every sampled quantity; overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; overrides `run.out_dir`.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Extra `section.key=value unit` override; may repeat. Flags win over the file.
    #[arg(long = "set", global = true, value_name = "ENTRY")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mode geometry, decay rates, couplings and fiber overlap of both cavities.
    CavityDesign,
    /// Cascade emission: flux curves, success probability, width sweep, multi-photon events.
    Cascade {
        #[command(subcommand)]
        what: CascadeCmd,
        #[command(flatten)]
        flags: CascadeFlags,
    },
    /// Two-photon interference contrast from sampled emission times.
    Contrast {
        /// Trajectories per pulse width.
        #[arg(long)]
        n_traj: Option<u64>,
    },
    /// Fidelity of the post-selected herald polarisation state.
    HeraldFidelity,
    /// Chain rates and storage times.
    Repeater {
        #[command(subcommand)]
        what: RepeaterCmd,
        #[command(flatten)]
        flags: RepeaterFlags,
    },
    /// Secret-fraction analysis, including purification.
    Keyrate {
        #[command(subcommand)]
        what: KeyrateCmd,
        /// Interference contrast of the elementary links.
        #[arg(long, global = true)]
        contrast: Option<f64>,
    },
    /// Print the default configuration file.
    DefaultConfig,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CascadeCmd {
    /// Output photon flux of both cavities from the master equation.
    Flux,
    /// Success probability and loss budget from trajectories.
    Pht,
    /// Success probability over `cascade.sweep_fwhm`.
    Sweep,
    /// Heralded events with more than one telecom photon (worst-case recycling).
    Multiphoton,
}

#[derive(Debug, Args)]
pub struct CascadeFlags {
    /// Trajectories per pulse width.
    #[arg(long, global = true)]
    pub n_traj: Option<u64>,
    /// Pulse FWHM in ns.
    #[arg(long, global = true)]
    pub fwhm: Option<f64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum RepeaterCmd {
    /// Entangled-pair rate against total distance.
    Rate,
    /// Mean memory storage time against total distance.
    Storage,
}

#[derive(Debug, Args)]
pub struct RepeaterFlags {
    /// Comma-separated link counts, e.g. `1,2,4`.
    #[arg(long, global = true)]
    pub links: Option<String>,
    /// Comma-separated strategies (`restart`, `keep`).
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// Monte Carlo runs per point.
    #[arg(long, global = true)]
    pub runs: Option<u64>,
    /// Sample the restart strategy instead of using its closed form.
    #[arg(long, global = true)]
    pub mc: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum KeyrateCmd {
    /// Error rates and secret fraction over BSM fidelity.
    Table,
    /// BSM fidelity needed for each target secret fraction.
    Threshold,
    /// Gate-error and contrast thresholds for one purification round.
    Purification,
}

/// Failure of one invocation, with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error")]
    Config(Vec<ConfigError>),
    #[error("numeric failure: {0}")]
    Numeric(qrep_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(vec![ConfigError { line: None, key: None, message: message.into() }])
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Machine-readable record for stderr.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Config(errs) => json!({ "error": "config", "exit_code": 2, "details": errs }),
            CliError::Numeric(e) => json!({ "error": "numeric", "exit_code": 3, "message": e.to_string() }),
            CliError::Io(m) => json!({ "error": "io", "exit_code": 1, "message": m }),
        }
    }
}

impl From<qrep_core::Error> for CliError {
    fn from(e: qrep_core::Error) -> Self {
        use qrep_core::Error as E;
        match e {
            // bad inputs that only the model can detect
            E::InvalidParameter { .. } | E::UnstableResonator { .. } | E::TooFewSamples { .. } => {
                CliError::config(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}

/// Flag overrides as config entries, in the order they are applied.
fn flag_entries(cli: &Cli) -> Vec<String> {
    let mut v = Vec::new();
    if let Some(s) = cli.seed {
        v.push(format!("run.seed = {s}"));
    }
    if let Some(d) = &cli.out_dir {
        v.push(format!("run.out_dir = {}", d.display()));
    }
    match &cli.command {
        Command::Cascade { flags, .. } => {
            if let Some(n) = flags.n_traj {
                v.push(format!("cascade.n_traj = {n}"));
            }
            if let Some(f) = flags.fwhm {
                v.push(format!("pulse.fwhm = {f} ns"));
            }
        }
        Command::Contrast { n_traj: Some(n) } => v.push(format!("contrast.n_traj = {n}")),
        Command::Repeater { flags, .. } => {
            if let Some(l) = &flags.links {
                v.push(format!("repeater.links = {l}"));
            }
            if let Some(s) = &flags.strategy {
                v.push(format!("repeater.strategies = {s}"));
            }
            if let Some(r) = flags.runs {
                v.push(format!("repeater.runs = {r}"));
            }
            if flags.mc {
                v.push("repeater.mc = true".into());
            }
        }
        Command::Keyrate { contrast: Some(c), .. } => v.push(format!("keyrate.contrast = {c}")),
        _ => {}
    }
    // `--set` entries are the most specific and go last
    v.extend(cli.overrides.iter().cloned());
    v
}

/// Config file (or defaults) plus every flag override.
pub fn resolve_config(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text).map_err(CliError::Config)?
        }
        None => ScenarioConfig::default(),
    };
    let mut errs: Vec<ConfigError> = flag_entries(cli).iter().filter_map(|e| cfg.set(e).err()).collect();
    if let Err(message) = cfg.check_consistency() {
        errs.push(ConfigError { line: None, key: None, message });
    }
    if !errs.is_empty() {
        return Err(CliError::Config(errs));
    }
    Ok(cfg)
}

fn command_name(c: &Command) -> String {
    match c {
        Command::CavityDesign => "cavity-design".into(),
        Command::Cascade { what, .. } => format!("cascade {}", format!("{what:?}").to_lowercase()),
        Command::Contrast { .. } => "contrast".into(),
        Command::HeraldFidelity => "herald-fidelity".into(),
        Command::Repeater { what, .. } => format!("repeater {}", format!("{what:?}").to_lowercase()),
        Command::Keyrate { what, .. } => format!("keyrate {}", format!("{what:?}").to_lowercase()),
        Command::DefaultConfig => "default-config".into(),
    }
}

/// Computes the table for a subcommand without writing anything.
pub fn run_scenario(cfg: &ScenarioConfig, command: &Command) -> Result<Table, CliError> {
    use commands as c;
    match command {
        Command::CavityDesign => c::cavity(cfg),
        Command::Cascade { what, .. } => match what {
            CascadeCmd::Flux => c::cascade_flux(cfg),
            CascadeCmd::Pht => c::cascade_pht(cfg),
            CascadeCmd::Sweep => c::cascade_sweep(cfg),
            CascadeCmd::Multiphoton => c::cascade_multiphoton(cfg),
        },
        Command::Contrast { .. } => c::contrast(cfg),
        Command::HeraldFidelity => c::herald(cfg),
        Command::Repeater { what, .. } => match what {
            RepeaterCmd::Rate => c::repeater_rate(cfg),
            RepeaterCmd::Storage => c::repeater_storage(cfg),
        },
        Command::Keyrate { what, .. } => match what {
            KeyrateCmd::Table => c::keyrate_table(cfg),
            KeyrateCmd::Threshold => c::keyrate_threshold(cfg),
            KeyrateCmd::Purification => c::keyrate_purification(cfg),
        },
        Command::DefaultConfig => unreachable!("handled before dispatch"),
    }
}

/// Runs one invocation and returns the path written.
pub fn run(cli: &Cli) -> Result<Option<PathBuf>, CliError> {
    if let Command::DefaultConfig = cli.command {
        print!("{}", config::default_config_text());
        return Ok(None);
    }
    let cfg = resolve_config(cli)?;
    let table = run_scenario(&cfg, &cli.command)?;
    let text = render(&table, &Provenance { command: command_name(&cli.command), config: &cfg }, cli.format);
    let dir = PathBuf::from(&cfg.words("run.out_dir")[0]);
    let path = dir.join(format!("{}.{}", table.name, cli.format.extension()));
    write_atomic(&dir, &path, &text)?;
    Ok(Some(path))
}

fn write_atomic(dir: &Path, path: &Path, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, text).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}
