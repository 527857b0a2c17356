//! Command-line front end: JSON configuration, CSV/JSON writers and the
//! `sequence`, `filters`, `kernel`, `concurrence`, `verify` and `oracle`
//! commands.

pub mod commands;
pub mod config;
pub mod format;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::Output;
use crate::config::{BetaSpec, DensitySpec, Grid, OracleSpec, RunConfig, ScheduleSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] paritydd_core::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Core(_) => "computation",
        }
    }

    /// Single-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}

#[derive(Debug, Parser)]
#[command(name = "paritydd", version, about = "Dynamical decoupling of two qubits in a common bosonic bath")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merged pulse timetable and first-order residual (CSV).
    Sequence(Common),
    /// Filter functions over the theta grid (CSV).
    Filters(Common),
    /// Controlled evolution kernel at the total time (JSON).
    Kernel(Common),
    /// Concurrence trajectory over the time grid (CSV).
    Concurrence(Common),
    /// Identity, series, kernel and oracle checks (JSON); nonzero exit on failure.
    Verify(Common),
    /// Brute-force bath simulation against the analytic kernel (JSON).
    Oracle(Common),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// ohmic1 | ohmic5 | lorentzian | discrete | table:<path>
    #[arg(long)]
    pub spectrum: Option<String>,
    /// Inverse temperature, or `inf`.
    #[arg(long)]
    pub beta: Option<String>,
    /// UDD orders `n,m` for qubits 1 and 2.
    #[arg(long)]
    pub udd: Option<String>,
    /// Total time T.
    #[arg(long = "t")]
    pub total_time: Option<f64>,
    /// `min,max,count`: theta grid for `filters`, time grid for `concurrence`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Add the 16 kernel magnitudes to the concurrence table.
    #[arg(long)]
    pub kernel_magnitudes: bool,
    /// Shift UDD fractions by `eps * d * (1 - d)` in `verify`.
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<f64>,
    /// Oracle bath `omega,lambda[,cutoff]`.
    #[arg(long)]
    pub oracle: Option<String>,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Sequence(c)
            | Command::Filters(c)
            | Command::Kernel(c)
            | Command::Concurrence(c)
            | Command::Verify(c)
            | Command::Oracle(c) => c,
        }
    }
}

/// Apply flags over the file configuration.
pub fn merged_config(command: &Command) -> Result<RunConfig, CliError> {
    let flags = command.common();
    let mut cfg = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &flags.spectrum {
        cfg.spectral_density = Some(DensitySpec::parse_flag(s, cfg.spectral_density.as_ref())?);
    }
    if let Some(b) = &flags.beta {
        cfg.beta = Some(BetaSpec::parse_flag(b)?);
    }
    if let Some(u) = &flags.udd {
        cfg.schedule = Some(ScheduleSpec::parse_udd_flag(u)?);
    }
    if let Some(t) = flags.total_time {
        cfg.total_time = Some(t);
        // A time grid that was never set follows T.
        if cfg.time_grid.is_none() && flags.grid.is_none() {
            cfg.time_grid = Some(Grid { min: 0.0, max: t, count: 101 });
        }
    }
    if let Some(g) = &flags.grid {
        let grid = Grid::parse_flag(g)?;
        match command {
            Command::Concurrence(_) => cfg.time_grid = Some(grid),
            _ => cfg.theta_grid = Some(grid),
        }
    }
    if flags.kernel_magnitudes {
        cfg.kernel_magnitudes = Some(true);
    }
    if let Some(p) = flags.perturb {
        cfg.perturb = Some(p);
    }
    if let Some(o) = &flags.oracle {
        cfg.oracle = Some(OracleSpec::parse_flag(o)?);
    }
    if let Some(out) = &flags.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

/// Run one command and write its output. Returns whether all checks passed.
pub fn run(command: &Command) -> Result<bool, CliError> {
    let resolved = merged_config(command)?.resolve()?;
    let Output { text, passed } = match command {
        Command::Sequence(_) => commands::sequence(&resolved)?,
        Command::Filters(_) => commands::filters(&resolved)?,
        Command::Kernel(_) => commands::kernel(&resolved)?,
        Command::Concurrence(_) => commands::concurrence_table(&resolved)?,
        Command::Verify(_) => commands::verify(&resolved)?,
        Command::Oracle(_) => commands::oracle(&resolved)?,
    };
    match &resolved.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(passed)
}
