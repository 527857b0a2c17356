//! Run configuration: JSON document, command-line overrides, defaults.

use std::fs;
use std::path::{Path, PathBuf};

use paritydd_core::oracle::BathSimConfig;
use paritydd_core::spectra::{Mode, TabulatedDensity};
use paritydd_core::{PulseSchedule, QuadratureConfig, SpectralDensity, ThermalSpec};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Ohmic { cutoff: f64 },
    Lorentzian,
    Discrete { modes: Vec<[f64; 2]> },
    Table { path: PathBuf, upper_cutoff: Option<f64> },
}

impl DensitySpec {
    /// `ohmic1 | ohmic5 | lorentzian | discrete | table:<path>`. A bare
    /// `discrete` keeps the modes from `base` if it already names some.
    pub fn parse_flag(flag: &str, base: Option<&DensitySpec>) -> Result<Self, CliError> {
        Ok(match flag {
            "ohmic1" => DensitySpec::Ohmic { cutoff: 1.0 },
            "ohmic5" => DensitySpec::Ohmic { cutoff: 5.0 },
            "lorentzian" => DensitySpec::Lorentzian,
            "discrete" => match base {
                Some(d @ DensitySpec::Discrete { .. }) => d.clone(),
                _ => DensitySpec::Discrete { modes: vec![[1.0, 0.1]] },
            },
            other => match other.strip_prefix("table:") {
                Some(path) if !path.is_empty() => DensitySpec::Table { path: path.into(), upper_cutoff: None },
                _ => return Err(CliError::Config(format!("unknown spectrum '{other}'"))),
            },
        })
    }

    pub fn build(&self) -> Result<SpectralDensity, CliError> {
        Ok(match self {
            DensitySpec::Ohmic { cutoff } => SpectralDensity::ohmic(*cutoff)?,
            DensitySpec::Lorentzian => SpectralDensity::SoftLorentzian,
            DensitySpec::Discrete { modes } => SpectralDensity::discrete(to_modes(modes))?,
            DensitySpec::Table { path, upper_cutoff } => {
                let (omega, values) = read_table(path)?;
                let cutoff = upper_cutoff.unwrap_or(*omega.last().expect("table has rows"));
                SpectralDensity::Tabulated(TabulatedDensity::new(omega, values, cutoff)?)
            }
        })
    }
}

fn to_modes(modes: &[[f64; 2]]) -> Vec<Mode> {
    modes.iter().map(|&[omega, coupling]| Mode { omega, coupling }).collect()
}

/// Two-column `omega,J` CSV; a non-numeric first line is taken as a header.
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_table(&text).map_err(|msg| CliError::Config(format!("{}: {msg}", path.display())))
}

pub fn parse_table(text: &str) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut omega = Vec::new();
    let mut values = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 2 {
            return Err(format!("line {}: expected two columns", index + 1));
        }
        match (cells[0].parse::<f64>(), cells[1].parse::<f64>()) {
            (Ok(w), Ok(j)) => {
                omega.push(w);
                values.push(j);
            }
            _ if index == 0 => continue,
            _ => return Err(format!("line {}: not a number", index + 1)),
        }
    }
    if omega.windows(2).any(|w| !(w[1] > w[0])) {
        return Err("omega must be strictly increasing".into());
    }
    if omega.len() < 2 {
        return Err("need at least two rows".into());
    }
    Ok((omega, values))
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    Finite(f64),
    Named(InfinityTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub enum InfinityTag {
    #[serde(rename = "inf")]
    Inf,
}

impl BetaSpec {
    pub fn parse_flag(flag: &str) -> Result<Self, CliError> {
        if flag.eq_ignore_ascii_case("inf") {
            return Ok(BetaSpec::Named(InfinityTag::Inf));
        }
        flag.parse().map(BetaSpec::Finite).map_err(|_| CliError::Config(format!("invalid beta '{flag}'")))
    }

    pub fn build(self) -> Result<ThermalSpec, CliError> {
        match self {
            BetaSpec::Named(InfinityTag::Inf) => Ok(ThermalSpec::zero_temperature()),
            BetaSpec::Finite(b) if b.is_infinite() && b > 0.0 => Ok(ThermalSpec::zero_temperature()),
            BetaSpec::Finite(b) => Ok(ThermalSpec::with_beta(b)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    UddPair { n: usize, m: usize },
    Fractions {
        #[serde(default)]
        first: Vec<f64>,
        #[serde(default)]
        second: Vec<f64>,
    },
}

impl ScheduleSpec {
    pub fn parse_udd_flag(flag: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = flag.split(',').map(str::trim).collect();
        match parts[..] {
            [n, m] => match (n.parse(), m.parse()) {
                (Ok(n), Ok(m)) => Ok(ScheduleSpec::UddPair { n, m }),
                _ => Err(CliError::Config(format!("invalid --udd '{flag}'"))),
            },
            _ => Err(CliError::Config(format!("--udd expects n,m, got '{flag}'"))),
        }
    }

    pub fn build(&self, total_time: f64) -> Result<PulseSchedule, CliError> {
        Ok(match self {
            ScheduleSpec::UddPair { n: 0, m: 0 } => PulseSchedule::empty(total_time)?,
            ScheduleSpec::UddPair { n, m } => PulseSchedule::udd_pair(*n, *m, total_time)?,
            ScheduleSpec::Fractions { first, second } => PulseSchedule::merge(first, second, total_time)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn parse_flag(flag: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = flag.split(',').map(str::trim).collect();
        let bad = || CliError::Config(format!("--grid expects min,max,count, got '{flag}'"));
        match parts[..] {
            [a, b, c] => Ok(Grid {
                min: a.parse().map_err(|_| bad())?,
                max: b.parse().map_err(|_| bad())?,
                count: c.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 || !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(CliError::Config("grids need count >= 2 and finite min < max".into()));
        }
        Ok(())
    }

    /// Evenly spaced points; the last is exactly `max`.
    pub fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.max } else { self.min + step * k as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOverrides {
    pub relative_tolerance: Option<f64>,
    pub absolute_tolerance: Option<f64>,
    pub max_subdivisions: Option<usize>,
    pub panel_fraction: Option<f64>,
    pub tail_multiplier: Option<f64>,
}

impl QuadratureOverrides {
    pub fn build(&self) -> Result<QuadratureConfig, CliError> {
        let d = QuadratureConfig::default();
        let q = QuadratureConfig {
            relative_tolerance: self.relative_tolerance.unwrap_or(d.relative_tolerance),
            absolute_tolerance: self.absolute_tolerance.unwrap_or(d.absolute_tolerance),
            max_subdivisions: self.max_subdivisions.unwrap_or(d.max_subdivisions),
            panel_fraction: self.panel_fraction.unwrap_or(d.panel_fraction),
            tail_multiplier: self.tail_multiplier.unwrap_or(d.tail_multiplier),
        };
        q.validate()?;
        Ok(q)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub modes: Vec<[f64; 2]>,
    #[serde(default = "default_fock_cutoff")]
    pub fock_cutoff: usize,
}

fn default_fock_cutoff() -> usize {
    24
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec { modes: vec![[1.0, 0.1]], fock_cutoff: default_fock_cutoff() }
    }
}

impl OracleSpec {
    /// `omega,lambda[,cutoff]`.
    pub fn parse_flag(flag: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("--oracle expects omega,lambda[,cutoff], got '{flag}'"));
        let parts: Vec<&str> = flag.split(',').map(str::trim).collect();
        let (w, l, c) = match parts[..] {
            [w, l] => (w, l, None),
            [w, l, c] => (w, l, Some(c)),
            _ => return Err(bad()),
        };
        Ok(OracleSpec {
            modes: vec![[w.parse().map_err(|_| bad())?, l.parse().map_err(|_| bad())?]],
            fock_cutoff: match c {
                Some(c) => c.parse().map_err(|_| bad())?,
                None => default_fock_cutoff(),
            },
        })
    }

    pub fn build(&self, thermal: ThermalSpec) -> Result<BathSimConfig, CliError> {
        Ok(BathSimConfig::new(to_modes(&self.modes), self.fock_cutoff, thermal)?)
    }
}

/// The JSON document accepted by `--config`. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub spectral_density: Option<DensitySpec>,
    pub beta: Option<BetaSpec>,
    pub schedule: Option<ScheduleSpec>,
    pub total_time: Option<f64>,
    pub theta_grid: Option<Grid>,
    pub time_grid: Option<Grid>,
    pub quadrature: QuadratureOverrides,
    pub output: Option<PathBuf>,
    pub kernel_magnitudes: Option<bool>,
    pub oracle: Option<OracleSpec>,
    pub perturb: Option<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let total_time = self.total_time.unwrap_or(1.0);
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(CliError::Config("total_time must be positive".into()));
        }
        let schedule_spec = self.schedule.clone().unwrap_or(ScheduleSpec::UddPair { n: 2, m: 3 });
        let theta_grid = self.theta_grid.unwrap_or(Grid { min: 0.0, max: 20.0, count: 201 });
        let time_grid = self.time_grid.unwrap_or(Grid { min: 0.0, max: total_time, count: 101 });
        theta_grid.validate()?;
        time_grid.validate()?;
        let density_spec = self.spectral_density.clone().unwrap_or(DensitySpec::Ohmic { cutoff: 1.0 });
        let thermal = self.beta.unwrap_or(BetaSpec::Named(InfinityTag::Inf)).build()?;
        Ok(Resolved {
            schedule: schedule_spec.build(total_time)?,
            schedule_spec,
            density: density_spec.build()?,
            thermal,
            total_time,
            theta_grid,
            time_grid,
            quadrature: self.quadrature.build()?,
            output: self.output.clone(),
            kernel_magnitudes: self.kernel_magnitudes.unwrap_or(false),
            oracle: self.oracle.clone(),
            perturb: self.perturb.unwrap_or(0.0),
        })
    }
}

/// A configuration with defaults filled in and every part validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub schedule_spec: ScheduleSpec,
    pub schedule: PulseSchedule,
    pub density: SpectralDensity,
    pub thermal: ThermalSpec,
    pub total_time: f64,
    pub theta_grid: Grid,
    pub time_grid: Grid,
    pub quadrature: QuadratureConfig,
    pub output: Option<PathBuf>,
    pub kernel_magnitudes: bool,
    pub oracle: Option<OracleSpec>,
    pub perturb: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_document() {
        let c = RunConfig::from_json(
            r#"{
                "spectral_density": {"type": "discrete", "modes": [[1.0, 0.1], [2.0, 0.05]]},
                "beta": "inf",
                "schedule": {"udd_pair": {"n": 6, "m": 7}},
                "total_time": 2.0,
                "theta_grid": {"min": 0, "max": 10, "count": 11},
                "quadrature": {"relative_tolerance": 1e-9},
                "kernel_magnitudes": true
            }"#,
        )
        .unwrap();
        let r = c.resolve().unwrap();
        assert_eq!((r.schedule.n(), r.schedule.m()), (6, 7));
        assert!(r.thermal.is_zero_temperature());
        assert_eq!(r.quadrature.relative_tolerance, 1e-9);
        assert_eq!(r.time_grid.max, 2.0);
        assert!(r.kernel_magnitudes);
    }

    #[test]
    fn defaults_and_rejections() {
        let r = RunConfig::default().resolve().unwrap();
        assert_eq!((r.schedule.n(), r.schedule.m()), (2, 3));
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"beta": "hot"}"#).is_err());
        let c = RunConfig::from_json(r#"{"beta": 2.5, "schedule": {"fractions": {"first": [0.5], "second": [0.5]}}}"#).unwrap();
        assert!(matches!(c.resolve(), Err(CliError::Core(_))));
        let c = RunConfig::from_json(r#"{"time_grid": {"min": 1, "max": 0, "count": 5}}"#).unwrap();
        assert!(matches!(c.resolve(), Err(CliError::Config(_))));
    }

    #[test]
    fn flags() {
        assert_eq!(ScheduleSpec::parse_udd_flag("6,8").unwrap(), ScheduleSpec::UddPair { n: 6, m: 8 });
        assert!(ScheduleSpec::parse_udd_flag("6").is_err());
        assert_eq!(Grid::parse_flag("0,1,5").unwrap().points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(BetaSpec::parse_flag("inf").unwrap().build().unwrap().is_zero_temperature());
        assert_eq!(BetaSpec::parse_flag("3").unwrap().build().unwrap().beta(), 3.0);
        assert!(DensitySpec::parse_flag("ohmic7", None).is_err());
        assert_eq!(
            DensitySpec::parse_flag("table:j.csv", None).unwrap(),
            DensitySpec::Table { path: "j.csv".into(), upper_cutoff: None }
        );
    }

    #[test]
    fn table_parsing() {
        let (w, j) = parse_table("omega,J\n0,0\n1,0.5\n2,0.25\n").unwrap();
        assert_eq!(w, vec![0.0, 1.0, 2.0]);
        assert_eq!(j, vec![0.0, 0.5, 0.25]);
        assert!(parse_table("0,1\n0,2\n").is_err());
        assert!(parse_table("0,1\nx,2\n").is_err());
    }
}
