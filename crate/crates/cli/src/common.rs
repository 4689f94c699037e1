use std::path::{Path, PathBuf};

use clap::Args as ClapArgs;
use mudforce::dynamics::{SimOptions, DEFAULT_DT};
use mudforce::params::preset;
use mudforce::{ParameterSet, ProtocolSpec, Units};

use crate::error::CliError;

#[derive(Debug, ClapArgs)]
pub struct Global {
    /// Sample period of generated protocols, s.
    #[arg(long, global = true, default_value_t = DEFAULT_DT)]
    pub dt: f64,

    /// Seed for every random choice (multi-start, synthetic noise).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Unit system of written parameter values: si, or paper (MPa, kPa).
    #[arg(long, global = true, default_value = "si", value_parser = parse_units)]
    pub units: Units,
}

fn parse_units(s: &str) -> Result<Units, String> {
    s.parse().map_err(|e: mudforce::Error| e.to_string())
}

/// Where the model constants come from.
#[derive(Debug, ClapArgs)]
#[group(required = false, multiple = false)]
pub struct ParamSource {
    /// Shipped parameter preset (W15, W20, W25, W30, W35).
    #[arg(long)]
    pub preset: Option<String>,

    /// Parameter file.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

impl ParamSource {
    pub fn load(&self) -> Result<Option<ParameterSet>, CliError> {
        Ok(match (&self.preset, &self.params) {
            (Some(name), _) => Some(preset(name)?),
            (None, Some(path)) => Some(ParameterSet::load(path)?),
            (None, None) => None,
        })
    }

    pub fn require(&self) -> Result<ParameterSet, CliError> {
        self.load()?
            .ok_or_else(|| CliError::Usage("one of --preset or --params is required".into()))
    }
}

#[derive(Debug, ClapArgs)]
pub struct ProtocolArgs {
    /// Intrusion speed, m/s.
    #[arg(long, default_value_t = 0.01)]
    pub v_down: f64,

    /// Intrusion depth, m.
    #[arg(long, default_value_t = 0.05)]
    pub depth: f64,

    /// Hold duration at depth, s.
    #[arg(long, default_value_t = 6.0)]
    pub sustain: f64,

    /// Withdrawal speed, m/s.
    #[arg(long, default_value_t = 0.01)]
    pub v_up: f64,

    /// Final depth (at or above the surface, <= 0), m.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub z_end: f64,
}

impl ProtocolArgs {
    pub fn spec(&self, dt: f64) -> ProtocolSpec {
        ProtocolSpec {
            v_down: self.v_down,
            depth: self.depth,
            t_sustain: self.sustain,
            v_up: self.v_up,
            dt,
            z_end: self.z_end,
        }
    }
}

#[derive(Debug, ClapArgs)]
pub struct SimArgs {
    /// Treat intruder speeds up to this magnitude (m/s) as stationary when
    /// selecting the regime.
    #[arg(long)]
    pub deadband: Option<f64>,
}

impl SimArgs {
    pub fn options(&self) -> Result<SimOptions, CliError> {
        if let Some(eps) = self.deadband {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--deadband must be >= 0, got {eps}"
                )));
            }
        }
        Ok(SimOptions {
            deadband: self.deadband,
        })
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Label of a trial: its id if present, else the file stem.
pub fn trial_label(path: &Path, id: Option<&str>) -> String {
    id.map(str::to_owned).unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    })
}
