use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mudforce::calibration::{fit_parameters, FitConfig};
use mudforce::params::preset;
use mudforce::{
    generate_protocol, load_trial, simulate_with, FitParam, ForceTrace, ParameterSet, ProtocolSpec,
    Units,
};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::Value;

use crate::common::{write_file, Global, SimArgs};
use crate::error::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Sweep specification (JSON).
    spec: PathBuf,

    /// Long-format CSV to write: one row per axis value and metric.
    #[arg(short, long)]
    output: PathBuf,

    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Axis {
    WaterContent,
    Velocity,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolFields {
    v_down: Option<f64>,
    depth: Option<f64>,
    t_sustain: Option<f64>,
    v_up: Option<f64>,
    z_end: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSpec {
    axis: Axis,
    /// Preset names or parameter files (water content), or speeds in m/s
    /// (velocity).
    values: Vec<Value>,
    /// Parameter set of a velocity sweep: preset name or parameter file.
    #[serde(default)]
    parameters: Option<String>,
    #[serde(default)]
    protocol: ProtocolFields,
    metrics: Vec<String>,
    /// Trials to calibrate from at each axis value, keyed by the value as
    /// written in `values`. Fitted constants then replace the parameter set
    /// at that point.
    #[serde(default)]
    trials: BTreeMap<String, Vec<PathBuf>>,
}

#[derive(Debug, Clone, Copy)]
enum Metric {
    PeakForce,
    SuctionMin,
    SteadySustainForce,
    NeckingTime,
    HysteresisArea,
    Param(FitParam),
}

impl FromStr for Metric {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "peak_force" => Metric::PeakForce,
            "suction_min" => Metric::SuctionMin,
            "steady_sustain_force" => Metric::SteadySustainForce,
            "necking_time" => Metric::NeckingTime,
            "hysteresis_area" => Metric::HysteresisArea,
            other => Metric::Param(
                FitParam::from_str(other)
                    .map_err(|_| CliError::Usage(format!("unknown metric `{other}`")))?,
            ),
        })
    }
}

impl Metric {
    fn column(self, units: Units) -> String {
        match self {
            Metric::PeakForce => "peak_force_N".into(),
            Metric::SuctionMin => "suction_min_N".into(),
            Metric::SteadySustainForce => "steady_sustain_force_N".into(),
            Metric::NeckingTime => "necking_time_s".into(),
            Metric::HysteresisArea => "hysteresis_area_J".into(),
            Metric::Param(p) => p.key(units).into(),
        }
    }

    fn value(self, set: &ParameterSet, trace: &ForceTrace, units: Units) -> Option<f64> {
        match self {
            Metric::PeakForce => Some(trace.peak_intrusion_force()),
            Metric::SuctionMin => Some(trace.suction_min()),
            Metric::SteadySustainForce => trace.steady_sustain_force(),
            Metric::NeckingTime => trace.necking_time(),
            Metric::HysteresisArea => Some(trace.hysteresis_area()),
            Metric::Param(p) => Some(p.from_si(set.params.get(p), units)),
        }
    }
}

struct Point {
    label: String,
    axis_value: f64,
    set: ParameterSet,
    spec: ProtocolSpec,
    trials: Vec<PathBuf>,
}

fn load_set(name: &str, base_dir: &Path) -> Result<ParameterSet, CliError> {
    match preset(name) {
        Ok(set) => Ok(set),
        Err(_) => Ok(ParameterSet::load(base_dir.join(name))?),
    }
}

fn value_label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn points(spec: &SweepSpec, dt: f64, base_dir: &Path) -> Result<Vec<Point>, CliError> {
    if spec.values.is_empty() {
        return Err(CliError::Usage("sweep axis has no values".into()));
    }
    let c = ProtocolSpec::canonical();
    let p = &spec.protocol;
    let protocol = ProtocolSpec {
        v_down: p.v_down.unwrap_or(c.v_down),
        depth: p.depth.unwrap_or(c.depth),
        t_sustain: p.t_sustain.unwrap_or(c.t_sustain),
        v_up: p.v_up.unwrap_or(c.v_up),
        dt,
        z_end: p.z_end.unwrap_or(c.z_end),
    };
    for key in spec.trials.keys() {
        if !spec.values.iter().any(|v| value_label(v) == *key) {
            return Err(CliError::Usage(format!(
                "trials given for `{key}`, which is not an axis value"
            )));
        }
    }
    let trials_for = |label: &str| -> Vec<PathBuf> {
        spec.trials
            .get(label)
            .map(|v| v.iter().map(|p| base_dir.join(p)).collect())
            .unwrap_or_default()
    };
    spec.values
        .iter()
        .map(|v| {
            let label = value_label(v);
            match spec.axis {
                Axis::WaterContent => {
                    if spec.parameters.is_some() {
                        return Err(CliError::Usage(
                            "`parameters` applies to velocity sweeps only".into(),
                        ));
                    }
                    let name = v.as_str().ok_or_else(|| {
                        CliError::Usage(format!("water-content axis value {v} is not a name"))
                    })?;
                    let set = load_set(name, base_dir)?;
                    Ok(Point {
                        axis_value: set.params.water_content,
                        trials: trials_for(&label),
                        label,
                        set,
                        spec: protocol,
                    })
                }
                Axis::Velocity => {
                    let speed = v.as_f64().ok_or_else(|| {
                        CliError::Usage(format!("velocity axis value {v} is not a number"))
                    })?;
                    let name = spec.parameters.as_deref().ok_or_else(|| {
                        CliError::Usage("velocity sweeps need `parameters`".into())
                    })?;
                    Ok(Point {
                        axis_value: speed,
                        trials: trials_for(&label),
                        label,
                        set: load_set(name, base_dir)?,
                        spec: ProtocolSpec {
                            v_down: speed,
                            v_up: speed,
                            ..protocol
                        },
                    })
                }
            }
        })
        .collect()
}

fn evaluate(
    point: &Point,
    g: &Global,
    sim: mudforce::SimOptions,
) -> Result<(ParameterSet, ForceTrace), CliError> {
    let mut set = point.set.clone();
    if !point.trials.is_empty() {
        let trials = point
            .trials
            .iter()
            .map(load_trial)
            .collect::<Result<Vec<_>, _>>()?;
        let config = FitConfig {
            seed: g.seed,
            sim,
            ..FitConfig::default()
        };
        let fit = fit_parameters(&trials, &set.params, &set.geometry, &config)?;
        set.params = fit.params;
        set.reported_rmse = Some(fit.objective);
    }
    let trajectory = generate_protocol(&point.spec)?;
    let trace = simulate_with(&set.params, &set.geometry, &trajectory, sim)?;
    Ok((set, trace))
}

pub fn run(g: &Global, args: Args) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.spec).map_err(|e| mudforce::Error::Io {
        path: args.spec.clone(),
        source: e,
    })?;
    let spec: SweepSpec = serde_json::from_str(&text).map_err(mudforce::Error::from)?;
    let metrics = spec
        .metrics
        .iter()
        .map(|m| m.parse())
        .collect::<Result<Vec<Metric>, _>>()?;
    if metrics.is_empty() {
        return Err(CliError::Usage("sweep lists no metrics".into()));
    }
    let base_dir = args.spec.parent().unwrap_or(Path::new("."));
    let points = points(&spec, g.dt, base_dir)?;
    let sim = args.sim.options()?;

    let results: Vec<_> = points.par_iter().map(|p| evaluate(p, g, sim)).collect();

    let axis = match spec.axis {
        Axis::WaterContent => "water_content",
        Axis::Velocity => "velocity_m_per_s",
    };
    let mut out = String::from("axis,label,axis_value,metric,value\n");
    for (point, result) in points.iter().zip(results) {
        let (set, trace) = result?;
        for m in &metrics {
            let value = m
                .value(&set, &trace, g.units)
                .map(|v| v.to_string())
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{axis},{},{},{},{value}",
                point.label,
                point.axis_value,
                m.column(g.units)
            );
        }
    }
    write_file(&args.output, &out)?;
    println!(
        "wrote {} rows to {}",
        points.len() * metrics.len(),
        args.output.display()
    );
    Ok(())
}
