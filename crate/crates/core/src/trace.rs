//! Simulation output: per-sample stress decomposition, CSV form and summary
//! figures of a force trace.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Regime;

pub const TRACE_HEADER: &str = "t_s,z_i_m,zdot_i_m_per_s,z_m_m,zdot_m_m_per_s,f_e1_Pa,f_e2_Pa,f_s_Pa,f_total_Pa,F_total_N,regime,necked";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub z_i: f64,
    pub zdot_i: f64,
    pub z_m: f64,
    pub zdot_m: f64,
    pub f_e1: f64,
    pub f_e2: f64,
    pub f_s: f64,
    pub f_total: f64,
    /// Total force, N.
    pub force: f64,
    pub regime: Regime,
    /// Necking filter active for this sample.
    pub necked: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceTrace {
    dt: f64,
    samples: Vec<TraceSample>,
}

impl ForceTrace {
    pub fn new(dt: f64, samples: Vec<TraceSample>) -> Self {
        Self { dt, samples }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn forces(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.force).collect()
    }

    /// Largest force while intruding or holding, N.
    pub fn peak_intrusion_force(&self) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.regime == Regime::Intrusion)
            .map(|s| s.force)
            .fold(0.0, f64::max)
    }

    /// Most negative force (suction), N. Zero if the force never goes negative.
    pub fn suction_min(&self) -> f64 {
        self.samples.iter().map(|s| s.force).fold(0.0, f64::min)
    }

    /// Index of the last stationary sample below the surface that precedes
    /// the first withdrawal sample.
    pub fn sustain_end_index(&self) -> Option<usize> {
        let first_up = self
            .samples
            .iter()
            .position(|s| s.regime == Regime::Withdrawal)
            .unwrap_or(self.samples.len());
        self.samples[..first_up]
            .iter()
            .rposition(|s| s.zdot_i == 0.0 && s.z_i > 0.0)
    }

    /// Force at the end of the hold phase, N.
    pub fn steady_sustain_force(&self) -> Option<f64> {
        self.sustain_end_index().map(|i| self.samples[i].force)
    }

    /// Samples at which the yield stress was exceeded, latching necking.
    pub fn necking_onsets(&self) -> Vec<usize> {
        self.samples
            .windows(2)
            .enumerate()
            .filter(|(_, w)| !w[0].necked && w[1].necked)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn necking_time(&self) -> Option<f64> {
        self.necking_onsets().first().map(|&i| self.samples[i].t)
    }

    /// Signed area enclosed by the force–depth path, `∮ F dz` (J),
    /// by the trapezoid rule. Positive when intrusion forces exceed
    /// withdrawal forces.
    pub fn hysteresis_area(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| 0.5 * (w[0].force + w[1].force) * (w[1].z_i - w[0].z_i))
            .sum()
    }

    /// Copy with the force column divided by the peak force magnitude.
    pub fn normalized(&self) -> Self {
        let peak = self
            .samples
            .iter()
            .map(|s| s.force.abs())
            .fold(0.0, f64::max);
        let mut out = self.clone();
        if peak > 0.0 {
            for s in &mut out.samples {
                s.force /= peak;
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 160);
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                s.t,
                s.z_i,
                s.zdot_i,
                s.z_m,
                s.zdot_m,
                s.f_e1,
                s.f_e2,
                s.f_s,
                s.f_total,
                s.force,
                s.regime.code(),
                u8::from(s.necked)
            );
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text, path)
    }

    pub fn from_csv(text: &str, origin: impl AsRef<Path>) -> Result<Self> {
        let origin = origin.as_ref();
        let err = |line: usize, reason: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            reason,
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| err(1, e.to_string()))?;
        if header.iter().collect::<Vec<_>>().join(",") != TRACE_HEADER {
            return Err(err(1, "unexpected trace header".into()));
        }
        let mut samples = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let line = idx + 2;
            let record = record.map_err(|e| err(line, e.to_string()))?;
            if record.len() != 12 {
                return Err(err(
                    line,
                    format!("expected 12 columns, got {}", record.len()),
                ));
            }
            let mut num = [0.0; 10];
            for (i, slot) in num.iter_mut().enumerate() {
                *slot = record[i]
                    .parse()
                    .map_err(|_| err(line, format!("`{}` is not a number", &record[i])))?;
            }
            let regime = Regime::from_code(&record[10])
                .ok_or_else(|| err(line, format!("bad regime `{}`", &record[10])))?;
            let necked = match &record[11] {
                "0" => false,
                "1" => true,
                other => return Err(err(line, format!("bad necked flag `{other}`"))),
            };
            samples.push(TraceSample {
                t: num[0],
                z_i: num[1],
                zdot_i: num[2],
                z_m: num[3],
                zdot_m: num[4],
                f_e1: num[5],
                f_e2: num[6],
                f_s: num[7],
                f_total: num[8],
                force: num[9],
                regime,
                necked,
            });
        }
        let dt = match samples.len() {
            0 | 1 => 0.0,
            n => (samples[n - 1].t - samples[0].t) / (n - 1) as f64,
        };
        Ok(Self { dt, samples })
    }
}
