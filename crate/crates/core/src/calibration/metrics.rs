use crate::dynamics::{simulate_with, SimOptions};
use crate::error::{Error, Result};
use crate::params::{IntruderGeometry, MudParameters};
use crate::trajectory::TrialRecord;

/// Number of points on the normalized axis of an error profile.
pub const PROFILE_POINTS: usize = 101;

/// Root-mean-square difference of two equally long series.
pub fn rmse(predicted: &[f64], measured: &[f64]) -> Result<f64> {
    if predicted.len() != measured.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: measured.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::InvalidInput("rmse of empty series".into()));
    }
    let sum: f64 = predicted
        .iter()
        .zip(measured)
        .map(|(p, m)| (p - m) * (p - m))
        .sum();
    Ok((sum / predicted.len() as f64).sqrt())
}

/// Prediction error `F_pred - F_meas` across trials on a normalized process
/// axis `s` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    pub s: Vec<f64>,
    pub mean: Vec<f64>,
    /// Population standard deviation across trials.
    pub std: Vec<f64>,
    /// Per-trial RMSE, N, in input order.
    pub trial_rmse: Vec<f64>,
}

impl ErrorProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,mean_error_N,std_error_N\n");
        for ((s, m), d) in self.s.iter().zip(&self.mean).zip(&self.std) {
            out.push_str(&format!("{s},{m},{d}\n"));
        }
        out
    }
}

/// Linear interpolation of `series` at fraction `s` of its length.
fn resample(series: &[f64], s: f64) -> f64 {
    if series.len() == 1 {
        return series[0];
    }
    let pos = s * (series.len() - 1) as f64;
    let i = (pos.floor() as usize).min(series.len() - 2);
    let frac = pos - i as f64;
    series[i] + frac * (series[i + 1] - series[i])
}

/// Simulates every trial, then resamples its error series onto
/// [`PROFILE_POINTS`] evenly spaced points of the normalized axis.
pub fn error_profile(
    trials: &[TrialRecord],
    params: &MudParameters,
    geometry: &IntruderGeometry,
    options: SimOptions,
) -> Result<ErrorProfile> {
    if trials.is_empty() {
        return Err(Error::InvalidInput(
            "error profile needs at least one trial".into(),
        ));
    }
    let mut errors = Vec::with_capacity(trials.len());
    let mut trial_rmse = Vec::with_capacity(trials.len());
    for trial in trials {
        let measured = trial.measured_force()?;
        let predicted = simulate_with(params, geometry, &trial.trajectory, options)?.forces();
        trial_rmse.push(rmse(&predicted, measured)?);
        errors.push(
            predicted
                .iter()
                .zip(measured)
                .map(|(p, m)| p - m)
                .collect::<Vec<_>>(),
        );
    }
    let n = trials.len() as f64;
    let s: Vec<f64> = (0..PROFILE_POINTS)
        .map(|k| k as f64 / (PROFILE_POINTS - 1) as f64)
        .collect();
    let mut mean = Vec::with_capacity(PROFILE_POINTS);
    let mut std = Vec::with_capacity(PROFILE_POINTS);
    for &sk in &s {
        let values: Vec<f64> = errors.iter().map(|e| resample(e, sk)).collect();
        let m = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
        mean.push(m);
        std.push(var.sqrt());
    }
    Ok(ErrorProfile {
        s,
        mean,
        std,
        trial_rmse,
    })
}
