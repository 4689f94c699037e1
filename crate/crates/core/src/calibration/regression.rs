use crate::error::{Error, Result};

/// Smallest exponent a clamped bulk-spring fit may report.
pub const BETA_FLOOR: f64 = 1e-6;

/// Drag scaling factor from sliding data `(zdot, f)` in (m/s, Pa).
///
/// Least-squares slope through the origin of `f` against the signed
/// regressor `sign(zdot) rho_m zdot^2`.
pub fn fit_lambda(samples: &[(f64, f64)], rho_m: f64) -> Result<f64> {
    if !(rho_m.is_finite() && rho_m > 0.0) {
        return Err(Error::InvalidInput(format!(
            "rho_m must be > 0, got {rho_m}"
        )));
    }
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(v, f) in samples {
        if !(v.is_finite() && f.is_finite()) {
            return Err(Error::InvalidInput("non-finite sliding sample".into()));
        }
        let x = v.signum() * rho_m * v * v;
        sxx += x * x;
        sxy += x * f;
    }
    if sxx == 0.0 {
        return Err(Error::Degenerate("all sliding velocities are zero".into()));
    }
    Ok(sxy / sxx)
}

/// Bulk-spring constants identified from steady hold stresses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkSpringFit {
    /// Pa.
    pub alpha: f64,
    pub beta: f64,
    /// The unconstrained slope fell outside (0, 1] and was clamped; `alpha`
    /// was then refit with the clamped exponent.
    pub beta_clamped: bool,
}

/// Fits `f_ss = alpha (D/H)^beta` to `(D, f_ss)` pairs (m, Pa) by linear
/// regression of `ln f_ss` on `ln(D/H)`.
pub fn fit_alpha_beta(points: &[(f64, f64)], h_char: f64) -> Result<BulkSpringFit> {
    let logs = log_points(points, h_char)?;
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate(
            "bulk-spring fit needs at least two distinct depths".into(),
        ));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    if slope > 0.0 && slope <= 1.0 {
        return Ok(BulkSpringFit {
            alpha: (my - slope * mx).exp(),
            beta: slope,
            beta_clamped: false,
        });
    }
    let beta = slope.clamp(BETA_FLOOR, 1.0);
    Ok(BulkSpringFit {
        alpha: alpha_for_beta(&logs, beta),
        beta,
        beta_clamped: true,
    })
}

/// Least-squares `alpha` (in log space) for a known exponent.
pub fn fit_alpha_given_beta(points: &[(f64, f64)], h_char: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "beta must lie in (0, 1], got {beta}"
        )));
    }
    let logs = log_points(points, h_char)?;
    Ok(alpha_for_beta(&logs, beta))
}

fn alpha_for_beta(logs: &[(f64, f64)], beta: f64) -> f64 {
    let n = logs.len() as f64;
    (logs.iter().map(|(x, y)| y - beta * x).sum::<f64>() / n).exp()
}

fn log_points(points: &[(f64, f64)], h_char: f64) -> Result<Vec<(f64, f64)>> {
    if !(h_char.is_finite() && h_char > 0.0) {
        return Err(Error::InvalidInput(format!("H must be > 0, got {h_char}")));
    }
    if points.is_empty() {
        return Err(Error::InvalidInput("no steady-state points".into()));
    }
    points
        .iter()
        .map(|&(d, f)| {
            if !(d.is_finite() && d > 0.0) {
                Err(Error::InvalidInput(format!("depth must be > 0, got {d}")))
            } else if !(f.is_finite() && f > 0.0) {
                Err(Error::InvalidInput(format!(
                    "steady stress must be > 0, got {f}"
                )))
            } else {
                Ok(((d / h_char).ln(), f.ln()))
            }
        })
        .collect()
}
