//! Stateless stress laws of the resistive force model.
//!
//! Depth `z_i` is positive below the undisturbed mud surface and velocities
//! are positive downwards, so intrusion has `zdot_i > 0`. All stresses are in
//! Pa and positive when the mud pushes the intruder up.

use std::fmt;

use crate::params::{IntruderGeometry, MudParameters};

/// Motion direction of the intruder, selecting the Maxwell coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Intrusion,
    Withdrawal,
}

impl Regime {
    /// Sign rule with `sign(0) = +1`: a stationary intruder is intruding.
    pub fn from_velocity(zdot_i: f64) -> Self {
        if zdot_i >= 0.0 {
            Regime::Intrusion
        } else {
            Regime::Withdrawal
        }
    }

    /// Like [`Regime::from_velocity`], but speeds within `deadband` count as zero.
    pub fn with_deadband(zdot_i: f64, deadband: f64) -> Self {
        if zdot_i.abs() <= deadband {
            Regime::Intrusion
        } else {
            Regime::from_velocity(zdot_i)
        }
    }

    pub fn code(self) -> char {
        match self {
            Regime::Intrusion => 'I',
            Regime::Withdrawal => 'W',
        }
    }

    pub fn from_code(c: &str) -> Option<Self> {
        match c {
            "I" => Some(Regime::Intrusion),
            "W" => Some(Regime::Withdrawal),
            _ => None,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Direction index `w = (1 - sign(zdot_i)) / 2`: 0 while moving down or
/// holding still, 1 while moving up.
pub fn direction_index(zdot_i: f64) -> f64 {
    0.5 * (1.0 - sign(zdot_i))
}

/// Stress carried by the Maxwell element, `b_j * zdot_m`.
///
/// Before necking this equals `k_j (z_i - z_m)` through the internal force
/// balance; after necking it follows the filtered mud velocity to zero.
pub fn visco_elastic_stress(params: &MudParameters, regime: Regime, zdot_m: f64) -> f64 {
    let (_, b) = params.maxwell(regime);
    b * zdot_m
}

/// Nonlinear bulk spring `alpha (z_i / H)^beta`, zero out of contact.
pub fn bulk_spring_stress(params: &MudParameters, geometry: &IntruderGeometry, z_i: f64) -> f64 {
    if z_i > 0.0 {
        params.alpha * (z_i / geometry.h_char).powf(params.beta)
    } else {
        0.0
    }
}

/// Quadratic inertial drag `sign(zdot_i) lambda rho_m zdot_i^2`.
pub fn inertial_drag_stress(params: &MudParameters, zdot_i: f64) -> f64 {
    sign(zdot_i) * params.lambda_drag * params.rho_m * zdot_i * zdot_i
}

/// Stress decomposition at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StressComponents {
    /// Visco-elastic (Maxwell) stress, Pa.
    pub f_e1: f64,
    /// Bulk spring stress, Pa. Reported even when excluded from the total.
    pub f_e2: f64,
    /// Inertial drag stress, Pa.
    pub f_s: f64,
    /// Resultant stress, Pa.
    pub f_total: f64,
    /// Resultant force on the contact face, N.
    pub force: f64,
}

impl StressComponents {
    /// The all-zero decomposition of a separated intruder.
    pub const SEPARATED: Self = Self {
        f_e1: 0.0,
        f_e2: 0.0,
        f_s: 0.0,
        f_total: 0.0,
        force: 0.0,
    };
}

/// Unified force law: `f = f_e1 + f_s + (1 - w) f_e2` with the Maxwell
/// coefficients of `regime`, and `F = f S`.
pub fn total_stress(
    params: &MudParameters,
    geometry: &IntruderGeometry,
    regime: Regime,
    z_i: f64,
    zdot_i: f64,
    zdot_m: f64,
) -> StressComponents {
    let f_e1 = visco_elastic_stress(params, regime, zdot_m);
    let f_s = inertial_drag_stress(params, zdot_i);
    let w = match regime {
        Regime::Intrusion => 0.0,
        Regime::Withdrawal => 1.0,
    };
    let f_e2 = if w == 0.0 {
        bulk_spring_stress(params, geometry, z_i)
    } else {
        0.0
    };
    let f_total = f_e1 + f_s + (1.0 - w) * f_e2;
    StressComponents {
        f_e1,
        f_e2,
        f_s,
        f_total,
        force: f_total * geometry.contact_area(),
    }
}
