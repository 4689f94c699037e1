//! Reduced-order resistive force model for a rigid foot intruding into and
//! withdrawing from mud.
//!
//! The mud reaction is the sum of a Maxwell visco-elastic element, a
//! nonlinear bulk spring active while the foot moves down or holds still,
//! and a quadratic inertial drag. During withdrawal the mud clings and pulls
//! the foot down until the stress exceeds the yield stress; the neck then
//! breaks and a second-order filter brings the mud velocity to rest.
//!
//! - [`model`]: stateless stress laws.
//! - [`dynamics`]: state stepping and trajectory simulation.
//! - [`trajectory`]: protocol generation and trial files.
//! - [`calibration`]: parameter identification and error metrics.

pub mod calibration;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod params;
pub mod trace;
pub mod trajectory;

pub use dynamics::{simulate, simulate_with, MudState, SimOptions, Stepper};
pub use error::{Error, Result};
pub use model::{Regime, StressComponents};
pub use params::{FitParam, IntruderGeometry, MudParameters, ParameterSet, Units};
pub use trace::{ForceTrace, TraceSample};
pub use trajectory::{generate_protocol, load_trial, ProtocolSpec, Trajectory, TrialRecord};
