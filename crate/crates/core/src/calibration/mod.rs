//! Parameter identification and error metrics.
//!
//! The drag factor and the bulk-spring constants have closed-form regressions
//! of their own; the remaining constants are fitted jointly to whole trials
//! with a bounded multi-start simplex search.

mod fit;
mod metrics;
mod regression;
mod simplex;

pub use fit::{
    fit_parameters, FitConfig, FitResult, DEFAULT_BOUNDS, DEFAULT_MAX_EVALUATIONS, DEFAULT_STARTS,
    DEFAULT_TOLERANCE,
};
pub use metrics::{error_profile, rmse, ErrorProfile, PROFILE_POINTS};
pub use regression::{fit_alpha_beta, fit_alpha_given_beta, fit_lambda, BulkSpringFit, BETA_FLOOR};
