//! Shared fixtures for the benchmarks.

use mudforce::{
    generate_protocol, params, IntruderGeometry, MudParameters, ProtocolSpec, Trajectory,
};

/// Parameters and geometry of a shipped preset.
pub fn preset(name: &str) -> (MudParameters, IntruderGeometry) {
    let set = params::preset(name).expect("shipped preset");
    (set.params, set.geometry)
}

pub fn canonical_trajectory() -> Trajectory {
    generate_protocol(&ProtocolSpec::canonical()).expect("canonical protocol is valid")
}
