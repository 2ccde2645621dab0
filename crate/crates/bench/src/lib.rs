//! Shared fixtures for the benchmarks: the bundled cycle family and a few
//! representative generators, so every bench exercises the same regime the
//! sweeps run in.

use otto_core::expm::M5;
use otto_core::segment::{isochore_generator, IsochoreSpec};
use otto_core::CycleParams;

pub fn family() -> CycleParams {
    CycleParams::paper_family()
}

/// Cold bath-contact generator scaled by its stroke duration: the matrix
/// the exponential route sees most often.
pub fn cold_contact_generator() -> M5 {
    let params = family();
    let spec = IsochoreSpec {
        omega: params.omega_cold,
        j_coupling: params.j_coupling,
        temperature: params.t_cold,
        k_down: params.k_down_cold,
        duration: params.durations()[0],
    };
    isochore_generator(&spec) * spec.duration
}
