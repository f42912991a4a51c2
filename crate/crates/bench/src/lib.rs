//! Shared inputs for the criterion benches.

use std::sync::Arc;

use speedpower_core::data::{generate, SyntheticScenario};
use speedpower_core::units::knots_to_ms;
use speedpower_core::waves::{ParametricResponse, SpectralTheory, WaveTheory};
use speedpower_core::{EnvironmentState, VesselParticulars, VoyageRecord};

pub fn vessel() -> VesselParticulars {
    speedpower_core::data::reference_vessel()
}

/// Moderate head-quartering sea used by every wave bench.
pub fn sea_state() -> EnvironmentState {
    EnvironmentState::new(10.0, 0.3, 2.5, 8.0, 0.5)
}

pub fn stw() -> f64 {
    knots_to_ms(12.0)
}

pub fn spectral_theory() -> Arc<dyn WaveTheory> {
    Arc::new(SpectralTheory::from_parametric(
        ParametricResponse::example(),
    ))
}

pub fn records(n: usize) -> Vec<VoyageRecord> {
    generate(&SyntheticScenario::reference(n, 11)).expect("reference scenario generates")
}
