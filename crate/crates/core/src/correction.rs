//! Added wind and wave resistance for a single record, shared by data
//! generation and weather correction so that both use identical physics.

use serde::{Deserialize, Serialize};

use crate::domain::{VesselParticulars, VoyageRecord};
use crate::error::Result;
use crate::waves::{evaluate_theory, ValidityMode, WaveTheory};
use crate::wind::WindSetup;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AddedResistance {
    pub wind: f64,
    pub waves: f64,
    /// False when the wave theory was outside its validity range; `waves`
    /// is then zero.
    pub wave_in_validity: bool,
}

impl AddedResistance {
    pub fn total(&self) -> f64 {
        self.wind + self.waves
    }
}

/// `R_AA + R_AW` for `record`. Outside the theory's validity, strict mode
/// errors and flag mode applies no wave correction.
pub fn added_resistance(
    record: &VoyageRecord,
    v: &VesselParticulars,
    wind: &WindSetup,
    theory: &dyn WaveTheory,
    mode: ValidityMode,
) -> Result<AddedResistance> {
    let env = &record.environment;
    let r_aa = wind.resistance(v, env, record.sog, record.mean_draft());
    let t = evaluate_theory(theory, v, env, record.stw, mode)?;
    Ok(AddedResistance {
        wind: r_aa,
        waves: if t.in_validity { t.value } else { 0.0 },
        wave_in_validity: t.in_validity,
    })
}

/// Power needed to overcome `added` at the record's speed through water.
pub fn added_power(added: &AddedResistance, stw: f64, v: &VesselParticulars) -> f64 {
    added.total() * stw / v.total_efficiency()
}
