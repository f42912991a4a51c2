//! Vessel, environment and observation types shared across the crate, plus
//! the resistance/power conversion that links them.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{wrap_two_pi, AIR_DENSITY, SEA_WATER_DENSITY};

/// Propulsive efficiency used when a vessel file does not provide one.
pub const DEFAULT_PROPULSIVE_EFFICIENCY: f64 = 0.7;
/// Shaft plus gearbox efficiency used when a vessel file does not provide one.
pub const DEFAULT_MECHANICAL_EFFICIENCY: f64 = 0.99;

fn default_propulsive_efficiency() -> f64 {
    DEFAULT_PROPULSIVE_EFFICIENCY
}

fn default_mechanical_efficiency() -> f64 {
    DEFAULT_MECHANICAL_EFFICIENCY
}

/// Main particulars of a ship. Lengths in meters, areas in m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VesselParticulars {
    pub length_overall: f64,
    pub length_pp: f64,
    pub beam: f64,
    pub block_coefficient: f64,
    /// Length of the bow on the waterline.
    pub bow_waterline_length: f64,
    pub transverse_area_laden: f64,
    pub transverse_area_ballast: f64,
    #[serde(default = "default_propulsive_efficiency")]
    pub propulsive_efficiency: f64,
    #[serde(default = "default_mechanical_efficiency")]
    pub mechanical_efficiency: f64,
}

impl VesselParticulars {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("length_overall", self.length_overall),
            ("length_pp", self.length_pp),
            ("beam", self.beam),
            ("bow_waterline_length", self.bow_waterline_length),
            ("transverse_area_laden", self.transverse_area_laden),
            ("transverse_area_ballast", self.transverse_area_ballast),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParticulars(format!(
                    "{name} must be > 0, got {value}"
                )));
            }
        }
        if self.length_pp > self.length_overall {
            return Err(Error::InvalidParticulars(format!(
                "length_pp ({}) exceeds length_overall ({})",
                self.length_pp, self.length_overall
            )));
        }
        if !(self.block_coefficient > 0.0 && self.block_coefficient < 1.0) {
            return Err(Error::InvalidParticulars(format!(
                "block_coefficient must lie in (0, 1), got {}",
                self.block_coefficient
            )));
        }
        self.check_efficiencies()
    }

    fn check_efficiencies(&self) -> Result<()> {
        for (name, value) in [
            ("propulsive_efficiency", self.propulsive_efficiency),
            ("mechanical_efficiency", self.mechanical_efficiency),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::InvalidParticulars(format!(
                    "{name} must lie in (0, 1], got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Combined efficiency `η_D · η_M`.
    pub fn total_efficiency(&self) -> f64 {
        self.propulsive_efficiency * self.mechanical_efficiency
    }

    pub fn loading_condition(
        &self,
        mean_draft: f64,
        ballast_draft_threshold: f64,
    ) -> LoadingCondition {
        LoadingCondition::from_draft(mean_draft, ballast_draft_threshold)
    }

    /// Transverse projected area above the waterline for the loading
    /// condition implied by `mean_draft`.
    pub fn transverse_area(&self, mean_draft: f64, ballast_draft_threshold: f64) -> f64 {
        match self.loading_condition(mean_draft, ballast_draft_threshold) {
            LoadingCondition::Laden => self.transverse_area_laden,
            LoadingCondition::Ballast => self.transverse_area_ballast,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadingCondition {
    Laden,
    Ballast,
}

impl LoadingCondition {
    /// Drafts strictly below the threshold count as ballast.
    pub fn from_draft(mean_draft: f64, ballast_draft_threshold: f64) -> Self {
        if mean_draft < ballast_draft_threshold {
            LoadingCondition::Ballast
        } else {
            LoadingCondition::Laden
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LoadingCondition::Laden => "laden",
            LoadingCondition::Ballast => "ballast",
        }
    }
}

/// Weather seen from the ship. Directions are relative to the bow: 0 means
/// wind or waves coming from straight ahead, π means from astern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentState {
    pub wind_speed_rel: f64,
    pub wind_dir_rel: f64,
    pub sig_wave_height: f64,
    pub wave_peak_period: f64,
    pub wave_dir_rel: f64,
    pub water_density: f64,
    pub air_density: f64,
}

impl EnvironmentState {
    /// Builds a state with standard densities, wrapping both directions into `[0, 2π)`.
    pub fn new(
        wind_speed_rel: f64,
        wind_dir_rel: f64,
        sig_wave_height: f64,
        wave_peak_period: f64,
        wave_dir_rel: f64,
    ) -> Self {
        Self {
            wind_speed_rel,
            wind_dir_rel: wrap_two_pi(wind_dir_rel),
            sig_wave_height,
            wave_peak_period,
            wave_dir_rel: wrap_two_pi(wave_dir_rel),
            water_density: SEA_WATER_DENSITY,
            air_density: AIR_DENSITY,
        }
    }

    /// No wind, no waves.
    pub fn calm() -> Self {
        Self::new(0.0, 0.0, 0.0, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wind_speed_rel >= 0.0) {
            return Err(Error::Domain(format!(
                "wind_speed_rel < 0 ({})",
                self.wind_speed_rel
            )));
        }
        if !(self.sig_wave_height >= 0.0) {
            return Err(Error::Domain(format!(
                "sig_wave_height < 0 ({})",
                self.sig_wave_height
            )));
        }
        if !(self.wave_peak_period > 0.0) {
            return Err(Error::Domain(format!(
                "wave_peak_period <= 0 ({})",
                self.wave_peak_period
            )));
        }
        if !(self.water_density > 0.0 && self.air_density > 0.0) {
            return Err(Error::Domain("densities must be > 0".into()));
        }
        Ok(())
    }
}

/// One steady-state observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoyageRecord {
    pub timestamp: DateTime<Utc>,
    /// Speed through water, m/s.
    pub stw: f64,
    /// Speed over ground, m/s.
    pub sog: f64,
    pub heading: f64,
    pub draft_aft: f64,
    pub draft_fwd: f64,
    /// Tonnes.
    pub displacement: f64,
    pub environment: EnvironmentState,
    /// Watts.
    pub brake_power: f64,
    /// Water depth below the keel reference, when the data source provides one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub water_depth: Option<f64>,
}

impl VoyageRecord {
    pub fn mean_draft(&self) -> f64 {
        0.5 * (self.draft_aft + self.draft_fwd)
    }
}

/// Resistance split into the contributions this crate models, in newtons.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ResistanceBreakdown {
    pub calm: f64,
    pub wind: f64,
    pub waves: f64,
}

impl ResistanceBreakdown {
    pub fn new(calm: f64, wind: f64, waves: f64) -> Self {
        Self { calm, wind, waves }
    }

    pub fn total(&self) -> f64 {
        total_resistance(self)
    }
}

pub fn total_resistance(b: &ResistanceBreakdown) -> f64 {
    b.calm + b.wind + b.waves
}

/// Brake power in watts delivered to overcome `r_total` at speed `stw`.
pub fn brake_power(r_total: f64, stw: f64, v: &VesselParticulars) -> Result<f64> {
    v.check_efficiencies()?;
    if !(stw >= 0.0) {
        return Err(Error::Domain(format!("stw must be >= 0, got {stw}")));
    }
    Ok(r_total * stw / v.total_efficiency())
}

/// Inverse of [`brake_power`].
pub fn power_to_resistance(power: f64, stw: f64, v: &VesselParticulars) -> Result<f64> {
    v.check_efficiencies()?;
    if stw == 0.0 {
        return Err(Error::DegenerateSpeed(
            "cannot convert power to resistance at stw = 0".into(),
        ));
    }
    if !(stw > 0.0) {
        return Err(Error::Domain(format!("stw must be > 0, got {stw}")));
    }
    Ok(power * v.total_efficiency() / stw)
}
