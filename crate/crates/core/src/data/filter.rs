//! Steady-state filtering of time-ordered voyage records.

use serde::{Deserialize, Serialize};

use crate::domain::VoyageRecord;
use crate::error::{Error, Result};
use crate::units::{deg_to_rad, heading_difference, knots_to_ms};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterPolicy {
    /// Largest accepted change of speed through water, m/s per minute.
    pub max_acceleration: f64,
    /// Smallest accepted ratio of water depth to mean draft. Only checked
    /// for records that carry a depth.
    pub min_water_depth_ratio: f64,
    /// Largest accepted heading rate, rad per minute.
    pub max_heading_rate: f64,
    pub min_stw: f64,
    /// Upper `H_S` bound of the calm-weather subset used for the calm-water fit.
    pub calm_weather_hs_max: f64,
}

impl Default for FilterPolicy {
    fn default() -> Self {
        Self {
            max_acceleration: knots_to_ms(0.5),
            min_water_depth_ratio: 3.0,
            max_heading_rate: deg_to_rad(3.0),
            min_stw: knots_to_ms(3.0),
            calm_weather_hs_max: 1.0,
        }
    }
}

impl FilterPolicy {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("max_acceleration", self.max_acceleration),
            ("min_water_depth_ratio", self.min_water_depth_ratio),
            ("max_heading_rate", self.max_heading_rate),
            ("min_stw", self.min_stw),
            ("calm_weather_hs_max", self.calm_weather_hs_max),
        ];
        for (name, value) in fields {
            if !(value >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "filter threshold {name} must be >= 0, got {value}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterCounts {
    pub min_speed: usize,
    pub shallow_water: usize,
    pub acceleration: usize,
    pub heading_rate: usize,
}

impl FilterCounts {
    pub fn total(&self) -> usize {
        self.min_speed + self.shallow_water + self.acceleration + self.heading_rate
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterOutcome {
    pub kept: Vec<VoyageRecord>,
    pub counts: FilterCounts,
}

/// Rate of change per minute; simultaneous samples only pass when identical.
fn per_minute(delta: f64, minutes: f64) -> f64 {
    if minutes > 0.0 {
        delta.abs() / minutes
    } else if delta == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Drops records taken while accelerating, turning, crawling or in shallow
/// water. Rates are measured against the previous *kept* record, so a
/// single transient removes one record rather than two and filtering the
/// output again changes nothing.
///
/// Each dropped record is counted under the first failed check, in the
/// order speed, depth, acceleration, heading rate.
pub fn filter_steady_state(records: &[VoyageRecord], p: &FilterPolicy) -> Result<FilterOutcome> {
    p.validate()?;
    if let Some(i) = records
        .windows(2)
        .position(|w| w[1].timestamp < w[0].timestamp)
    {
        return Err(Error::Ordering { row: i + 2 });
    }
    let mut out = FilterOutcome::default();
    for r in records {
        if r.stw < p.min_stw {
            out.counts.min_speed += 1;
            continue;
        }
        if r.water_depth
            .is_some_and(|d| d < p.min_water_depth_ratio * r.mean_draft())
        {
            out.counts.shallow_water += 1;
            continue;
        }
        if let Some(prev) = out.kept.last() {
            let minutes = (r.timestamp - prev.timestamp).num_milliseconds() as f64 / 60_000.0;
            if per_minute(r.stw - prev.stw, minutes) > p.max_acceleration {
                out.counts.acceleration += 1;
                continue;
            }
            if per_minute(heading_difference(prev.heading, r.heading), minutes) > p.max_heading_rate
            {
                out.counts.heading_rate += 1;
                continue;
            }
        }
        out.kept.push(r.clone());
    }
    Ok(out)
}

/// Records with `H_S` at or below the policy's calm-weather bound.
pub fn calm_weather_subset(records: &[VoyageRecord], p: &FilterPolicy) -> Vec<VoyageRecord> {
    records
        .iter()
        .filter(|r| r.environment.sig_wave_height <= p.calm_weather_hs_max)
        .cloned()
        .collect()
}
