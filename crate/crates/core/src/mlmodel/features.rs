use serde::{Deserialize, Serialize};

use crate::domain::VoyageRecord;

pub const FEATURE_COUNT: usize = 6;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "stw",
    "draft_avg",
    "wind_prod_long",
    "wind_prod_trans",
    "wave_power_long",
    "wave_power_trans",
];

/// Network inputs. Wind products are `V_wrel²` split by the relative
/// direction (m²/s²); wave terms are `H_S² T_p` split the same way (m²·s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub stw: f64,
    pub draft_avg: f64,
    pub wind_prod_long: f64,
    pub wind_prod_trans: f64,
    pub wave_power_long: f64,
    pub wave_power_trans: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.stw,
            self.draft_avg,
            self.wind_prod_long,
            self.wind_prod_trans,
            self.wave_power_long,
            self.wave_power_trans,
        ]
    }

    pub fn from_array(a: [f64; FEATURE_COUNT]) -> Self {
        Self {
            stw: a[0],
            draft_avg: a[1],
            wind_prod_long: a[2],
            wind_prod_trans: a[3],
            wave_power_long: a[4],
            wave_power_trans: a[5],
        }
    }
}

pub fn engineer_features(r: &VoyageRecord) -> FeatureVector {
    let env = &r.environment;
    let wind = env.wind_speed_rel * env.wind_speed_rel;
    let wave = env.sig_wave_height * env.sig_wave_height * env.wave_peak_period;
    FeatureVector {
        stw: r.stw,
        draft_avg: r.mean_draft(),
        wind_prod_long: wind * env.wind_dir_rel.cos(),
        wind_prod_trans: wind * env.wind_dir_rel.sin(),
        wave_power_long: wave * env.wave_dir_rel.cos(),
        wave_power_trans: wave * env.wave_dir_rel.sin(),
    }
}
