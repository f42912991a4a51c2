//! Synthetic voyages generated from a known calm-water model and known
//! added-resistance physics.

use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Weibull};
use serde::{Deserialize, Serialize};

use crate::calmwater::{default_smoothing_delta, Breakpoint, CalmWaterModel};
use crate::correction::{added_power, added_resistance};
use crate::domain::{EnvironmentState, VesselParticulars, VoyageRecord};
use crate::error::{Error, Result};
use crate::units::{deg_to_rad, knots_to_ms, wrap_two_pi, SEA_WATER_DENSITY};
use crate::waves::{TheoryRegistry, ValidityMode};
use crate::wind::{FujiwaraRegression, KitamuraFile, WindSetup, KITAMURA_EXAMPLE_FILE};

pub const SCENARIO_SCHEMA: &str = "scenario/1";

/// Which wind coefficient table to build. Without a file the bundled
/// example coefficients are used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindScenario {
    pub ship_type: String,
    pub kitamura_file: Option<String>,
    pub ballast_draft_threshold: f64,
    pub resolution_deg: f64,
}

impl Default for WindScenario {
    fn default() -> Self {
        Self {
            ship_type: "bulk".into(),
            kitamura_file: None,
            ballast_draft_threshold: 9.0,
            resolution_deg: 1.0,
        }
    }
}

impl WindScenario {
    pub fn setup(&self, v: &VesselParticulars) -> Result<WindSetup> {
        let file = match &self.kitamura_file {
            Some(path) => KitamuraFile::load(Path::new(path))?,
            None => KitamuraFile::from_json(KITAMURA_EXAMPLE_FILE)?,
        };
        WindSetup::from_kitamura(
            v,
            &file,
            &self.ship_type,
            &FujiwaraRegression::standard(),
            self.ballast_draft_threshold,
            self.resolution_deg,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseModel {
    /// Standard deviation of the multiplicative log-normal power noise.
    pub log_power_sigma: f64,
    /// Gaussian measurement noise on the recorded speed through water, kn.
    pub stw_sigma_kn: f64,
    /// Gaussian measurement noise on the recorded relative wind speed, kn.
    pub wind_speed_sigma_kn: f64,
    /// Gaussian measurement noise on the recorded wave height, m.
    pub wave_height_sigma_m: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            log_power_sigma: 0.02,
            stw_sigma_kn: 0.0,
            wind_speed_sigma_kn: 0.0,
            wave_height_sigma_m: 0.0,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            log_power_sigma: 0.0,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sampling {
    pub speed_min_kn: f64,
    pub speed_max_kn: f64,
    pub laden_fraction: f64,
    pub laden_draft_m: (f64, f64),
    pub ballast_draft_m: (f64, f64),
    /// Trim by the stern in ballast, m.
    pub ballast_trim_m: f64,
    /// Standard deviation of the current (SOG − STW), kn.
    pub current_sigma_kn: f64,
    /// Weibull scale and shape of the true wind speed, m/s.
    pub true_wind_scale_ms: f64,
    pub true_wind_shape: f64,
    /// Mean of the exponential wave height distribution, m.
    pub wave_height_mean_m: f64,
    pub wave_height_max_m: f64,
    /// `T_p = a + b √H_S + N(0, σ)`.
    pub peak_period_base_s: f64,
    pub peak_period_slope: f64,
    pub peak_period_sigma_s: f64,
    pub interval_minutes: i64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            speed_min_kn: 10.0,
            speed_max_kn: 15.0,
            laden_fraction: 0.5,
            laden_draft_m: (11.0, 12.0),
            ballast_draft_m: (6.0, 7.0),
            ballast_trim_m: 1.5,
            current_sigma_kn: 0.2,
            true_wind_scale_ms: 6.0,
            true_wind_shape: 2.0,
            wave_height_mean_m: 1.0,
            wave_height_max_m: 5.0,
            peak_period_base_s: 3.5,
            peak_period_slope: 2.6,
            peak_period_sigma_s: 0.2,
            interval_minutes: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticScenario {
    #[serde(default = "scenario_schema")]
    pub schema: String,
    pub vessel: VesselParticulars,
    pub truth: CalmWaterModel,
    #[serde(default)]
    pub wind: WindScenario,
    pub wave_theory: String,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub sampling: Sampling,
    pub n_records: usize,
    pub seed: u64,
    #[serde(default = "default_start")]
    pub start: DateTime<Utc>,
}

fn scenario_schema() -> String {
    SCENARIO_SCHEMA.to_string()
}

fn default_start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
}

/// Bulk carrier used by the default scenario.
pub fn reference_vessel() -> VesselParticulars {
    VesselParticulars {
        length_overall: 190.0,
        length_pp: 183.0,
        beam: 32.0,
        block_coefficient: 0.7,
        bow_waterline_length: 40.0,
        transverse_area_laden: 480.0,
        transverse_area_ballast: 640.0,
        propulsive_efficiency: 0.7,
        mechanical_efficiency: 0.99,
    }
}

/// Calm-water law of the default scenario: exponent 1.8 below 11.53 kn and
/// 2.8 above, 6 % more power per meter of draft.
pub fn reference_truth() -> CalmWaterModel {
    CalmWaterModel {
        ln_x1: 11.19,
        x2: 1.8,
        x3: 0.06,
        x4: 0.0,
        breakpoints: vec![Breakpoint {
            speed: knots_to_ms(11.53),
            x5: 1.0,
        }],
        smoothing_delta: default_smoothing_delta(),
    }
}

impl SyntheticScenario {
    pub fn reference(n_records: usize, seed: u64) -> Self {
        Self {
            schema: scenario_schema(),
            vessel: reference_vessel(),
            truth: reference_truth(),
            wind: WindScenario::default(),
            wave_theory: "kreitner-directional".into(),
            noise: NoiseModel::default(),
            sampling: Sampling::default(),
            n_records,
            seed,
            start: default_start(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        if s.schema != SCENARIO_SCHEMA {
            return Err(Error::Schema(format!(
                "expected schema `{SCENARIO_SCHEMA}`, found `{}`",
                s.schema
            )));
        }
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.vessel.validate()?;
        self.truth.validate()?;
        let n = &self.noise;
        for (name, s) in [
            ("log_power_sigma", n.log_power_sigma),
            ("stw_sigma_kn", n.stw_sigma_kn),
            ("wind_speed_sigma_kn", n.wind_speed_sigma_kn),
            ("wave_height_sigma_m", n.wave_height_sigma_m),
        ] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "noise {name} must be >= 0, got {s}"
                )));
            }
        }
        let s = &self.sampling;
        let ordered = |name: &str, lo: f64, hi: f64| {
            if lo > 0.0 && hi > lo {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} range must satisfy 0 < lo < hi, got [{lo}, {hi}]"
                )))
            }
        };
        ordered("speed", s.speed_min_kn, s.speed_max_kn)?;
        ordered("laden draft", s.laden_draft_m.0, s.laden_draft_m.1)?;
        ordered("ballast draft", s.ballast_draft_m.0, s.ballast_draft_m.1)?;
        if !(0.0..=1.0).contains(&s.laden_fraction) {
            return Err(Error::InvalidParameter(
                "laden_fraction must lie in [0, 1]".into(),
            ));
        }
        if !(s.true_wind_scale_ms > 0.0 && s.true_wind_shape > 0.0) {
            return Err(Error::InvalidParameter(
                "true wind Weibull parameters must be > 0".into(),
            ));
        }
        if !(s.wave_height_mean_m > 0.0 && s.wave_height_max_m > 0.0) {
            return Err(Error::InvalidParameter(
                "wave height mean and cap must be > 0".into(),
            ));
        }
        if !(s.peak_period_base_s > 0.0
            && s.peak_period_sigma_s >= 0.0
            && s.current_sigma_kn >= 0.0)
        {
            return Err(Error::InvalidParameter(
                "peak period base must be > 0 and spreads >= 0".into(),
            ));
        }
        if s.interval_minutes <= 0 {
            return Err(Error::InvalidParameter(
                "interval_minutes must be > 0".into(),
            ));
        }
        Ok(())
    }
}

fn normal(sigma: f64) -> Normal<f64> {
    Normal::new(0.0, sigma).expect("sigma validated as finite and >= 0")
}

/// Samples `n_records` hourly (by default) records. Power is the calm-water
/// truth plus the added power of wind and the scenario's wave theory, times
/// log-normal noise; sensor noise is applied to the recorded inputs after
/// the power has been computed.
pub fn generate(s: &SyntheticScenario) -> Result<Vec<VoyageRecord>> {
    s.validate()?;
    let registry = TheoryRegistry::with_builtins();
    let theory = registry.get(&s.wave_theory)?;
    let wind = s.wind.setup(&s.vessel)?;
    let sm = &s.sampling;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);

    let true_wind = Weibull::new(sm.true_wind_scale_ms, sm.true_wind_shape)
        .map_err(|e| Error::InvalidParameter(format!("true wind distribution: {e}")))?;
    let wave_height = Exp::new(1.0 / sm.wave_height_mean_m)
        .map_err(|e| Error::InvalidParameter(format!("wave height distribution: {e}")))?;
    let current = normal(knots_to_ms(sm.current_sigma_kn));
    let period_noise = normal(sm.peak_period_sigma_s);
    let power_noise = normal(s.noise.log_power_sigma);
    let stw_noise = normal(knots_to_ms(s.noise.stw_sigma_kn));
    let wind_noise = normal(knots_to_ms(s.noise.wind_speed_sigma_kn));
    let height_noise = normal(s.noise.wave_height_sigma_m);

    let v = &s.vessel;
    let mut out = Vec::with_capacity(s.n_records);
    for i in 0..s.n_records {
        let stw = knots_to_ms(rng.random_range(sm.speed_min_kn..sm.speed_max_kn));
        let sog = (stw + current.sample(&mut rng)).max(0.0);
        let laden = rng.random_bool(sm.laden_fraction);
        let (lo, hi) = if laden {
            sm.laden_draft_m
        } else {
            sm.ballast_draft_m
        };
        let draft = rng.random_range(lo..hi);
        let trim = if laden { 0.0 } else { sm.ballast_trim_m };

        // apparent wind from the true wind and the ship's own motion
        let u = true_wind.sample(&mut rng);
        let psi = rng.random_range(0.0..std::f64::consts::TAU);
        let head = u * psi.cos() + sog;
        let side = u * psi.sin();
        let wind_speed_rel = head.hypot(side);
        let wind_dir_rel = wrap_two_pi(side.atan2(head));

        let h_s = loop {
            let h = wave_height.sample(&mut rng);
            if h <= sm.wave_height_max_m {
                break h;
            }
        };
        let t_p = (sm.peak_period_base_s
            + sm.peak_period_slope * h_s.sqrt()
            + period_noise.sample(&mut rng))
        .max(2.0);
        let wave_dir_rel = rng.random_range(0.0..std::f64::consts::TAU);

        let environment =
            EnvironmentState::new(wind_speed_rel, wind_dir_rel, h_s, t_p, wave_dir_rel);
        let heading = wrap_two_pi(deg_to_rad(90.0 + 20.0 * (i as f64 / 10.0).sin()));
        let mut rec = VoyageRecord {
            timestamp: s.start + Duration::minutes(sm.interval_minutes * i as i64),
            stw,
            sog,
            heading,
            draft_aft: draft + trim / 2.0,
            draft_fwd: draft - trim / 2.0,
            displacement: SEA_WATER_DENSITY * v.block_coefficient * v.length_pp * v.beam * draft
                / 1000.0,
            environment,
            brake_power: 0.0,
            water_depth: None,
        };
        let calm = s.truth.predict(stw, rec.mean_draft())?;
        let added = added_resistance(
            &rec,
            v,
            &wind,
            theory.as_ref(),
            ValidityMode::ExtrapolateWithFlag,
        )?;
        let eps = power_noise.sample(&mut rng);
        rec.brake_power = (calm + added_power(&added, stw, v)) * eps.exp();

        rec.stw = (rec.stw + stw_noise.sample(&mut rng)).max(0.0);
        rec.environment.wind_speed_rel =
            (rec.environment.wind_speed_rel + wind_noise.sample(&mut rng)).max(0.0);
        rec.environment.sig_wave_height =
            (rec.environment.sig_wave_height + height_noise.sample(&mut rng)).max(0.0);
        out.push(rec);
    }
    Ok(out)
}
