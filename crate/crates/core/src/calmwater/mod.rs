//! Calm-water speed–power model.
//!
//! The model is a log-linear power law in speed and mean draft whose speed
//! exponent changes at one or more breakpoints:
//!
//! ```text
//! ln P = ln x1 + x2 ln V + x3 T + x4 T ln V + Σ_j x5_j (ln V − ln B_j) · d(V; B_j, δ)
//! ```
//!
//! where `d` is a tanh step that makes the exponent change smoothly over a
//! speed band of width `δ`. Breakpoints are located by binary segmentation of
//! the speed-sorted series ([`detect_breakpoints`]) and the coefficients by
//! ordinary least squares in log space ([`fit`]).

mod fit;
mod segmentation;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::knots_to_ms;

pub use fit::{fit, fit_with_detection, CalmPoint, FitDiagnostics};
pub use segmentation::{detect_breakpoints, segment_split_indices, SegmentationResult};

pub const SCHEMA: &str = "calmwater/1";

/// Default smoothing width: half a knot.
pub fn default_smoothing_delta() -> f64 {
    knots_to_ms(0.5)
}

/// `½ (1 + tanh((v − bp) / δ))`.
pub fn smooth_dummy(v: f64, bp: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "smoothing delta must be > 0, got {delta}"
        )));
    }
    Ok(smooth_step(v, bp, delta))
}

#[inline]
pub(crate) fn smooth_step(v: f64, bp: f64, delta: f64) -> f64 {
    0.5 * (1.0 + ((v - bp) / delta).tanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    /// Speed through water at which the exponent changes, m/s.
    pub speed: f64,
    /// Exponent change across the breakpoint.
    pub x5: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalmWaterModel {
    pub ln_x1: f64,
    pub x2: f64,
    /// Per meter of draft.
    pub x3: f64,
    /// Per meter of draft.
    pub x4: f64,
    pub breakpoints: Vec<Breakpoint>,
    /// m/s.
    pub smoothing_delta: f64,
}

#[derive(Serialize, Deserialize)]
struct CalmWaterModelFile {
    schema: String,
    #[serde(flatten)]
    model: CalmWaterModel,
}

impl CalmWaterModel {
    /// Plain power law `P = x1 · V^x2`.
    pub fn power_law(x1: f64, x2: f64) -> Self {
        Self {
            ln_x1: x1.ln(),
            x2,
            x3: 0.0,
            x4: 0.0,
            breakpoints: Vec::new(),
            smoothing_delta: default_smoothing_delta(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.smoothing_delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "smoothing_delta must be > 0, got {}",
                self.smoothing_delta
            )));
        }
        let finite = [self.ln_x1, self.x2, self.x3, self.x4]
            .iter()
            .all(|c| c.is_finite());
        if !finite || self.breakpoints.iter().any(|b| !b.x5.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        if self.breakpoints.iter().any(|b| !(b.speed > 0.0)) {
            return Err(Error::InvalidParameter(
                "breakpoint speeds must be > 0".into(),
            ));
        }
        if self
            .breakpoints
            .windows(2)
            .any(|w| w[1].speed <= w[0].speed)
        {
            return Err(Error::InvalidParameter(
                "breakpoints must be strictly increasing in speed".into(),
            ));
        }
        Ok(())
    }

    /// Natural log of the predicted calm-water power.
    pub fn log_predict(&self, stw: f64, draft_mean: f64) -> Result<f64> {
        if !(stw > 0.0) {
            return Err(Error::Domain(format!("stw must be > 0, got {stw}")));
        }
        let ln_v = stw.ln();
        let mut y =
            self.ln_x1 + self.x2 * ln_v + self.x3 * draft_mean + self.x4 * ln_v * draft_mean;
        for bp in &self.breakpoints {
            y += bp.x5 * (ln_v - bp.speed.ln()) * smooth_step(stw, bp.speed, self.smoothing_delta);
        }
        Ok(y)
    }

    /// Calm-water brake power in watts.
    pub fn predict(&self, stw: f64, draft_mean: f64) -> Result<f64> {
        self.log_predict(stw, draft_mean).map(f64::exp)
    }

    /// Local exponent `d ln P / d ln V` ignoring the smoothing transition,
    /// i.e. the exponent of the segment `segment` (0 = below the first breakpoint).
    pub fn segment_exponent(&self, segment: usize, draft_mean: f64) -> f64 {
        let base = self.x2 + self.x4 * draft_mean;
        base + self
            .breakpoints
            .iter()
            .take(segment)
            .map(|b| b.x5)
            .sum::<f64>()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CalmWaterModelFile {
            schema: SCHEMA.to_string(),
            model: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema").and_then(|s| s.as_str()) {
            Some(SCHEMA) => {}
            Some(other) => {
                return Err(Error::Schema(format!(
                    "expected schema `{SCHEMA}`, found `{other}`"
                )))
            }
            None => {
                return Err(Error::Schema(format!(
                    "missing `schema` key (expected `{SCHEMA}`)"
                )))
            }
        }
        let file: CalmWaterModelFile = serde_json::from_value(value)?;
        file.model.validate()?;
        Ok(file.model)
    }
}
