//! Response functions `R_AW(ω)/ζ_a²` and their integration over a spectrum.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::VesselParticulars;
use crate::error::{Error, Result};
use crate::units::{fold_to_pi, GRAVITY, SEA_WATER_DENSITY};

use super::form_factor::{default_bow_entrance_angle, form_factor_fixed};
use super::quadrature::{integrate, QuadratureConfig};
use super::spectrum::WaveSpectrum;

pub const RAWRF_SCHEMA: &str = "rawrf/1";

/// Example plug-in file shipped with the crate.
pub const EXAMPLE_RAWRF: &str = include_str!("../../data/rawrf_example.json");

/// Motion and reflection parts of a quadratic transfer function, N/m².
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ResponseComponents {
    pub motion: f64,
    pub reflection: f64,
}

impl ResponseComponents {
    pub fn total(&self) -> f64 {
        self.motion + self.reflection
    }
}

pub trait ResponseFunction: Send + Sync {
    fn components(
        &self,
        omega: f64,
        alpha_rel: f64,
        stw: f64,
        v: &VesselParticulars,
    ) -> ResponseComponents;

    fn value(&self, omega: f64, alpha_rel: f64, stw: f64, v: &VesselParticulars) -> f64 {
        self.components(omega, alpha_rel, stw, v).total()
    }
}

/// The same value at every frequency, all attributed to reflection.
#[derive(Debug, Clone, Copy)]
pub struct ConstantResponse(pub f64);

impl ResponseFunction for ConstantResponse {
    fn components(&self, _: f64, _: f64, _: f64, _: &VesselParticulars) -> ResponseComponents {
        ResponseComponents {
            motion: 0.0,
            reflection: self.0,
        }
    }
}

/// Wraps a closure `(ω, α_rel, stw, v) → N/m²`.
pub struct FnResponse<F>(pub F);

impl<F> ResponseFunction for FnResponse<F>
where
    F: Fn(f64, f64, f64, &VesselParticulars) -> f64 + Send + Sync,
{
    fn components(
        &self,
        omega: f64,
        alpha_rel: f64,
        stw: f64,
        v: &VesselParticulars,
    ) -> ResponseComponents {
        ResponseComponents {
            motion: (self.0)(omega, alpha_rel, stw, v),
            reflection: 0.0,
        }
    }
}

/// Frequency window `[lo · ω_p, hi · ω_p]` used for the spectral integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralWindow {
    pub lo: f64,
    pub hi: f64,
}

impl Default for SpectralWindow {
    fn default() -> Self {
        Self { lo: 0.1, hi: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegrationSettings {
    pub window: SpectralWindow,
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralIntegral {
    /// Mean added resistance, N.
    pub value: f64,
    /// Quadrature error estimate, N.
    pub error_estimate: f64,
    /// Fraction of the spectral energy that falls outside the window.
    pub truncated_mass: f64,
    /// Size of the neglected tails, estimated with the response at the
    /// window edges, N.
    pub truncation_estimate: f64,
    pub intervals: usize,
}

/// `2 ∫ S(ω) rf(ω) dω` over the spectral window.
pub fn mean_added_resistance(
    rf: &dyn ResponseFunction,
    spec: &WaveSpectrum,
    alpha_rel: f64,
    stw: f64,
    v: &VesselParticulars,
    settings: &IntegrationSettings,
) -> Result<SpectralIntegral> {
    if spec.h_s == 0.0 {
        return Ok(SpectralIntegral {
            value: 0.0,
            error_estimate: 0.0,
            truncated_mass: 0.0,
            truncation_estimate: 0.0,
            intervals: 0,
        });
    }
    let wp = spec.peak_frequency();
    let (lo, hi) = (settings.window.lo * wp, settings.window.hi * wp);
    let r = integrate(
        |w| 2.0 * spec.density(w) * rf.value(w, alpha_rel, stw, v),
        lo,
        hi,
        &settings.quadrature,
    )?;
    let m0 = spec.zeroth_moment();
    let below = spec.mass_outside(lo, f64::INFINITY);
    let above = spec.mass_outside(0.0, hi);
    let edge = below * rf.value(lo, alpha_rel, stw, v).abs()
        + above * rf.value(hi, alpha_rel, stw, v).abs();
    Ok(SpectralIntegral {
        value: r.value,
        error_estimate: r.error_estimate,
        truncated_mass: below + above,
        truncation_estimate: 2.0 * m0 * edge,
        intervals: r.intervals,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawFile {
    schema: String,
    theory: String,
    provenance: String,
    #[serde(default)]
    max_abs_alpha_deg: Option<f64>,
    constants: BTreeMap<String, f64>,
}

/// Constants a `rawrf/1` file must provide.
pub const RAWRF_CONSTANTS: [&str; 8] = [
    "motion_amplitude",
    "motion_frequency_scale",
    "b_low",
    "b_high",
    "d_low",
    "d_high",
    "reflection_amplitude",
    "reflection_frequency_scale",
];

/// Two-part response with a peaked motion term and a high-frequency
/// reflection term, all shape constants read from a `rawrf/1` file.
///
/// Motion: `4πρg (B²/L_pp) A_m ω̄^b exp((b/d)(1 − ω̄^d)) (1 + cos α)/2`
/// with `ω̄ = ω √(L_pp/g) / s_m`, and `b`, `d` switching at `ω̄ = 1`.
///
/// Reflection: `½ρgB A_r max(cos α, 0)² F(π − α) ω̄_r⁴/(1 + ω̄_r⁴)` where
/// `F` is the corrected form factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricResponse {
    pub theory: String,
    pub provenance: String,
    /// Head sector half-width in radians, `None` for all headings.
    pub max_abs_alpha: Option<f64>,
    pub constants: BTreeMap<String, f64>,
    /// Overrides the bow-entrance angle derived from the particulars.
    pub bow_entrance_angle: Option<f64>,
}

impl ParametricResponse {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawFile = serde_json::from_str(text)?;
        if raw.schema != RAWRF_SCHEMA {
            return Err(Error::Schema(format!(
                "expected schema `{RAWRF_SCHEMA}`, found `{}`",
                raw.schema
            )));
        }
        if raw.theory.trim().is_empty() {
            return Err(Error::Schema("theory name is empty".into()));
        }
        for key in RAWRF_CONSTANTS {
            match raw.constants.get(key) {
                None => return Err(Error::IncompleteCoefficients(key.into())),
                Some(x) if !x.is_finite() => {
                    return Err(Error::Schema(format!("constant `{key}` is not finite")))
                }
                _ => {}
            }
        }
        for key in ["motion_amplitude", "reflection_amplitude"] {
            if raw.constants[key] < 0.0 {
                return Err(Error::Schema(format!("`{key}` must be >= 0")));
            }
        }
        for key in ["motion_frequency_scale", "reflection_frequency_scale"] {
            if raw.constants[key] <= 0.0 {
                return Err(Error::Schema(format!("`{key}` must be > 0")));
            }
        }
        for key in ["d_low", "d_high"] {
            if raw.constants[key] == 0.0 {
                return Err(Error::Schema(format!("`{key}` must be non-zero")));
            }
        }
        let bow_entrance_angle = raw
            .constants
            .get("bow_entrance_angle_deg")
            .map(|d| d.to_radians());
        Ok(Self {
            theory: raw.theory,
            provenance: raw.provenance,
            max_abs_alpha: raw.max_abs_alpha_deg.map(f64::to_radians),
            constants: raw.constants,
            bow_entrance_angle,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn example() -> Self {
        Self::from_json(EXAMPLE_RAWRF).expect("bundled response file is valid")
    }

    fn c(&self, key: &str) -> f64 {
        self.constants[key]
    }

    pub fn bow_entrance_angle_for(&self, v: &VesselParticulars) -> f64 {
        self.bow_entrance_angle
            .unwrap_or_else(|| default_bow_entrance_angle(v))
    }
}

impl ResponseFunction for ParametricResponse {
    fn components(
        &self,
        omega: f64,
        alpha_rel: f64,
        stw: f64,
        v: &VesselParticulars,
    ) -> ResponseComponents {
        if omega <= 0.0 {
            return ResponseComponents::default();
        }
        let alpha = fold_to_pi(alpha_rel);
        let rho = SEA_WATER_DENSITY;
        let nondim = omega * (v.length_pp / GRAVITY).sqrt();

        let wm = nondim / self.c("motion_frequency_scale");
        let (b, d) = if wm < 1.0 {
            (self.c("b_low"), self.c("d_low"))
        } else {
            (self.c("b_high"), self.c("d_high"))
        };
        let shape = wm.powf(b) * ((b / d) * (1.0 - wm.powf(d))).exp();
        let motion = 4.0 * PI * rho * GRAVITY * v.beam.powi(2) / v.length_pp
            * self.c("motion_amplitude")
            * shape
            * 0.5
            * (1.0 + alpha.cos());

        let wr4 = (nondim / self.c("reflection_frequency_scale")).powi(4);
        let heading = alpha.cos().max(0.0).powi(2);
        let reflection = if heading == 0.0 {
            0.0
        } else {
            let fr = stw.max(0.0) / (GRAVITY * v.length_pp).sqrt();
            let e1 = self.bow_entrance_angle_for(v);
            // invalid particulars fall back to no shape amplification
            let ff = form_factor_fixed(PI - alpha, e1, v.block_coefficient, fr).unwrap_or(1.0);
            0.5 * rho * GRAVITY * v.beam * self.c("reflection_amplitude") * heading * ff * wr4
                / (1.0 + wr4)
        };
        ResponseComponents { motion, reflection }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::fixtures::bulk_carrier;
    use crate::units::knots_to_ms;
    use crate::waves::spectrum::pm_spectrum;
    use approx::assert_relative_eq;

    #[test]
    fn constant_response_reduces_to_zeroth_moment() {
        let v = bulk_carrier();
        for (h, t) in [(1.0, 6.0), (3.0, 9.0), (6.0, 14.0)] {
            let s = pm_spectrum(h, t).unwrap();
            let r = mean_added_resistance(
                &ConstantResponse(1234.0),
                &s,
                0.0,
                6.0,
                &v,
                &Default::default(),
            )
            .unwrap();
            assert_relative_eq!(r.value, 2.0 * 1234.0 * h * h / 16.0, max_relative = 1e-4);
            assert!(r.truncated_mass < 1e-6);
        }
    }

    #[test]
    fn zero_height_gives_zero() {
        let s = pm_spectrum(0.0, 8.0).unwrap();
        let r = mean_added_resistance(
            &ParametricResponse::example(),
            &s,
            0.0,
            6.0,
            &bulk_carrier(),
            &Default::default(),
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
    }

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
        h * (0.5 * (f(a) + f(b)) + inner)
    }

    #[test]
    fn smooth_bump_matches_trapezoid() {
        let v = bulk_carrier();
        let bump = FnResponse(|w: f64, _: f64, _: f64, _: &VesselParticulars| {
            5e4 * (-(w - 0.8).powi(2) / 0.02).exp()
        });
        let s = pm_spectrum(3.0, 9.0).unwrap();
        let cfg = IntegrationSettings::default();
        let r = mean_added_resistance(&bump, &s, 0.0, 6.0, &v, &cfg).unwrap();
        let wp = s.peak_frequency();
        let oracle = trapezoid(
            |w| 2.0 * s.density(w) * bump.value(w, 0.0, 6.0, &v),
            0.1 * wp,
            50.0 * wp,
            100_000,
        );
        assert_relative_eq!(r.value, oracle, max_relative = 1e-3);
    }

    #[test]
    fn parametric_response_matches_trapezoid() {
        let v = bulk_carrier();
        let rf = ParametricResponse::example();
        let s = pm_spectrum(4.0, 10.0).unwrap();
        let stw = knots_to_ms(13.0);
        for alpha in [0.0, 0.3, 1.2, 2.5] {
            let r = mean_added_resistance(&rf, &s, alpha, stw, &v, &Default::default()).unwrap();
            let wp = s.peak_frequency();
            let oracle = trapezoid(
                |w| 2.0 * s.density(w) * rf.value(w, alpha, stw, &v),
                0.1 * wp,
                50.0 * wp,
                100_000,
            );
            assert_relative_eq!(r.value, oracle, max_relative = 1e-3);
        }
    }

    #[test]
    fn head_seas_response_non_negative() {
        let v = bulk_carrier();
        let rf = ParametricResponse::example();
        for i in 1..2000 {
            let w = i as f64 * 0.0025;
            let c = rf.components(w, 0.0, 6.0, &v);
            assert!(c.motion >= 0.0 && c.reflection >= 0.0, "ω = {w}");
        }
    }

    #[test]
    fn example_magnitude_is_plausible() {
        let v = bulk_carrier();
        let s = pm_spectrum(4.0, 10.0).unwrap();
        let r = mean_added_resistance(
            &ParametricResponse::example(),
            &s,
            0.0,
            knots_to_ms(13.0),
            &v,
            &Default::default(),
        )
        .unwrap();
        assert!(r.value > 5e4 && r.value < 1e6, "{}", r.value);
    }

    #[test]
    fn file_validation() {
        let mut raw: serde_json::Value = serde_json::from_str(EXAMPLE_RAWRF).unwrap();
        raw["constants"].as_object_mut().unwrap().remove("b_low");
        assert!(matches!(
            ParametricResponse::from_json(&raw.to_string()),
            Err(Error::IncompleteCoefficients(k)) if k == "b_low"
        ));
        let mut raw: serde_json::Value = serde_json::from_str(EXAMPLE_RAWRF).unwrap();
        raw["schema"] = "rawrf/0".into();
        assert!(matches!(
            ParametricResponse::from_json(&raw.to_string()),
            Err(Error::Schema(_))
        ));
    }
}
