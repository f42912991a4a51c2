//! Directional wind-resistance coefficient built from three component
//! coefficients (longitudinal force, cross-flow interaction, lift-induced),
//! each a linear regression on non-dimensional superstructure geometry with
//! separate constants for the head (θ < 90°) and stern (θ > 90°) sectors.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::units::fold_to_pi;

/// Half-width of the linear blend between the head and stern regressions.
pub const SECTOR_BLEND_HALF_WIDTH: f64 = 5.0 * std::f64::consts::PI / 180.0;

/// Superstructure geometry consumed by the regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FujiwaraParams {
    #[serde(default)]
    pub ship_type: String,
    /// m
    pub length_overall: f64,
    /// m
    pub beam: f64,
    /// Transverse projected area above the waterline, m².
    pub a_xv: f64,
    /// Lateral projected area above the waterline, m².
    pub a_yv: f64,
    /// Lateral projected area of superstructures and deck cargo, m².
    pub a_od: f64,
    /// Horizontal offset of the lateral-area centroid from midship, m
    /// (positive forward). The only signed field.
    pub c_mc: f64,
    /// Height of the top of the superstructure above the waterline, m.
    pub h_br: f64,
    /// Height of the lateral-area centroid above the waterline, m.
    pub h_c: f64,
}

impl FujiwaraParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("length_overall", self.length_overall),
            ("beam", self.beam),
            ("a_xv", self.a_xv),
            ("a_yv", self.a_yv),
            ("a_od", self.a_od),
            ("h_br", self.h_br),
            ("h_c", self.h_c),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "fujiwara parameter {name} must be >= 0, got {value}"
                )));
            }
        }
        if !self.c_mc.is_finite() {
            return Err(Error::InvalidParameter(
                "fujiwara parameter c_mc must be finite".into(),
            ));
        }
        Ok(())
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Regression constants for θ < 90°.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadSector {
    /// C_LF = β0 + β1·A_YV/(L·B) + β2·C_MC/B
    pub beta: [f64; 3],
    /// C_XLI = δ0 + δ1·A_YV/(L·h_BR) + δ2·A_XV/(B·h_BR)
    pub delta: [f64; 3],
    /// C_ALF = ε0 + ε1·A_OD/A_YV + ε2·B/L
    pub epsilon: [f64; 3],
}

/// Regression constants for θ > 90°.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SternSector {
    /// C_LF = β0 + β1·B/L + β2·H_C/L + β3·A_OD/L² + β4·A_XV/B²
    pub beta: [f64; 5],
    /// C_XLI = δ0 + δ1·A_YV/(L·h_BR) + δ2·A_XV/A_YV + δ3·B/L + δ4·A_XV/(B·h_BR)
    pub delta: [f64; 5],
    /// C_ALF = ε0 + ε1·A_OD/A_YV
    pub epsilon: [f64; 2],
}

/// Component coefficients at one heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentCoefficients {
    pub c_lf: f64,
    pub c_xli: f64,
    pub c_alf: f64,
}

impl ComponentCoefficients {
    fn lerp(self, other: Self, w: f64) -> Self {
        Self {
            c_lf: (1.0 - w) * self.c_lf + w * other.c_lf,
            c_xli: (1.0 - w) * self.c_xli + w * other.c_xli,
            c_alf: (1.0 - w) * self.c_alf + w * other.c_alf,
        }
    }
}

pub const REGRESSION_SCHEMA: &str = "fujiwara/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FujiwaraRegression {
    #[serde(default)]
    pub provenance: String,
    pub head: HeadSector,
    pub stern: SternSector,
}

#[derive(Serialize, Deserialize)]
struct RegressionFile {
    schema: String,
    #[serde(flatten)]
    regression: FujiwaraRegression,
}

const STANDARD_REGRESSION: &str = include_str!("../../data/fujiwara_regression.json");

impl FujiwaraRegression {
    /// The published regression constants shipped with the crate.
    pub fn standard() -> Self {
        Self::from_json(STANDARD_REGRESSION).expect("bundled fujiwara regression file is valid")
    }

    /// Regression whose component coefficients are the same constants in both
    /// sectors and independent of geometry.
    pub fn constant(c_lf: f64, c_xli: f64, c_alf: f64) -> Self {
        Self {
            provenance: "hand-set constants".into(),
            head: HeadSector {
                beta: [c_lf, 0.0, 0.0],
                delta: [c_xli, 0.0, 0.0],
                epsilon: [c_alf, 0.0, 0.0],
            },
            stern: SternSector {
                beta: [c_lf, 0.0, 0.0, 0.0, 0.0],
                delta: [c_xli, 0.0, 0.0, 0.0, 0.0],
                epsilon: [c_alf, 0.0],
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RegressionFile = serde_json::from_str(text)?;
        if file.schema != REGRESSION_SCHEMA {
            return Err(Error::Schema(format!(
                "expected `{REGRESSION_SCHEMA}`, found `{}`",
                file.schema
            )));
        }
        let r = &file.regression;
        let all = r
            .head
            .beta
            .iter()
            .chain(&r.head.delta)
            .chain(&r.head.epsilon);
        let all = all
            .chain(&r.stern.beta)
            .chain(&r.stern.delta)
            .chain(&r.stern.epsilon);
        if all.into_iter().any(|c| !c.is_finite()) {
            return Err(Error::Schema("non-finite regression constant".into()));
        }
        Ok(file.regression)
    }

    pub fn head_components(&self, p: &FujiwaraParams) -> ComponentCoefficients {
        let (l, b) = (p.length_overall, p.beam);
        let h = &self.head;
        ComponentCoefficients {
            c_lf: h.beta[0] + h.beta[1] * ratio(p.a_yv, l * b) + h.beta[2] * ratio(p.c_mc, b),
            c_xli: h.delta[0]
                + h.delta[1] * ratio(p.a_yv, l * p.h_br)
                + h.delta[2] * ratio(p.a_xv, b * p.h_br),
            c_alf: h.epsilon[0] + h.epsilon[1] * ratio(p.a_od, p.a_yv) + h.epsilon[2] * ratio(b, l),
        }
    }

    pub fn stern_components(&self, p: &FujiwaraParams) -> ComponentCoefficients {
        let (l, b) = (p.length_overall, p.beam);
        let s = &self.stern;
        ComponentCoefficients {
            c_lf: s.beta[0]
                + s.beta[1] * ratio(b, l)
                + s.beta[2] * ratio(p.h_c, l)
                + s.beta[3] * ratio(p.a_od, l * l)
                + s.beta[4] * ratio(p.a_xv, b * b),
            c_xli: s.delta[0]
                + s.delta[1] * ratio(p.a_yv, l * p.h_br)
                + s.delta[2] * ratio(p.a_xv, p.a_yv)
                + s.delta[3] * ratio(b, l)
                + s.delta[4] * ratio(p.a_xv, b * p.h_br),
            c_alf: s.epsilon[0] + s.epsilon[1] * ratio(p.a_od, p.a_yv),
        }
    }

    /// Component coefficients at `theta` (already folded onto `[0, π]`),
    /// blended linearly across `90° ± 5°`.
    pub fn components(&self, theta: f64, p: &FujiwaraParams) -> ComponentCoefficients {
        let lo = FRAC_PI_2 - SECTOR_BLEND_HALF_WIDTH;
        let hi = FRAC_PI_2 + SECTOR_BLEND_HALF_WIDTH;
        if theta <= lo {
            self.head_components(p)
        } else if theta >= hi {
            self.stern_components(p)
        } else {
            let w = (theta - lo) / (hi - lo);
            self.head_components(p).lerp(self.stern_components(p), w)
        }
    }
}

/// `C_AA(θ) = C_LF cos θ + C_XLI (sin θ − ½ sin θ cos³θ) + C_ALF sin θ cos³θ`.
pub fn combine(theta: f64, c: ComponentCoefficients) -> f64 {
    let (s, co) = theta.sin_cos();
    let c3 = co * co * co;
    c.c_lf * co + c.c_xli * (s - 0.5 * s * c3) + c.c_alf * s * c3
}

/// Wind resistance coefficient at relative wind direction `theta_rel`.
/// The angle is folded onto `[0, π]` (port/starboard symmetry).
pub fn wind_coefficient(
    theta_rel: f64,
    p: &FujiwaraParams,
    regression: &FujiwaraRegression,
) -> f64 {
    let theta = fold_to_pi(theta_rel);
    combine(theta, regression.components(theta, p))
}
