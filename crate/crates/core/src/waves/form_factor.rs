//! Non-linear reflection form factor `(0.87/C_B)^((1 + 4√Fr) f(α))`.
//!
//! Angles here follow the reflection-model convention: `α = π` is head
//! seas and `π − E1` is where the bow entrance ends. Callers holding a
//! bow-relative direction pass `π − α_rel`.

use std::f64::consts::PI;

use crate::domain::VesselParticulars;
use crate::error::{Error, Result};
use crate::units::fold_to_pi;

/// Bow-entrance angle estimated from the particulars as
/// `atan(B / (2 · 0.195 · L_pp))`.
pub fn default_bow_entrance_angle(v: &VesselParticulars) -> f64 {
    (v.beam / (2.0 * 0.195 * v.length_pp)).atan()
}

fn check(e1: f64, c_b: f64, fr: f64) -> Result<()> {
    if !(e1 > 0.0 && e1 < PI) {
        return Err(Error::Domain(format!(
            "degenerate bow entrance angle E1 = {e1} (needs 0 < E1 < π)"
        )));
    }
    if !(c_b > 0.0 && c_b < 1.0) {
        return Err(Error::Domain(format!(
            "block coefficient must lie in (0, 1), got {c_b}"
        )));
    }
    if !(fr >= 0.0 && fr.is_finite()) {
        return Err(Error::Domain(format!(
            "Froude number must be >= 0, got {fr}"
        )));
    }
    Ok(())
}

/// Shape function that rises from 0 at `π − E1` to 1 at `π`.
pub fn shape_fixed(alpha: f64, e1: f64) -> f64 {
    let alpha = fold_to_pi(alpha);
    let start = PI - e1;
    if alpha < start {
        0.0
    } else {
        1.0 - (alpha.cos() + 1.0) / (start.cos() + 1.0)
    }
}

/// The uncorrected shape `−cos α` on the bow sector, which jumps at `π − E1`.
pub fn shape_original(alpha: f64, e1: f64) -> f64 {
    let alpha = fold_to_pi(alpha);
    if alpha < PI - e1 {
        0.0
    } else {
        -alpha.cos()
    }
}

fn factor(c_b: f64, fr: f64, f: f64) -> f64 {
    (0.87 / c_b).powf((1.0 + 4.0 * fr.sqrt()) * f)
}

pub fn form_factor_fixed(alpha: f64, e1: f64, c_b: f64, fr: f64) -> Result<f64> {
    check(e1, c_b, fr)?;
    Ok(factor(c_b, fr, shape_fixed(alpha, e1)))
}

pub fn form_factor_original(alpha: f64, e1: f64, c_b: f64, fr: f64) -> Result<f64> {
    check(e1, c_b, fr)?;
    Ok(factor(c_b, fr, shape_original(alpha, e1)))
}
