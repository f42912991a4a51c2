use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pierson–Moskowitz spectrum for fully developed seas,
/// `S(ω) = (5/16) H_S² ω_p⁴ ω⁻⁵ exp(−(5/4)(ω_p/ω)⁴)` with `ω_p = 2π/T_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSpectrum {
    pub h_s: f64,
    pub t_p: f64,
}

pub fn pm_spectrum(h_s: f64, t_p: f64) -> Result<WaveSpectrum> {
    if !(t_p > 0.0 && t_p.is_finite()) {
        return Err(Error::Domain(format!("peak period must be > 0, got {t_p}")));
    }
    if !(h_s >= 0.0 && h_s.is_finite()) {
        return Err(Error::Domain(format!(
            "significant wave height must be >= 0, got {h_s}"
        )));
    }
    Ok(WaveSpectrum { h_s, t_p })
}

impl WaveSpectrum {
    pub fn peak_frequency(&self) -> f64 {
        TAU / self.t_p
    }

    /// Spectral density in m²·s at angular frequency `omega` (rad/s).
    pub fn density(&self, omega: f64) -> f64 {
        if omega <= 0.0 || self.h_s == 0.0 {
            return 0.0;
        }
        let wp = self.peak_frequency();
        let r4 = (wp / omega).powi(4);
        5.0 / 16.0 * self.h_s * self.h_s * r4 / omega * (-1.25 * r4).exp()
    }

    /// `∫₀^∞ S dω = H_S²/16`.
    pub fn zeroth_moment(&self) -> f64 {
        self.h_s * self.h_s / 16.0
    }

    /// Fraction of the zeroth moment lying outside `[lo, hi]` (rad/s).
    ///
    /// With `t = ω⁻⁴` the cumulative moment is `m0 · exp(−(5/4) ω_p⁴ / ω⁴)`,
    /// so both tails have closed forms.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let wp = self.peak_frequency();
        let below = if lo > 0.0 {
            (-1.25 * (wp / lo).powi(4)).exp()
        } else {
            0.0
        };
        let above = -(-1.25 * (wp / hi).powi(4)).exp_m1();
        below + above
    }
}
