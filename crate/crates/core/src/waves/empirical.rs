//! Closed-form added wave resistance estimates. All take the significant
//! wave height from the environment and return newtons.

use std::f64::consts::FRAC_PI_4;

use crate::domain::{EnvironmentState, VesselParticulars};
use crate::error::{Error, Result};
use crate::units::{fold_to_pi, GRAVITY};

/// Largest |α_rel| (from the bow) accepted by the head-sector formulas.
pub const HEAD_SECTOR_LIMIT: f64 = FRAC_PI_4;

/// Head-seas estimate `0.64 g H_S² C_B ρ_w B² / L_pp`.
pub fn kreitner(v: &VesselParticulars, env: &EnvironmentState) -> f64 {
    0.64 * GRAVITY
        * env.sig_wave_height.powi(2)
        * v.block_coefficient
        * env.water_density
        * v.beam.powi(2)
        / v.length_pp
}

/// Kreitner with the cosine heading law, `… B²/(3 L_OA) · (2 + cos α_rel)`.
pub fn kreitner_directional(v: &VesselParticulars, env: &EnvironmentState) -> f64 {
    0.64 * GRAVITY
        * env.sig_wave_height.powi(2)
        * v.block_coefficient
        * env.water_density
        * v.beam.powi(2)
        / (3.0 * v.length_overall)
        * (2.0 + env.wave_dir_rel.cos())
}

pub(crate) fn stawave1_unchecked(v: &VesselParticulars, env: &EnvironmentState) -> f64 {
    GRAVITY
        * env.sig_wave_height.powi(2)
        * env.water_density
        * v.beam
        * (v.beam / v.bow_waterline_length).sqrt()
        / 16.0
}

/// Whether the wave direction lies within `limit` of the bow.
pub fn within_head_sector(env: &EnvironmentState, limit: f64) -> bool {
    // small slack so that exactly 45° given in degrees is accepted
    fold_to_pi(env.wave_dir_rel) <= limit + 1e-12
}

/// `(1/16) g H_S² ρ_w B √(B/L_B)`, valid only for waves within 45° of the bow.
pub fn stawave1(v: &VesselParticulars, env: &EnvironmentState) -> Result<f64> {
    if !within_head_sector(env, HEAD_SECTOR_LIMIT) {
        return Err(Error::Validity {
            theory: "stawave1".into(),
            reason: format!(
                "|alpha_rel| = {:.1}° exceeds 45°",
                fold_to_pi(env.wave_dir_rel).to_degrees()
            ),
        });
    }
    Ok(stawave1_unchecked(v, env))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::fixtures::bulk_carrier;
    use crate::units::deg_to_rad;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn waves(h_s: f64, alpha: f64) -> EnvironmentState {
        EnvironmentState::new(0.0, 0.0, h_s, 10.0, alpha)
    }

    #[test]
    fn kreitner_examples() {
        let v = bulk_carrier();
        assert_eq!(kreitner(&v, &waves(0.0, 0.0)), 0.0);
        // 0.64 · 9.81 · 16 · 0.7 · 1025 · 32² / 183
        let expected = 0.64 * 9.81 * 16.0 * 0.7 * 1025.0 * 1024.0 / 183.0;
        assert_relative_eq!(
            kreitner(&v, &waves(4.0, 0.0)),
            expected,
            max_relative = 1e-12
        );
        assert_relative_eq!(expected, 4.033e5, max_relative = 1e-3);
        assert_relative_eq!(
            kreitner(&v, &waves(8.0, 0.0)),
            4.0 * expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn directional_kreitner_examples() {
        let v = bulk_carrier();
        let head = 0.64 * 9.81 * 16.0 * 0.7 * 1025.0 * 1024.0 / 190.0;
        assert_relative_eq!(
            kreitner_directional(&v, &waves(4.0, 0.0)),
            head,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            kreitner_directional(&v, &waves(4.0, PI)),
            head / 3.0,
            max_relative = 1e-12
        );
        let beam = kreitner_directional(&v, &waves(4.0, FRAC_PI_2));
        assert_relative_eq!(beam, head * 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(beam, 2.590e5, max_relative = 1e-3);
    }

    #[test]
    fn stawave1_examples() {
        let v = bulk_carrier();
        assert_eq!(stawave1(&v, &waves(0.0, 0.0)).unwrap(), 0.0);
        let expected = 9.81 * 16.0 * 1025.0 * 32.0 * (32.0f64 / 40.0).sqrt() / 16.0;
        assert_relative_eq!(
            stawave1(&v, &waves(4.0, 0.0)).unwrap(),
            expected,
            max_relative = 1e-12
        );
        assert_relative_eq!(expected, 2.878e5, max_relative = 1e-3);
        assert!(matches!(
            stawave1(&v, &waves(4.0, deg_to_rad(60.0))),
            Err(Error::Validity { .. })
        ));
        assert!(stawave1(&v, &waves(4.0, deg_to_rad(45.0))).is_ok());
        assert!(stawave1(&v, &waves(4.0, deg_to_rad(-45.0))).is_ok());
        assert!(stawave1(&v, &waves(4.0, deg_to_rad(315.0))).is_ok());
    }

    proptest! {
        #[test]
        fn height_squared_scaling(h in 0.0f64..8.0, alpha in 0.0f64..(2.0 * PI)) {
            let v = bulk_carrier();
            let a = waves(h, alpha);
            let b = waves(2.0 * h, alpha);
            for f in [kreitner, kreitner_directional] {
                prop_assert!((f(&v, &b) - 4.0 * f(&v, &a)).abs() <= 1e-9 * f(&v, &b).max(1.0));
            }
            prop_assert!((stawave1_unchecked(&v, &b) - 4.0 * stawave1_unchecked(&v, &a)).abs() <= 1e-6);
        }

        #[test]
        fn directional_decreasing(a1 in 0.0f64..PI, da in 1e-6f64..1.0) {
            let v = bulk_carrier();
            let a2 = (a1 + da).min(PI);
            prop_assume!(a2 > a1);
            prop_assert!(kreitner_directional(&v, &waves(3.0, a2)) < kreitner_directional(&v, &waves(3.0, a1)));
        }
    }
}
