//! Added resistance due to wind.

mod fujiwara;
mod kitamura;

pub use fujiwara::{
    combine, wind_coefficient, ComponentCoefficients, FujiwaraParams, FujiwaraRegression,
    HeadSector, SternSector, SECTOR_BLEND_HALF_WIDTH,
};
pub use kitamura::{
    estimate_fujiwara_params, Estimate, KitamuraCoefficients, KitamuraEntry, KitamuraFile, LhsForm,
    RhsForm, EXAMPLE_FILE as KITAMURA_EXAMPLE_FILE, REQUIRED_PARAMETERS as KITAMURA_PARAMETERS,
    SCHEMA as KITAMURA_SCHEMA,
};

use std::f64::consts::PI;

use crate::domain::{EnvironmentState, LoadingCondition, VesselParticulars};
use crate::error::{Error, Result};
use crate::units::fold_to_pi;

/// `C_AA` sampled on a uniform grid over `[0, π]`, interpolated linearly in
/// angle and mirrored for port-side directions.
#[derive(Debug, Clone, PartialEq)]
pub struct WindCoefficientTable {
    step: f64,
    values: Vec<f64>,
}

impl WindCoefficientTable {
    /// `values[i]` is `C_AA(i · π / (len − 1))`.
    pub fn from_samples(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter(
                "wind table needs samples at 0 and π".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "wind table contains non-finite samples".into(),
            ));
        }
        if !(values[0] > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "C_AA(0) must be > 0, got {}",
                values[0]
            )));
        }
        Ok(Self {
            step: PI / (values.len() - 1) as f64,
            values,
        })
    }

    pub fn from_fn(resolution_deg: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(resolution_deg > 0.0 && resolution_deg <= 90.0) {
            return Err(Error::InvalidParameter(format!(
                "table resolution must be in (0, 90] degrees, got {resolution_deg}"
            )));
        }
        let n = (180.0 / resolution_deg).round().max(1.0) as usize;
        let step = PI / n as f64;
        Self::from_samples((0..=n).map(|i| f(i as f64 * step)).collect())
    }

    pub fn from_fujiwara(
        params: &FujiwaraParams,
        regression: &FujiwaraRegression,
        resolution_deg: f64,
    ) -> Result<Self> {
        params.validate()?;
        Self::from_fn(resolution_deg, |theta| {
            wind_coefficient(theta, params, regression)
        })
    }

    pub fn resolution_rad(&self) -> f64 {
        self.step
    }

    pub fn samples(&self) -> &[f64] {
        &self.values
    }

    pub fn head_coefficient(&self) -> f64 {
        self.values[0]
    }

    pub fn coefficient(&self, theta_rel: f64) -> f64 {
        let theta = fold_to_pi(theta_rel);
        let pos = theta / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let w = pos - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }
}

/// `½ρ_A A_XV (C_AA(θ) V_wrel² − C_AA(0) V_G²)`; negative when the wind
/// pushes the ship along.
pub fn added_wind_resistance(
    env: &EnvironmentState,
    sog: f64,
    a_xv: f64,
    coeffs: &WindCoefficientTable,
) -> f64 {
    let q = 0.5 * env.air_density * a_xv;
    q * (coeffs.coefficient(env.wind_dir_rel) * env.wind_speed_rel.powi(2)
        - coeffs.head_coefficient() * sog * sog)
}

/// Wind coefficient tables for both loading conditions plus the draft that
/// separates them.
#[derive(Debug, Clone)]
pub struct WindSetup {
    pub laden: WindCoefficientTable,
    pub ballast: WindCoefficientTable,
    pub ballast_draft_threshold: f64,
}

impl WindSetup {
    /// Estimates geometry for both loading conditions from Kitamura-style
    /// coefficients and tabulates `C_AA` at `resolution_deg`.
    pub fn from_kitamura(
        v: &VesselParticulars,
        file: &KitamuraFile,
        ship_type: &str,
        regression: &FujiwaraRegression,
        ballast_draft_threshold: f64,
        resolution_deg: f64,
    ) -> Result<Self> {
        let table = |condition| -> Result<WindCoefficientTable> {
            let est = estimate_fujiwara_params(
                v.length_overall,
                v.beam,
                &file.coefficients(ship_type, condition)?,
            )?;
            WindCoefficientTable::from_fujiwara(&est.params, regression, resolution_deg)
        };
        Ok(Self {
            laden: table(LoadingCondition::Laden)?,
            ballast: table(LoadingCondition::Ballast)?,
            ballast_draft_threshold,
        })
    }

    pub fn table(&self, condition: LoadingCondition) -> &WindCoefficientTable {
        match condition {
            LoadingCondition::Laden => &self.laden,
            LoadingCondition::Ballast => &self.ballast,
        }
    }

    /// Added wind resistance for a ship at `mean_draft`, choosing area and
    /// coefficient table by loading condition.
    pub fn resistance(
        &self,
        v: &VesselParticulars,
        env: &EnvironmentState,
        sog: f64,
        mean_draft: f64,
    ) -> f64 {
        let condition = LoadingCondition::from_draft(mean_draft, self.ballast_draft_threshold);
        let area = v.transverse_area(mean_draft, self.ballast_draft_threshold);
        added_wind_resistance(env, sog, area, self.table(condition))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{deg_to_rad, knots_to_ms};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bulk_setup() -> (FujiwaraParams, FujiwaraParams) {
        let file = KitamuraFile::from_json(KITAMURA_EXAMPLE_FILE).unwrap();
        let laden = estimate_fujiwara_params(
            190.0,
            32.0,
            &file.coefficients("bulk", LoadingCondition::Laden).unwrap(),
        )
        .unwrap();
        let ballast = estimate_fujiwara_params(
            190.0,
            32.0,
            &file
                .coefficients("bulk", LoadingCondition::Ballast)
                .unwrap(),
        )
        .unwrap();
        (laden.params, ballast.params)
    }

    fn env(v_wrel: f64, theta: f64) -> EnvironmentState {
        EnvironmentState::new(v_wrel, theta, 0.0, 8.0, 0.0)
    }

    fn table() -> WindCoefficientTable {
        let (laden, _) = bulk_setup();
        WindCoefficientTable::from_fujiwara(&laden, &FujiwaraRegression::standard(), 1.0).unwrap()
    }

    #[test]
    fn table_interpolates_between_grid_points() {
        let t = WindCoefficientTable::from_samples(vec![1.0, 0.0, -1.0]).unwrap();
        assert_relative_eq!(t.coefficient(0.0), 1.0);
        assert_relative_eq!(t.coefficient(PI / 4.0), 0.5, epsilon = 1e-12);
        assert_relative_eq!(t.coefficient(PI), -1.0, epsilon = 1e-12);
        assert_relative_eq!(t.coefficient(-PI / 4.0), 0.5, epsilon = 1e-12);
        assert!(WindCoefficientTable::from_samples(vec![-0.1, 0.0]).is_err());
    }

    #[test]
    fn zero_true_wind_cancels() {
        let t = table();
        let sog = 6.5;
        assert_relative_eq!(
            added_wind_resistance(&env(sog, 0.0), sog, 500.0, &t),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn own_wind_credit_without_relative_wind() {
        let t = table();
        let sog = 6.5;
        let expected = -0.5 * 1.225 * 500.0 * t.head_coefficient() * sog * sog;
        assert_relative_eq!(
            added_wind_resistance(&env(0.0, 1.0), sog, 500.0, &t),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn bulk_carrier_polar_shape() {
        let (laden, ballast) = bulk_setup();
        let reg = FujiwaraRegression::standard();
        let v = crate::domain::fixtures::bulk_carrier();
        let t_l = WindCoefficientTable::from_fujiwara(&laden, &reg, 1.0).unwrap();
        let t_b = WindCoefficientTable::from_fujiwara(&ballast, &reg, 1.0).unwrap();
        let sog = knots_to_ms(13.0);
        let r = |t: &WindCoefficientTable, area: f64, deg: f64| {
            added_wind_resistance(&env(8.0, deg_to_rad(deg)), sog, area, t)
        };
        let laden_head = r(&t_l, v.transverse_area_laden, 0.0);
        let ballast_head = r(&t_b, v.transverse_area_ballast, 0.0);
        assert!(laden_head > 0.0);
        assert!(ballast_head.abs() > laden_head.abs());
        // following wind pushes the ship
        assert!(r(&t_l, v.transverse_area_laden, 180.0) < 0.0);
        // the sign change sits in the bow quarter, well before beam winds
        let crossing = (0..=180)
            .map(f64::from)
            .find(|&d| r(&t_l, v.transverse_area_laden, d) < 0.0)
            .unwrap();
        assert!(
            (30.0..=60.0).contains(&crossing),
            "laden crossing at {crossing}°"
        );
    }

    proptest! {
        #[test]
        fn port_starboard_symmetry(theta in -PI..PI, vw in 0.0f64..25.0, sog in 0.0f64..9.0) {
            let t = table();
            let a = added_wind_resistance(&env(vw, theta), sog, 480.0, &t);
            let b = added_wind_resistance(&env(vw, -theta), sog, 480.0, &t);
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn linear_in_area(theta in 0.0f64..PI, vw in 0.0f64..25.0, c in 0.1f64..5.0) {
            let t = table();
            let a = added_wind_resistance(&env(vw, theta), 5.0, 480.0, &t);
            let b = added_wind_resistance(&env(vw, theta), 5.0, 480.0 * c, &t);
            prop_assert!((b - c * a).abs() <= 1e-9 * b.abs().max(1.0));
        }

        #[test]
        fn quadratic_in_head_wind(vw in 0.0f64..20.0) {
            let t = table();
            let a = added_wind_resistance(&env(vw, 0.0), 0.0, 480.0, &t);
            let b = added_wind_resistance(&env(2.0 * vw, 0.0), 0.0, 480.0, &t);
            prop_assert!((b - 4.0 * a).abs() <= 1e-9 * b.abs().max(1.0));
        }

        #[test]
        fn head_wind_stronger_than_ship_speed_resists(sog in 0.0f64..9.0, extra in 0.01f64..15.0) {
            let t = table();
            prop_assert!(added_wind_resistance(&env(sog + extra, 0.0), sog, 480.0, &t) > 0.0);
        }
    }
}
