use serde::{Deserialize, Serialize};

use crate::calmwater::CalmPoint;
use crate::correction::{added_power, added_resistance};
use crate::domain::{VesselParticulars, VoyageRecord};
use crate::error::Result;
use crate::waves::{ValidityMode, WaveTheory};
use crate::wind::WindSetup;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrectionOutcome {
    pub points: Vec<CalmPoint>,
    /// Records whose corrections consumed all of the measured power.
    pub dropped_non_positive: usize,
    /// Records where the wave theory was outside its validity range and no
    /// wave correction was applied.
    pub out_of_validity: usize,
}

/// Removes the added power of wind and waves from the measured brake power.
pub fn weather_correct(
    records: &[VoyageRecord],
    v: &VesselParticulars,
    wind: &WindSetup,
    theory: &dyn WaveTheory,
    mode: ValidityMode,
) -> Result<CorrectionOutcome> {
    let mut out = CorrectionOutcome::default();
    for r in records {
        let added = added_resistance(r, v, wind, theory, mode)?;
        if !added.wave_in_validity {
            out.out_of_validity += 1;
        }
        let calm_power = r.brake_power - added_power(&added, r.stw, v);
        if calm_power > 0.0 {
            out.points.push(CalmPoint {
                stw: r.stw,
                draft_mean: r.mean_draft(),
                calm_power,
            });
        } else {
            out.dropped_non_positive += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate, NoiseModel, SyntheticScenario};
    use crate::domain::EnvironmentState;
    use crate::waves::TheoryRegistry;
    use approx::assert_relative_eq;

    fn setup(s: &SyntheticScenario) -> WindSetup {
        s.wind.setup(&s.vessel).unwrap()
    }

    #[test]
    fn calm_records_pass_through() {
        let s = SyntheticScenario::reference(20, 2);
        let mut recs = generate(&s).unwrap();
        for r in &mut recs {
            r.environment = EnvironmentState::calm();
            r.sog = 0.0;
        }
        let theory = TheoryRegistry::with_builtins()
            .get("kreitner-directional")
            .unwrap();
        let out = weather_correct(
            &recs,
            &s.vessel,
            &setup(&s),
            theory.as_ref(),
            ValidityMode::Strict,
        )
        .unwrap();
        for (p, r) in out.points.iter().zip(&recs) {
            assert_eq!(p.calm_power, r.brake_power);
        }
    }

    #[test]
    fn noiseless_generation_inverts_exactly() {
        let s = SyntheticScenario {
            noise: NoiseModel::noiseless(),
            ..SyntheticScenario::reference(500, 4)
        };
        let recs = generate(&s).unwrap();
        let theory = TheoryRegistry::with_builtins().get(&s.wave_theory).unwrap();
        let out = weather_correct(
            &recs,
            &s.vessel,
            &setup(&s),
            theory.as_ref(),
            ValidityMode::Strict,
        )
        .unwrap();
        assert_eq!(out.points.len(), recs.len());
        for p in &out.points {
            let truth = s.truth.predict(p.stw, p.draft_mean).unwrap();
            assert_relative_eq!(p.calm_power, truth, max_relative = 1e-9);
        }
    }

    #[test]
    fn corrections_exceeding_power_dropped() {
        let s = SyntheticScenario::reference(1, 2);
        let mut recs = generate(&s).unwrap();
        // steep head seas against a nearly idle engine reading
        recs[0].environment = EnvironmentState::new(20.0, 0.0, 6.0, 10.0, 0.0);
        recs[0].brake_power = 1000.0;
        let theory = TheoryRegistry::with_builtins()
            .get("kreitner-directional")
            .unwrap();
        let out = weather_correct(
            &recs,
            &s.vessel,
            &setup(&s),
            theory.as_ref(),
            ValidityMode::Strict,
        )
        .unwrap();
        assert!(out.points.is_empty());
        assert_eq!(out.dropped_non_positive, 1);
    }

    #[test]
    fn strict_mode_propagates_validity_errors() {
        let s = SyntheticScenario::reference(50, 2);
        let recs = generate(&s).unwrap();
        let theory = TheoryRegistry::with_builtins().get("stawave1").unwrap();
        assert!(weather_correct(
            &recs,
            &s.vessel,
            &setup(&s),
            theory.as_ref(),
            ValidityMode::Strict
        )
        .is_err());
        let out = weather_correct(
            &recs,
            &s.vessel,
            &setup(&s),
            theory.as_ref(),
            ValidityMode::ExtrapolateWithFlag,
        )
        .unwrap();
        assert!(out.out_of_validity > 0);
    }
}
