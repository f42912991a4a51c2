//! Invariants that span several modules: generated voyages survive the CSV
//! layer up to unit-conversion rounding, filtering is idempotent, and
//! weather correction undoes what the generator added on top of the
//! calm-water curve.

use proptest::prelude::*;
use speedpower_core::data::{
    calm_weather_subset, filter_steady_state, generate, read_csv, write_csv, FilterPolicy,
    NoiseModel, SyntheticScenario,
};
use speedpower_core::eval::weather_correct;
use speedpower_core::waves::{TheoryRegistry, ValidityMode};
use speedpower_core::VoyageRecord;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn same_record(a: &VoyageRecord, b: &VoyageRecord) -> bool {
    let (ea, eb) = (&a.environment, &b.environment);
    a.timestamp == b.timestamp
        && [
            (a.stw, b.stw),
            (a.sog, b.sog),
            (a.heading, b.heading),
            (a.draft_aft, b.draft_aft),
            (a.draft_fwd, b.draft_fwd),
            (a.displacement, b.displacement),
            (a.brake_power, b.brake_power),
            (ea.wind_speed_rel, eb.wind_speed_rel),
            (ea.wind_dir_rel, eb.wind_dir_rel),
            (ea.sig_wave_height, eb.sig_wave_height),
            (ea.wave_peak_period, eb.wave_peak_period),
            (ea.wave_dir_rel, eb.wave_dir_rel),
            (ea.water_density, eb.water_density),
            (ea.air_density, eb.air_density),
        ]
        .iter()
        .all(|&(x, y)| close(x, y))
        && a.water_depth.is_some() == b.water_depth.is_some()
}

fn scenario(n: usize, seed: u64) -> SyntheticScenario {
    SyntheticScenario::reference(n, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn csv_round_trip_preserves_values(seed in any::<u64>(), n in 0usize..60) {
        let records = generate(&scenario(n, seed)).unwrap();
        let mut first = Vec::new();
        write_csv(&mut first, &records).unwrap();
        let back = read_csv(first.as_slice()).unwrap();
        prop_assert!(back.report.is_empty());
        prop_assert_eq!(back.records.len(), records.len());
        for (a, b) in records.iter().zip(&back.records) {
            prop_assert!(same_record(a, b), "{a:?}\n{b:?}");
        }
    }

    #[test]
    fn filtering_twice_changes_nothing(seed in any::<u64>(), n in 1usize..300) {
        let records = generate(&scenario(n, seed)).unwrap();
        let policy = FilterPolicy::default();
        let once = filter_steady_state(&records, &policy).unwrap();
        let twice = filter_steady_state(&once.kept, &policy).unwrap();
        prop_assert_eq!(once.counts.total() + once.kept.len(), records.len());
        prop_assert_eq!(&twice.kept, &once.kept);
    }

    #[test]
    fn calm_subset_respects_threshold(seed in any::<u64>(), hs_max in 0.2f64..3.0) {
        let records = generate(&scenario(200, seed)).unwrap();
        let policy = FilterPolicy { calm_weather_hs_max: hs_max, ..FilterPolicy::default() };
        let calm = calm_weather_subset(&records, &policy);
        prop_assert!(calm.iter().all(|r| r.environment.sig_wave_height <= hs_max));
        let expected = records.iter().filter(|r| r.environment.sig_wave_height <= hs_max).count();
        prop_assert!(calm.len() <= expected);
    }
}

#[test]
fn correction_recovers_noiseless_calm_power() {
    let mut s = scenario(500, 11);
    s.noise = NoiseModel::noiseless();
    let records = generate(&s).unwrap();
    let theory = TheoryRegistry::with_builtins().get(&s.wave_theory).unwrap();
    let wind = s.wind.setup(&s.vessel).unwrap();
    let out = weather_correct(
        &records,
        &s.vessel,
        &wind,
        theory.as_ref(),
        ValidityMode::ExtrapolateWithFlag,
    )
    .unwrap();
    assert_eq!(out.out_of_validity, 0);
    assert_eq!(out.points.len() + out.dropped_non_positive, records.len());
    for p in &out.points {
        let truth = s.truth.predict(p.stw, p.draft_mean).unwrap();
        approx::assert_relative_eq!(p.calm_power, truth, max_relative = 1e-9);
    }
}
