use std::cmp::Ordering;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kfold::Predictor;
use super::metrics::{metrics_partial, MapeDenominator, MetricReport};
use crate::calmwater::CalmWaterModel;
use crate::correction::{added_power, added_resistance};
use crate::domain::{VesselParticulars, VoyageRecord};
use crate::error::{Error, Result};
use crate::mlmodel::FnnModel;
use crate::waves::{ValidityMode, WaveTheory};
use crate::wind::WindSetup;

/// Column holding calm-water predictions without any weather correction.
pub const NO_CORRECTION: &str = "no-correction";
/// Row (and column) name of the network's cell.
pub const NN_ROW: &str = "nn";

/// Calm-water model plus wind and (optionally) wave corrections.
#[derive(Clone)]
pub struct PhysicsPredictor {
    pub calm: CalmWaterModel,
    pub vessel: VesselParticulars,
    pub wind: WindSetup,
    /// `None` predicts calm-water power only.
    pub theory: Option<Arc<dyn WaveTheory>>,
}

impl PhysicsPredictor {
    /// Prediction and whether the wave theory was inside its validity range.
    /// Outside it the wave correction is left out.
    pub fn predict_flagged(&self, r: &VoyageRecord) -> Result<(f64, bool)> {
        let calm = self.calm.predict(r.stw, r.mean_draft())?;
        let Some(theory) = &self.theory else {
            return Ok((calm, true));
        };
        let added = added_resistance(
            r,
            &self.vessel,
            &self.wind,
            theory.as_ref(),
            ValidityMode::ExtrapolateWithFlag,
        )?;
        Ok((
            calm + added_power(&added, r.stw, &self.vessel),
            added.wave_in_validity,
        ))
    }
}

impl Predictor for PhysicsPredictor {
    fn predict(&self, r: &VoyageRecord) -> Result<f64> {
        self.predict_flagged(r).map(|(p, _)| p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalmCandidate {
    pub name: String,
    pub model: CalmWaterModel,
}

pub struct BenchmarkSetup<'a> {
    pub vessel: &'a VesselParticulars,
    pub wind: &'a WindSetup,
    pub theories: Vec<Arc<dyn WaveTheory>>,
    pub calm_models: Vec<CalmCandidate>,
    pub nn: Option<&'a FnnModel>,
    pub denominator: MapeDenominator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCell {
    pub row: String,
    pub column: String,
    /// `None` when the cell is flagged or its metrics are undefined.
    pub report: Option<MetricReport>,
    /// Records predicted without a wave correction because the theory was
    /// outside its validity range.
    pub out_of_validity: usize,
    /// Every record was outside the theory's validity range.
    pub flagged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BenchmarkCell {
    pub fn mape(&self) -> Option<f64> {
        self.report.map(|r| r.mape)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkMatrix {
    pub cells: Vec<BenchmarkCell>,
}

impl BenchmarkMatrix {
    pub fn get(&self, row: &str, column: &str) -> Option<&BenchmarkCell> {
        self.cells
            .iter()
            .find(|c| c.row == row && c.column == column)
    }

    pub fn rows(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.row) {
                out.push(c.row.clone());
            }
        }
        out
    }

    pub fn columns(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.column) {
                out.push(c.column.clone());
            }
        }
        out
    }
}

/// Orders records by every field the benchmark reads, so that the input
/// order cannot change any sum.
fn canonical_order(records: &[VoyageRecord]) -> Vec<&VoyageRecord> {
    let key = |r: &VoyageRecord| {
        let e = &r.environment;
        [
            r.stw,
            r.sog,
            r.draft_aft,
            r.draft_fwd,
            r.brake_power,
            e.wind_speed_rel,
            e.wind_dir_rel,
            e.sig_wave_height,
            e.wave_peak_period,
            e.wave_dir_rel,
        ]
    };
    let mut sorted: Vec<&VoyageRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.timestamp.cmp(&b.timestamp).then_with(|| {
            key(a)
                .iter()
                .zip(key(b))
                .map(|(x, y)| x.total_cmp(&y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });
    sorted
}

fn score(
    row: &str,
    column: &str,
    actual: &[f64],
    predicted: Result<Vec<(f64, bool)>>,
    denom: MapeDenominator,
) -> BenchmarkCell {
    let mut cell = BenchmarkCell {
        row: row.to_string(),
        column: column.to_string(),
        report: None,
        out_of_validity: 0,
        flagged: false,
        note: None,
    };
    let predicted = match predicted {
        Ok(p) => p,
        Err(e) => {
            cell.note = Some(e.to_string());
            return cell;
        }
    };
    cell.out_of_validity = predicted.iter().filter(|(_, ok)| !ok).count();
    if !predicted.is_empty() && cell.out_of_validity == predicted.len() {
        cell.flagged = true;
        cell.note = Some("all records outside the theory's validity range".into());
        return cell;
    }
    let values: Vec<f64> = predicted.iter().map(|(p, _)| *p).collect();
    match metrics_partial(actual, &values, denom) {
        Ok(r) => cell.report = Some(r),
        Err(e) => cell.note = Some(e.to_string()),
    }
    cell
}

/// Scores every calm model against every wave theory (with wind), a
/// no-correction column per calm model, and optionally the network.
pub fn benchmark(records: &[VoyageRecord], setup: &BenchmarkSetup<'_>) -> Result<BenchmarkMatrix> {
    if setup.theories.is_empty() || setup.calm_models.is_empty() {
        return Err(Error::InvalidParameter(
            "benchmark needs at least one wave theory and one calm-water model".into(),
        ));
    }
    let ordered = canonical_order(records);
    let actual: Vec<f64> = ordered.iter().map(|r| r.brake_power).collect();

    let mut jobs: Vec<(String, String, Option<PhysicsPredictor>)> = Vec::new();
    for calm in &setup.calm_models {
        for theory in setup.theories.iter().map(Some).chain([None]) {
            let column = theory.map_or(NO_CORRECTION.to_string(), |t| t.name().to_string());
            let predictor = PhysicsPredictor {
                calm: calm.model.clone(),
                vessel: *setup.vessel,
                wind: setup.wind.clone(),
                theory: theory.cloned(),
            };
            jobs.push((calm.name.clone(), column, Some(predictor)));
        }
    }
    if setup.nn.is_some() {
        jobs.push((NN_ROW.to_string(), NN_ROW.to_string(), None));
    }

    let cells = jobs
        .par_iter()
        .map(|(row, column, predictor)| {
            let predicted: Result<Vec<(f64, bool)>> = ordered
                .iter()
                .map(|r| match predictor {
                    Some(p) => p.predict_flagged(r),
                    None => setup
                        .nn
                        .expect("nn job only when a model is given")
                        .predict(r)
                        .map(|p| (p, true)),
                })
                .collect();
            score(row, column, &actual, predicted, setup.denominator)
        })
        .collect();
    Ok(BenchmarkMatrix { cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate, NoiseModel, SyntheticScenario};
    use crate::units::deg_to_rad;
    use crate::waves::TheoryRegistry;

    fn run(s: &SyntheticScenario, recs: &[VoyageRecord]) -> BenchmarkMatrix {
        let reg = TheoryRegistry::with_builtins();
        let wind = s.wind.setup(&s.vessel).unwrap();
        let setup = BenchmarkSetup {
            vessel: &s.vessel,
            wind: &wind,
            theories: reg.names().iter().map(|n| reg.get(n).unwrap()).collect(),
            calm_models: vec![CalmCandidate {
                name: "truth".into(),
                model: s.truth.clone(),
            }],
            nn: None,
            denominator: MapeDenominator::Predicted,
        };
        benchmark(recs, &setup).unwrap()
    }

    #[test]
    fn generating_theory_wins_on_noiseless_data() {
        let s = SyntheticScenario {
            noise: NoiseModel::noiseless(),
            ..SyntheticScenario::reference(600, 5)
        };
        let recs = generate(&s).unwrap();
        let m = run(&s, &recs);
        let own = m
            .get("truth", "kreitner-directional")
            .unwrap()
            .mape()
            .unwrap();
        assert!(own < 1e-3, "{own}");
        for col in ["kreitner", "stawave1", NO_CORRECTION] {
            let other = m.get("truth", col).unwrap();
            assert!(other.mape().unwrap() > own, "{col}");
        }
        assert!(m.get("truth", "stawave1").unwrap().out_of_validity > 0);
        assert!(m.get(NN_ROW, NN_ROW).is_none());
    }

    #[test]
    fn all_out_of_validity_is_flagged() {
        let s = SyntheticScenario::reference(30, 6);
        let mut recs = generate(&s).unwrap();
        for r in &mut recs {
            r.environment.wave_dir_rel = deg_to_rad(60.0);
        }
        let m = run(&s, &recs);
        let cell = m.get("truth", "stawave1").unwrap();
        assert!(cell.flagged);
        assert!(cell.mape().is_none());
        assert_eq!(cell.out_of_validity, 30);
        assert!(!m.get("truth", "kreitner-directional").unwrap().flagged);
    }

    #[test]
    fn order_independent() {
        let s = SyntheticScenario::reference(200, 7);
        let recs = generate(&s).unwrap();
        let mut shuffled = recs.clone();
        shuffled.reverse();
        shuffled.swap(3, 77);
        assert_eq!(run(&s, &recs), run(&s, &shuffled));
    }
}
