use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{mean_report, metrics_partial, MapeDenominator, MetricReport};
use crate::domain::VoyageRecord;
use crate::error::{Error, Result};
use crate::mlmodel::{engineer_features, FnnModel};

/// Anything that predicts brake power in watts for a record.
pub trait Predictor: Send + Sync {
    fn predict(&self, r: &VoyageRecord) -> Result<f64>;
}

impl<F> Predictor for F
where
    F: Fn(&VoyageRecord) -> Result<f64> + Send + Sync,
{
    fn predict(&self, r: &VoyageRecord) -> Result<f64> {
        self(r)
    }
}

impl Predictor for FnnModel {
    fn predict(&self, r: &VoyageRecord) -> Result<f64> {
        self.forward(&engineer_features(r))
    }
}

/// Shuffles `0..n` with `seed` and cuts it into `k` folds whose sizes
/// differ by at most one.
pub fn kfold_assignments(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Fold(format!("k must be >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::Fold(format!(
            "k = {k} exceeds the number of records ({n})"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFoldReport {
    pub folds: Vec<MetricReport>,
    /// Unweighted mean over folds.
    pub mean: MetricReport,
    pub assignment: Vec<Vec<usize>>,
}

/// Trains on `k − 1` folds and scores the held-out one, for every fold.
pub fn kfold_evaluate<P, F>(
    records: &[VoyageRecord],
    k: usize,
    seed: u64,
    denom: MapeDenominator,
    mut trainer: F,
) -> Result<KFoldReport>
where
    P: Predictor,
    F: FnMut(&[VoyageRecord]) -> Result<P>,
{
    let assignment = kfold_assignments(records.len(), k, seed)?;
    let mut in_fold = vec![0usize; records.len()];
    for (f, fold) in assignment.iter().enumerate() {
        for &i in fold {
            in_fold[i] = f;
        }
    }
    let mut folds = Vec::with_capacity(k);
    for (f, fold) in assignment.iter().enumerate() {
        let train: Vec<VoyageRecord> = records
            .iter()
            .zip(&in_fold)
            .filter(|(_, &g)| g != f)
            .map(|(r, _)| r.clone())
            .collect();
        let model = trainer(&train)?;
        let actual: Vec<f64> = fold.iter().map(|&i| records[i].brake_power).collect();
        let predicted = fold
            .iter()
            .map(|&i| model.predict(&records[i]))
            .collect::<Result<Vec<f64>>>()?;
        folds.push(metrics_partial(&actual, &predicted, denom)?);
    }
    let mean = mean_report(&folds).expect("k >= 2 folds");
    Ok(KFoldReport {
        folds,
        mean,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate, SyntheticScenario};
    use proptest::prelude::*;

    #[test]
    fn leave_one_out() {
        let folds = kfold_assignments(10, 10, 1).unwrap();
        assert_eq!(folds.len(), 10);
        assert!(folds.iter().all(|f| f.len() == 1));
    }

    #[test]
    fn errors() {
        assert!(matches!(kfold_assignments(3, 4, 0), Err(Error::Fold(_))));
        assert!(matches!(kfold_assignments(3, 1, 0), Err(Error::Fold(_))));
    }

    #[test]
    fn perfect_oracle_and_determinism() {
        let recs = generate(&SyntheticScenario::reference(50, 1)).unwrap();
        let oracle = |_: &[VoyageRecord]| Ok(|r: &VoyageRecord| Ok(r.brake_power));
        let a = kfold_evaluate(&recs, 5, 9, MapeDenominator::Predicted, oracle).unwrap();
        assert_eq!(a.mean.mape, 0.0);
        assert_eq!(a.folds.len(), 5);
        let b = kfold_evaluate(&recs, 5, 9, MapeDenominator::Predicted, oracle).unwrap();
        assert_eq!(a, b);
        let loo = kfold_evaluate(&recs[..10], 10, 9, MapeDenominator::Predicted, oracle).unwrap();
        assert_eq!(loo.folds.len(), 10);
        assert!(loo.folds.iter().all(|f| f.n == 1 && f.r2.is_none()));
    }

    #[test]
    fn trainer_never_sees_held_out_records() {
        let recs = generate(&SyntheticScenario::reference(40, 2)).unwrap();
        let report = kfold_evaluate(
            &recs,
            4,
            3,
            MapeDenominator::Predicted,
            |train: &[VoyageRecord]| {
                let seen: Vec<_> = train.iter().map(|r| r.timestamp).collect();
                Ok(move |r: &VoyageRecord| {
                    assert!(!seen.contains(&r.timestamp));
                    Ok(r.brake_power)
                })
            },
        )
        .unwrap();
        assert_eq!(report.mean.n, 40);
    }

    proptest! {
        #[test]
        fn folds_partition(n in 2usize..300, k in 2usize..12, seed in 0u64..1000) {
            prop_assume!(k <= n);
            let folds = kfold_assignments(n, k, seed).unwrap();
            let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
