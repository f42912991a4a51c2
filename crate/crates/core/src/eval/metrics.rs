use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which value divides the absolute error in MAPE.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapeDenominator {
    /// `|P − P̂| / P̂`.
    #[default]
    Predicted,
    /// `|P − P̂| / P`, the textbook variant.
    Actual,
}

/// MAE and MBE in watts, MAPE as a fraction. `r2` is `None` when the
/// actual values are constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub mae: f64,
    pub mape: f64,
    pub mbe: f64,
    pub r2: Option<f64>,
    pub n: usize,
}

fn check_lengths(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch(format!(
            "{} actual vs {} predicted values",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::LengthMismatch(
            "metrics need at least one value".into(),
        ));
    }
    Ok(())
}

/// Absolute percentage error of each pair, as fractions.
pub fn absolute_percentage_errors(
    actual: &[f64],
    predicted: &[f64],
    denom: MapeDenominator,
) -> Result<Vec<f64>> {
    check_lengths(actual, predicted)?;
    actual
        .iter()
        .zip(predicted)
        .enumerate()
        .map(|(i, (&p, &q))| {
            let d = match denom {
                MapeDenominator::Predicted => q,
                MapeDenominator::Actual => p,
            };
            if d == 0.0 {
                Err(Error::MapeUndefined(i))
            } else {
                Ok(((p - q) / d).abs())
            }
        })
        .collect()
}

/// All four metrics; R2 is left undefined rather than failing when the
/// actual values are constant.
pub fn metrics_partial(
    actual: &[f64],
    predicted: &[f64],
    denom: MapeDenominator,
) -> Result<MetricReport> {
    let ape = absolute_percentage_errors(actual, predicted, denom)?;
    let n = actual.len() as f64;
    let mae = actual
        .iter()
        .zip(predicted)
        .map(|(p, q)| (p - q).abs())
        .sum::<f64>()
        / n;
    let mbe = actual
        .iter()
        .zip(predicted)
        .map(|(p, q)| q - p)
        .sum::<f64>()
        / n;
    let mape = ape.iter().sum::<f64>() / n;
    let mean = actual.iter().sum::<f64>() / n;
    let ss_tot: f64 = actual.iter().map(|p| (p - mean).powi(2)).sum();
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(p, q)| (p - q).powi(2))
        .sum();
    let r2 = (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot);
    Ok(MetricReport {
        mae,
        mape,
        mbe,
        r2,
        n: actual.len(),
    })
}

/// MAE, MAPE (predicted-value denominator), MBE (`P̂ − P`) and R2.
pub fn metrics(actual: &[f64], predicted: &[f64]) -> Result<MetricReport> {
    metrics_with(actual, predicted, MapeDenominator::Predicted)
}

pub fn metrics_with(
    actual: &[f64],
    predicted: &[f64],
    denom: MapeDenominator,
) -> Result<MetricReport> {
    let report = metrics_partial(actual, predicted, denom)?;
    if report.r2.is_none() {
        return Err(Error::R2Undefined);
    }
    Ok(report)
}

/// Unweighted mean of several reports; R2 averages the defined values.
pub fn mean_report(reports: &[MetricReport]) -> Option<MetricReport> {
    if reports.is_empty() {
        return None;
    }
    let k = reports.len() as f64;
    let r2s: Vec<f64> = reports.iter().filter_map(|r| r.r2).collect();
    Some(MetricReport {
        mae: reports.iter().map(|r| r.mae).sum::<f64>() / k,
        mape: reports.iter().map(|r| r.mape).sum::<f64>() / k,
        mbe: reports.iter().map(|r| r.mbe).sum::<f64>() / k,
        r2: (!r2s.is_empty()).then(|| r2s.iter().sum::<f64>() / r2s.len() as f64),
        n: reports.iter().map(|r| r.n).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn hand_example() {
        let m = metrics(&[100.0, 200.0], &[110.0, 190.0]).unwrap();
        assert_eq!(m.mae, 10.0);
        assert_relative_eq!(
            m.mape,
            (10.0 / 110.0 + 10.0 / 190.0) / 2.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(m.mape, 0.07177, epsilon = 5e-6);
        assert_eq!(m.mbe, 0.0);
        assert_relative_eq!(m.r2.unwrap(), 0.96, epsilon = 1e-15);
        assert_eq!(m.n, 2);
    }

    #[test]
    fn perfect_and_mean_predictors() {
        let p = [3.0, 5.0, 9.0, 4.0];
        let m = metrics(&p, &p).unwrap();
        assert_eq!((m.mae, m.mape, m.mbe, m.r2), (0.0, 0.0, 0.0, Some(1.0)));
        let mean = p.iter().sum::<f64>() / 4.0;
        assert_eq!(metrics(&p, &[mean; 4]).unwrap().r2, Some(0.0));
        assert!(metrics(&p, &[100.0, -50.0, 0.5, 30.0]).unwrap().r2.unwrap() < 0.0);
    }

    #[test]
    fn mape_is_asymmetric() {
        let a = metrics(&[100.0, 200.0], &[110.0, 190.0]).unwrap().mape;
        let b = metrics(&[110.0, 190.0], &[100.0, 200.0]).unwrap().mape;
        assert!((a - b).abs() > 1e-4);
        let conventional = metrics_with(&[100.0, 200.0], &[110.0, 190.0], MapeDenominator::Actual)
            .unwrap()
            .mape;
        assert_relative_eq!(conventional, 0.075, epsilon = 1e-15);
    }

    #[test]
    fn over_prediction_gives_positive_bias() {
        assert!(metrics(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap().mbe > 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            metrics(&[1.0, 2.0], &[1.0, 0.0]),
            Err(Error::MapeUndefined(1))
        ));
        assert!(matches!(
            metrics(&[5.0, 5.0], &[4.0, 6.0]),
            Err(Error::R2Undefined)
        ));
        assert!(matches!(
            metrics(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch(_))
        ));
        assert!(metrics(&[], &[]).is_err());
    }

    proptest! {
        #[test]
        fn invariants(pairs in proptest::collection::vec((1.0f64..1e4, 1.0f64..1e4), 2..50)) {
            let (a, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let m = metrics_partial(&a, &p, MapeDenominator::Predicted).unwrap();
            prop_assert!(m.mae >= 0.0 && m.mape >= 0.0);
            if let Some(r2) = m.r2 {
                prop_assert!(r2 <= 1.0);
            }
        }
    }
}
