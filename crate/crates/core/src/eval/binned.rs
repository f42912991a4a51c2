use serde::{Deserialize, Serialize};

use super::metrics::{absolute_percentage_errors, MapeDenominator};
use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// `None` for empty bins.
    pub mape: Option<f64>,
    /// Population standard deviation of the percentage errors; `None` when
    /// the bin is empty.
    pub std: Option<f64>,
}

/// MAPE in equal-width bins of `x` (typically speed). The last bin is
/// closed on the right so the maximum lands in it.
pub fn binned_mape(
    x: &[f64],
    actual: &[f64],
    predicted: &[f64],
    bins: usize,
    denom: MapeDenominator,
) -> Result<Vec<Bin>> {
    if bins == 0 {
        return Err(Error::InvalidParameter(
            "number of bins must be positive".into(),
        ));
    }
    if x.len() != actual.len() {
        return Err(Error::LengthMismatch(format!(
            "{} bin keys vs {} values",
            x.len(),
            actual.len()
        )));
    }
    let ape = absolute_percentage_errors(actual, predicted, denom)?;
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain("bin keys must be finite".into()));
    }
    let width = (hi - lo) / bins as f64;
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for (&xi, &e) in x.iter().zip(&ape) {
        let b = if width > 0.0 {
            (((xi - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        members[b].push(e);
    }
    Ok(members
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let count = m.len();
            let mean = (count > 0).then(|| m.iter().sum::<f64>() / count as f64);
            let std = mean
                .map(|mu| (m.iter().map(|e| (e - mu).powi(2)).sum::<f64>() / count as f64).sqrt());
            Bin {
                lo: lo + width * i as f64,
                hi: if i + 1 == bins {
                    hi
                } else {
                    lo + width * (i + 1) as f64
                },
                count,
                mape: mean,
                std,
            }
        })
        .collect())
}
