use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::segmentation::detect_breakpoints;
use super::{smooth_step, Breakpoint, CalmWaterModel};
use crate::error::{Error, Result};

/// One weather-corrected observation used for the calm-water regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalmPoint {
    pub stw: f64,
    pub draft_mean: f64,
    pub calm_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub n_points: usize,
    /// Residual sum of squares of `ln P`.
    pub residual_sse: f64,
    /// Speed exponent of each segment, evaluated at `mean_draft`.
    pub effective_exponents: Vec<f64>,
    pub mean_draft: f64,
}

/// Relative residual below which a column counts as a linear combination
/// of the columns before it.
const COLLINEARITY_TOLERANCE: f64 = 1e-9;

fn column_names(n_breakpoints: usize) -> Vec<String> {
    let mut names = vec![
        "ln_x1 (intercept)".to_string(),
        "x2 (ln V)".to_string(),
        "x3 (T)".to_string(),
        "x4 (T ln V)".to_string(),
    ];
    names.extend((0..n_breakpoints).map(|j| format!("x5[{j}] (breakpoint {j})")));
    names
}

/// Names every column that lies (numerically) in the span of the columns to
/// its left. Modified Gram–Schmidt with one re-orthogonalisation pass.
fn collinear_columns(design: &DMatrix<f64>, names: &[String]) -> Vec<String> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut bad = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let col = design.column(j).into_owned();
        let norm = col.norm();
        if norm == 0.0 {
            bad.push(name.clone());
            continue;
        }
        let mut r = col / norm;
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&r);
                r -= q * proj;
            }
        }
        let rn = r.norm();
        if rn < COLLINEARITY_TOLERANCE {
            bad.push(name.clone());
        } else {
            basis.push(r / rn);
        }
    }
    bad
}

/// Least-squares fit of the breakpoint power law in log space.
///
/// `breakpoints` are speeds in m/s; the smoothing width `delta` is held fixed.
pub fn fit(
    points: &[CalmPoint],
    breakpoints: &[f64],
    delta: f64,
) -> Result<(CalmWaterModel, FitDiagnostics)> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "smoothing delta must be > 0, got {delta}"
        )));
    }
    let needed = 5 + breakpoints.len();
    if points.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: points.len(),
        });
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.stw > 0.0 && p.calm_power > 0.0 && p.draft_mean.is_finite()))
    {
        return Err(Error::Domain(format!(
            "fit requires stw > 0 and calm_power > 0 (got stw {}, power {})",
            p.stw, p.calm_power
        )));
    }
    if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    let (v_min, v_max) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.stw), hi.max(p.stw))
        });
    if let Some(bp) = breakpoints.iter().find(|&&b| !(b >= v_min && b <= v_max)) {
        return Err(Error::InvalidParameter(format!(
            "breakpoint {bp} m/s lies outside the fitted speed range [{v_min}, {v_max}]"
        )));
    }

    let n = points.len();
    let ncols = 4 + breakpoints.len();
    let mut design = DMatrix::<f64>::zeros(n, ncols);
    let mut target = DVector::<f64>::zeros(n);
    for (i, p) in points.iter().enumerate() {
        let ln_v = p.stw.ln();
        design[(i, 0)] = 1.0;
        design[(i, 1)] = ln_v;
        design[(i, 2)] = p.draft_mean;
        design[(i, 3)] = ln_v * p.draft_mean;
        for (j, &bp) in breakpoints.iter().enumerate() {
            design[(i, 4 + j)] = (ln_v - bp.ln()) * smooth_step(p.stw, bp, delta);
        }
        target[i] = p.calm_power.ln();
    }

    let names = column_names(breakpoints.len());
    let collinear = collinear_columns(&design, &names);
    if !collinear.is_empty() {
        return Err(Error::DegenerateFit { columns: collinear });
    }

    // Equilibrate columns, then solve R x = Qᵀ y from a thin QR.
    let scales: Vec<f64> = (0..ncols).map(|j| design.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        design.column_mut(j).scale_mut(1.0 / s);
    }
    let qr = design.clone().qr();
    let qty = qr.q().transpose() * &target;
    let scaled = qr
        .r()
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::DegenerateFit {
            columns: names.clone(),
        })?;
    let coef: Vec<f64> = scaled.iter().zip(&scales).map(|(c, s)| c / s).collect();

    let model = CalmWaterModel {
        ln_x1: coef[0],
        x2: coef[1],
        x3: coef[2],
        x4: coef[3],
        breakpoints: breakpoints
            .iter()
            .zip(&coef[4..])
            .map(|(&speed, &x5)| Breakpoint { speed, x5 })
            .collect(),
        smoothing_delta: delta,
    };

    let residual_sse = points
        .iter()
        .map(|p| {
            let r = p.calm_power.ln() - model.log_predict(p.stw, p.draft_mean).unwrap_or(f64::NAN);
            r * r
        })
        .sum();
    let mean_draft = points.iter().map(|p| p.draft_mean).sum::<f64>() / n as f64;
    let effective_exponents = (0..=breakpoints.len())
        .map(|s| model.segment_exponent(s, mean_draft))
        .collect();

    Ok((
        model,
        FitDiagnostics {
            n_points: n,
            residual_sse,
            effective_exponents,
            mean_draft,
        },
    ))
}

/// Powers rescaled to the mean draft with the draft terms of a
/// breakpoint-free fit, so that segmentation sees only the speed trend.
/// Falls back to the raw powers when the drafts cannot be resolved.
fn draft_normalised_powers(sorted: &[CalmPoint], delta: f64) -> Vec<f64> {
    let raw = || sorted.iter().map(|p| p.calm_power).collect();
    let Ok((m, d)) = fit(sorted, &[], delta) else {
        return raw();
    };
    sorted
        .iter()
        .map(|p| p.calm_power * (-(m.x3 + m.x4 * p.stw.ln()) * (p.draft_mean - d.mean_draft)).exp())
        .collect()
}

/// Sorts by speed, detects `k` breakpoints on draft-normalised powers, then
/// fits all coefficients.
pub fn fit_with_detection(
    points: &[CalmPoint],
    k: usize,
    min_segment: usize,
    delta: f64,
) -> Result<(CalmWaterModel, FitDiagnostics)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.stw.total_cmp(&b.stw));
    let breakpoints = if k == 0 {
        Vec::new()
    } else {
        let speeds: Vec<f64> = sorted.iter().map(|p| p.stw).collect();
        let powers = draft_normalised_powers(&sorted, delta);
        detect_breakpoints(&speeds, &powers, k, min_segment)?.speeds
    };
    fit(&sorted, &breakpoints, delta)
}
