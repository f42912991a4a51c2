//! Binary segmentation of a speed-sorted power series.
//!
//! The cost of a segment is the residual sum of squares of a straight-line
//! fit in `(ln V, ln P)`. Each step splits the segment whose best split
//! removes the most cost. Segment costs come from prefix sums, so one pass
//! over a segment's candidate splits is linear in its length.

use crate::error::{Error, Result};

/// Split positions as indices into the sorted series (first index of the
/// right-hand segment) and the corresponding breakpoint speeds.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    pub split_indices: Vec<usize>,
    pub speeds: Vec<f64>,
}

struct PrefixSums {
    x: Vec<f64>,
    y: Vec<f64>,
    xx: Vec<f64>,
    xy: Vec<f64>,
    yy: Vec<f64>,
}

impl PrefixSums {
    fn new(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        // center first so the prefix sums do not lose the signal to cancellation
        let mx = xs.iter().sum::<f64>() / n as f64;
        let my = ys.iter().sum::<f64>() / n as f64;
        let mut p = PrefixSums {
            x: Vec::with_capacity(n + 1),
            y: Vec::with_capacity(n + 1),
            xx: Vec::with_capacity(n + 1),
            xy: Vec::with_capacity(n + 1),
            yy: Vec::with_capacity(n + 1),
        };
        let (mut sx, mut sy, mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        p.x.push(0.0);
        p.y.push(0.0);
        p.xx.push(0.0);
        p.xy.push(0.0);
        p.yy.push(0.0);
        for (&x, &y) in xs.iter().zip(ys) {
            let (x, y) = (x - mx, y - my);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            syy += y * y;
            p.x.push(sx);
            p.y.push(sy);
            p.xx.push(sxx);
            p.xy.push(sxy);
            p.yy.push(syy);
        }
        p
    }

    /// Line-fit residual sum of squares on `[start, end)`.
    fn cost(&self, start: usize, end: usize) -> f64 {
        let n = (end - start) as f64;
        if end - start < 2 {
            return 0.0;
        }
        let sx = self.x[end] - self.x[start];
        let sy = self.y[end] - self.y[start];
        let sxx = self.xx[end] - self.xx[start] - sx * sx / n;
        let sxy = self.xy[end] - self.xy[start] - sx * sy / n;
        let syy = self.yy[end] - self.yy[start] - sy * sy / n;
        let sse = if sxx > 1e-14 * (1.0 + self.xx[end] - self.xx[start]) {
            syy - sxy * sxy / sxx
        } else {
            syy
        };
        sse.max(0.0)
    }

    /// Best split of `[start, end)` with both sides at least `min_len` long,
    /// as `(split_index, gain)`.
    fn best_split(&self, start: usize, end: usize, min_len: usize) -> Option<(usize, f64)> {
        if end - start < 2 * min_len {
            return None;
        }
        let total = self.cost(start, end);
        let mut best: Option<(usize, f64)> = None;
        for split in (start + min_len)..=(end - min_len) {
            let gain = total - self.cost(start, split) - self.cost(split, end);
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((split, gain));
            }
        }
        best
    }
}

/// Indices of `k` greedy binary-segmentation splits of `(xs, ys)`.
pub fn segment_split_indices(
    xs: &[f64],
    ys: &[f64],
    k: usize,
    min_segment: usize,
) -> Result<Vec<usize>> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(format!(
            "{} speeds vs {} powers",
            xs.len(),
            ys.len()
        )));
    }
    let min_segment = min_segment.max(2);
    let needed = (k + 1) * min_segment;
    if xs.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: xs.len(),
        });
    }
    let prefix = PrefixSums::new(xs, ys);
    let mut segments = vec![(0usize, xs.len())];
    let mut splits = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, usize, f64)> = None;
        for (seg_idx, &(start, end)) in segments.iter().enumerate() {
            if let Some((split, gain)) = prefix.best_split(start, end, min_segment) {
                if best.is_none_or(|(_, _, g)| gain > g) {
                    best = Some((seg_idx, split, gain));
                }
            }
        }
        let Some((seg_idx, split, _)) = best else {
            return Err(Error::InsufficientData {
                needed,
                got: xs.len(),
            });
        };
        let (start, end) = segments.remove(seg_idx);
        segments.push((start, split));
        segments.push((split, end));
        splits.push(split);
    }
    splits.sort_unstable();
    Ok(splits)
}

/// Detects `k` change points in the exponent of a speed-sorted power series.
///
/// `speeds` must be ascending; each returned breakpoint speed is the midpoint
/// between the last sample of one segment and the first sample of the next.
pub fn detect_breakpoints(
    speeds: &[f64],
    powers: &[f64],
    k: usize,
    min_segment: usize,
) -> Result<SegmentationResult> {
    if speeds.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "speeds must be sorted ascending".into(),
        ));
    }
    if speeds.iter().chain(powers).any(|&v| !(v > 0.0)) {
        return Err(Error::Domain(
            "speeds and powers must be > 0 for log-space segmentation".into(),
        ));
    }
    let xs: Vec<f64> = speeds.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = powers.iter().map(|p| p.ln()).collect();
    let split_indices = segment_split_indices(&xs, &ys, k, min_segment)?;
    let speeds = split_indices
        .iter()
        .map(|&i| 0.5 * (speeds[i - 1] + speeds[i]))
        .collect();
    Ok(SegmentationResult {
        split_indices,
        speeds,
    })
}
