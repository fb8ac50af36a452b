use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fit::{clamp_dim, least_squares, DimensionEstimate, EstimatorKind};
use crate::measure::{DiscreteMeasure, ScaleWindow};

/// Consecutive scales per sliding window for the lower/upper proxies.
const SLIDING_WINDOW: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountEstimate {
    /// Fit over the whole window.
    pub estimate: DimensionEstimate,
    /// Smallest and largest slope over sliding sub-windows, clamped.
    pub lower: f64,
    pub upper: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Occupied-cell counts on origin-anchored grids of side δ for every δ in
/// `window`; slope of `log N_δ` against `−log δ`. Weights are ignored.
pub fn box_counting(measure: &DiscreteMeasure, window: &ScaleWindow) -> Result<BoxCountEstimate> {
    let scales = window.check(measure)?;
    let counts: Vec<usize> = scales.iter().map(|&d| occupied_cells(measure, d)).collect();
    let xs: Vec<f64> = scales.iter().map(|d| -d.log2()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).log2()).collect();
    let fit = least_squares(&xs, &ys)?;
    let dim = measure.dim();
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    let w = SLIDING_WINDOW.min(scales.len());
    for start in 0..=scales.len() - w {
        let s = least_squares(&xs[start..start + w], &ys[start..start + w])?.slope;
        lower = lower.min(s);
        upper = upper.max(s);
    }
    let n = scales.len();
    Ok(BoxCountEstimate {
        estimate: DimensionEstimate::new(
            EstimatorKind::BoxCounting,
            fit.slope,
            dim,
            fit.rms,
            (scales[n - 1], scales[0]),
            n,
        ),
        lower: clamp_dim(lower, dim),
        upper: clamp_dim(upper, dim),
        scales,
        counts,
    })
}

fn occupied_cells(measure: &DiscreteMeasure, delta: f64) -> usize {
    let mut keys: Vec<(i64, i64)> = measure
        .points()
        .map(|p| ((p[0] / delta).floor() as i64, (p[1] / delta).floor() as i64))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}
