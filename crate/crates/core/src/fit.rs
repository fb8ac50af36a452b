//! Log-log regression shared by every dimension estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least-squares line through `(x, y)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the vertical residuals.
    pub rms: f64,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("ys", "length differs from xs"));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewScales {
            found: xs.len(),
            required: 2,
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::invalid("xs", "all abscissae coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        rms: (ss / n).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// Decay of the Fourier envelope; `slope` is the decay rate β.
    Fourier,
    /// Growth of the maximal ball mass; `slope` is the ball-mass exponent.
    Frostman,
    /// Growth of occupied grid cells; `slope` is the box-counting exponent.
    BoxCounting,
}

/// A fitted exponent together with the dimension it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub kind: EstimatorKind,
    pub slope: f64,
    /// Dimension implied by `slope`, clamped to `[0, ambient_dim]`.
    pub dim_value: f64,
    pub residual: f64,
    /// `(low, high)` scale range of the points entering the fit: radii for
    /// Fourier and ball estimates, cell sides for box counting.
    pub scale_window: (f64, f64),
    pub points: usize,
}

impl DimensionEstimate {
    pub(crate) fn new(
        kind: EstimatorKind,
        slope: f64,
        ambient_dim: usize,
        residual: f64,
        scale_window: (f64, f64),
        points: usize,
    ) -> Self {
        let raw = match kind {
            EstimatorKind::Fourier => 2.0 * slope,
            EstimatorKind::Frostman | EstimatorKind::BoxCounting => slope,
        };
        DimensionEstimate {
            kind,
            slope,
            dim_value: clamp_dim(raw, ambient_dim),
            residual,
            scale_window,
            points,
        }
    }
}

pub(crate) fn clamp_dim(value: f64, ambient_dim: usize) -> f64 {
    if value.is_nan() {
        return 0.0;
    }
    // + 0.0 turns -0.0 into 0.0
    value.clamp(0.0, ambient_dim as f64) + 0.0
}

/// Median of a slice; `None` when empty. NaNs sort last.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}
