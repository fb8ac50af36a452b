use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{estimate_fourier_dim, FrequencyPlan};
use crate::measure::{ball_mass_profile, DiscreteMeasure, ScaleWindow};

/// Largest admissible growth of `μ(B(x,r))/r^α` from a coarser to a finer scale.
pub const RATIO_GROWTH_LIMIT: f64 = 10.0;

/// Slack on the measured decay exponent when checking the decay hypothesis.
pub const DECAY_SLACK: f64 = 0.1;

/// Empirical check that Fourier decay of order `α` forces `μ(B(x,r)) ≲ r^α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFrostmanReport {
    pub alpha: f64,
    pub scales: Vec<f64>,
    /// `max_x μ(B(x,r)) / r^α` per scale.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// `max ratio / min ratio` over all scales.
    pub spread: f64,
    /// Largest `ratio(r) / ratio(r')` with `r < r'`; a blow-up towards small
    /// radii is what an unbounded constant looks like.
    pub growth: f64,
    /// Measured decay exponent, when a frequency plan was supplied.
    pub decay_exponent: Option<f64>,
    pub hypothesis_holds: Option<bool>,
    pub pass: bool,
}

/// Ball-mass ratios against `r^α` over `window`.
///
/// PASS requires the ratio not to grow by more than [`RATIO_GROWTH_LIMIT`]
/// towards small radii and, when `plan` is given, a measured decay exponent
/// of at least `α − DECAY_SLACK`.
pub fn verify_frostman_from_decay(
    measure: &DiscreteMeasure,
    alpha: f64,
    window: &ScaleWindow,
    plan: Option<&FrequencyPlan>,
) -> Result<DecayFrostmanReport> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is not positive")));
    }
    if alpha >= measure.dim() as f64 {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} must be below the ambient dimension {}",
            measure.dim()
        )));
    }
    let profile = ball_mass_profile(measure, window, None)?;
    let ratios = profile.ratios(alpha);
    let max_ratio = ratios.iter().copied().fold(f64::MIN, f64::max);
    let min_ratio = ratios.iter().copied().fold(f64::MAX, f64::min);
    // scales decrease with the index
    let mut growth: f64 = 1.0;
    for j in 0..ratios.len() {
        for i in j + 1..ratios.len() {
            growth = growth.max(ratios[i] / ratios[j]);
        }
    }
    let decay_exponent = match plan {
        Some(p) => Some(estimate_fourier_dim(measure, p)?.slope),
        None => None,
    };
    let hypothesis_holds = decay_exponent.map(|b| b >= alpha - DECAY_SLACK);
    Ok(DecayFrostmanReport {
        alpha,
        scales: profile.scales,
        ratios,
        max_ratio,
        spread: max_ratio / min_ratio,
        growth,
        decay_exponent,
        hypothesis_holds,
        pass: growth <= RATIO_GROWTH_LIMIT && hypothesis_holds != Some(false),
    })
}
