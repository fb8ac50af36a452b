use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{least_squares, DimensionEstimate, EstimatorKind};
use crate::measure::DiscreteMeasure;

/// Minimum number of scales entering a ball-mass or box-count fit.
pub const MIN_SCALES: usize = 6;

/// Grid centers per cell side are capped at this count.
const MAX_GRID_PER_CELL: usize = 4;

/// Atom centers probed per occupied cell in dimension two.
const ATOM_CENTERS_PER_CELL: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScaleBase {
    #[default]
    Dyadic,
    Triadic,
}

impl ScaleBase {
    pub fn factor(self) -> f64 {
        match self {
            ScaleBase::Dyadic => 2.0,
            ScaleBase::Triadic => 3.0,
        }
    }
}

/// Geometric scale ladder `r_max, r_max/b, r_max/b², …` down to `r_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleWindow {
    pub r_min: f64,
    pub r_max: f64,
    #[serde(default)]
    pub base: ScaleBase,
}

impl ScaleWindow {
    pub fn dyadic(r_min: f64, r_max: f64) -> Self {
        ScaleWindow {
            r_min,
            r_max,
            base: ScaleBase::Dyadic,
        }
    }

    pub fn triadic(r_min: f64, r_max: f64) -> Self {
        ScaleWindow {
            r_min,
            r_max,
            base: ScaleBase::Triadic,
        }
    }

    /// Decreasing scales of the ladder.
    pub fn scales(&self) -> Vec<f64> {
        let b = self.base.factor();
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let r = self.r_max * b.powi(-k);
            if r < self.r_min * (1.0 - 1e-9) || out.len() > 200 {
                break;
            }
            out.push(r);
            k += 1;
        }
        out
    }

    /// Rejects windows finer than the atomization scale or coarser than the
    /// support, and ladders with fewer than [`MIN_SCALES`] rungs.
    pub(crate) fn check(&self, measure: &DiscreteMeasure) -> Result<Vec<f64>> {
        if !(self.r_min.is_finite() && self.r_max.is_finite() && self.r_min > 0.0) {
            return Err(Error::invalid(
                "scale window",
                "radii must be finite and positive",
            ));
        }
        if self.r_min > self.r_max {
            return Err(Error::invalid("scale window", "r_min exceeds r_max"));
        }
        let admissible_min = measure.min_admissible_scale();
        let admissible_max = measure.bounds().diameter().max(1.0);
        if self.r_min < admissible_min * (1.0 - 1e-9) || self.r_max > admissible_max * (1.0 + 1e-9)
        {
            return Err(Error::ScaleWindow {
                requested_min: self.r_min,
                requested_max: self.r_max,
                admissible_min,
                admissible_max,
            });
        }
        let scales = self.scales();
        if scales.len() < MIN_SCALES {
            return Err(Error::TooFewScales {
                found: scales.len(),
                required: MIN_SCALES,
            });
        }
        Ok(scales)
    }
}

/// Largest closed-ball mass found at each scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMassProfile {
    pub scales: Vec<f64>,
    pub max_mass: Vec<f64>,
    pub total_mass: f64,
}

impl BallMassProfile {
    /// `max_mass / r^α` per scale.
    pub fn ratios(&self, alpha: f64) -> Vec<f64> {
        self.scales
            .iter()
            .zip(&self.max_mass)
            .map(|(r, m)| m / r.powf(alpha))
            .collect()
    }
}

/// Maximal ball mass over candidate centers at every scale of `window`.
///
/// Centers are the atoms plus a lattice of spacing `grid` (default: the
/// radius itself). In the plane at most eight atoms per occupied cell are
/// probed.
pub fn ball_mass_profile(
    measure: &DiscreteMeasure,
    window: &ScaleWindow,
    grid: Option<f64>,
) -> Result<BallMassProfile> {
    let scales = window.check(measure)?;
    if let Some(g) = grid {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::invalid(
                "grid",
                format!("{g} is not a positive spacing"),
            ));
        }
    }
    let total = measure.total_mass();
    let max_mass = match measure.dim() {
        1 => {
            let sorted = SortedLine::new(measure);
            scales
                .par_iter()
                .map(|&r| sorted.max_ball(r, grid.unwrap_or(r)).min(total))
                .collect()
        }
        _ => scales
            .par_iter()
            .map(|&r| max_ball_2d(measure, r, grid.unwrap_or(r)).min(total))
            .collect(),
    };
    Ok(BallMassProfile {
        scales,
        max_mass,
        total_mass: total,
    })
}

/// Slope of `log max-ball-mass` against `log r`, clamped to `[0, d]`.
pub fn frostman_exponent(
    measure: &DiscreteMeasure,
    window: &ScaleWindow,
    grid: Option<f64>,
) -> Result<DimensionEstimate> {
    let profile = ball_mass_profile(measure, window, grid)?;
    fit_profile(&profile, measure.dim())
}

pub(crate) fn fit_profile(profile: &BallMassProfile, dim: usize) -> Result<DimensionEstimate> {
    let xs: Vec<f64> = profile.scales.iter().map(|r| r.log2()).collect();
    let ys: Vec<f64> = profile.max_mass.iter().map(|m| m.log2()).collect();
    let fit = least_squares(&xs, &ys)?;
    let n = profile.scales.len();
    Ok(DimensionEstimate::new(
        EstimatorKind::Frostman,
        fit.slope,
        dim,
        fit.rms,
        (profile.scales[n - 1], profile.scales[0]),
        n,
    ))
}

struct SortedLine {
    xs: Vec<f64>,
    prefix: Vec<f64>,
}

impl SortedLine {
    fn new(measure: &DiscreteMeasure) -> Self {
        let mut idx: Vec<usize> = (0..measure.len()).collect();
        idx.sort_by(|&a, &b| measure.xs()[a].total_cmp(&measure.xs()[b]));
        let xs = idx.iter().map(|&i| measure.xs()[i]).collect();
        let mut prefix = Vec::with_capacity(idx.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &i in &idx {
            acc += measure.weights()[i];
            prefix.push(acc);
        }
        SortedLine { xs, prefix }
    }

    fn mass(&self, c: f64, r: f64) -> f64 {
        let lo = self.xs.partition_point(|&x| x < c - r);
        let hi = self.xs.partition_point(|&x| x <= c + r);
        self.prefix[hi] - self.prefix[lo]
    }

    fn max_ball(&self, r: f64, grid: f64) -> f64 {
        let mut best = self.xs.iter().map(|&c| self.mass(c, r)).fold(0.0, f64::max);
        let (lo, hi) = (self.xs[0], self.xs[self.xs.len() - 1]);
        let g = grid.max((hi - lo) / (1 << 20) as f64);
        if g > 0.0 {
            let steps = ((hi - lo) / g).floor() as usize;
            for k in 0..=steps {
                best = best.max(self.mass(lo + k as f64 * g, r));
            }
        }
        best
    }
}

fn max_ball_2d(measure: &DiscreteMeasure, r: f64, grid: f64) -> f64 {
    let key = |x: f64, y: f64| ((x / r).floor() as i64, (y / r).floor() as i64);
    let n = measure.len();
    let mut order: Vec<(i64, i64, usize)> = (0..n)
        .map(|i| {
            let (a, b) = key(measure.xs()[i], measure.ys()[i]);
            (a, b, i)
        })
        .collect();
    order.sort_unstable();
    let mut atoms = Vec::with_capacity(n);
    let mut cells: Vec<((i64, i64), usize, usize, f64)> = Vec::new();
    for (a, b, i) in order {
        let w = measure.weights()[i];
        match cells.last_mut() {
            Some((k, _, end, m)) if *k == (a, b) => {
                *end += 1;
                *m += w;
            }
            _ => {
                let start = atoms.len();
                cells.push(((a, b), start, start + 1, w));
            }
        }
        atoms.push((measure.xs()[i], measure.ys()[i], w));
    }
    let lookup: HashMap<(i64, i64), usize> = cells
        .iter()
        .enumerate()
        .map(|(c, cell)| (cell.0, c))
        .collect();
    let neighbours = |k: (i64, i64)| {
        let mut out = Vec::with_capacity(9);
        for da in -1..=1 {
            for db in -1..=1 {
                if let Some(&c) = lookup.get(&(k.0 + da, k.1 + db)) {
                    out.push(c);
                }
            }
        }
        out
    };
    let mut ranked: Vec<(f64, usize)> = cells
        .iter()
        .enumerate()
        .map(|(c, cell)| (neighbours(cell.0).iter().map(|&d| cells[d].3).sum(), c))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let per_side = ((r / grid).ceil() as usize).clamp(1, MAX_GRID_PER_CELL);
    let g = r / per_side as f64;
    let r2 = r * r;
    let mut best: f64 = 0.0;
    let mut block = Vec::new();
    for (bound, c) in ranked {
        if bound <= best {
            break;
        }
        let (k, start, end, _) = cells[c];
        block.clear();
        for d in neighbours(k) {
            block.extend_from_slice(&atoms[cells[d].1..cells[d].2]);
        }
        let eval = |cx: f64, cy: f64| {
            block
                .iter()
                .filter(|(x, y, _)| (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r2)
                .map(|a| a.2)
                .sum::<f64>()
        };
        let stride = (end - start).div_ceil(ATOM_CENTERS_PER_CELL).max(1);
        for a in atoms[start..end].iter().step_by(stride) {
            best = best.max(eval(a.0, a.1));
        }
        for i in 0..per_side {
            for j in 0..per_side {
                let cx = (k.0 as f64) * r + (i as f64 + 0.5) * g;
                let cy = (k.1 as f64) * r + (j as f64 + 0.5) * g;
                best = best.max(eval(cx, cy));
            }
        }
    }
    best
}
