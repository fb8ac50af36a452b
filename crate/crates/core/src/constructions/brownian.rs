use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::numeric::derive_seed;

pub const MIN_RESOLUTION_LOG2: u32 = 14;
pub const DEFAULT_RESOLUTION_LOG2: u32 = 16;
const MAX_RESOLUTION_LOG2: u32 = 24;

/// How the path is evaluated between grid times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Piecewise linear between grid values.
    Linear,
    /// Exact conditional sampling of the path at the atom times (Brownian
    /// bridges between grid values), so structure of `A` finer than the
    /// grid is not flattened.
    #[default]
    Bridge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrownianOptions {
    #[serde(default = "default_resolution")]
    pub resolution_log2: u32,
    #[serde(default)]
    pub interpolation: Interpolation,
}

fn default_resolution() -> u32 {
    DEFAULT_RESOLUTION_LOG2
}

impl Default for BrownianOptions {
    fn default() -> Self {
        BrownianOptions {
            resolution_log2: DEFAULT_RESOLUTION_LOG2,
            interpolation: Interpolation::Bridge,
        }
    }
}

/// Image of `a` under a sampled planar Brownian path on `[0, 1]`.
///
/// `target_dim` is the dimension expected of the image; `a` should have
/// dimension `target_dim / 2`.
pub fn brownian_image(
    a: &DiscreteMeasure,
    target_dim: f64,
    seed: u64,
    options: &BrownianOptions,
) -> Result<DiscreteMeasure> {
    check(a, target_dim, options)?;
    let xs = sample_path(a, seed, 0, options);
    let ys = sample_path(a, seed, 1, options);
    let spacing = a.spacing().sqrt();
    DiscreteMeasure::from_parts(2, xs, ys, a.weights().to_vec(), Some(spacing))
}

/// Image of `a` under a one-dimensional Brownian path, rescaled affinely onto
/// `[0, 1]`. A degenerate image collapses to `0.5`.
pub fn brownian_image_1d(
    a: &DiscreteMeasure,
    target_dim: f64,
    seed: u64,
    options: &BrownianOptions,
) -> Result<DiscreteMeasure> {
    check(a, target_dim, options)?;
    let path = sample_path(a, seed, 0, options);
    let lo = path.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = path.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    let (xs, spacing) = if range > 0.0 {
        (
            path.iter()
                .map(|w| ((w - lo) / range).clamp(0.0, 1.0))
                .collect(),
            a.spacing().sqrt() / range,
        )
    } else {
        (vec![0.5; path.len()], 0.0)
    };
    DiscreteMeasure::from_parts(1, xs, Vec::new(), a.weights().to_vec(), Some(spacing))
}

fn check(a: &DiscreteMeasure, target_dim: f64, options: &BrownianOptions) -> Result<()> {
    if a.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: a.dim(),
        });
    }
    if !(target_dim > 0.0 && target_dim <= 1.0) {
        return Err(Error::invalid(
            "target_dim",
            format!("{target_dim} is not in (0, 1]"),
        ));
    }
    if options.resolution_log2 < MIN_RESOLUTION_LOG2 {
        return Err(Error::invalid(
            "resolution_log2",
            format!(
                "2^{} steps is coarser than the minimum 2^{MIN_RESOLUTION_LOG2}",
                options.resolution_log2
            ),
        ));
    }
    if options.resolution_log2 > MAX_RESOLUTION_LOG2 {
        return Err(Error::invalid("resolution_log2", "at most 2^24 steps"));
    }
    let b = a.bounds();
    if b.lo[0] < 0.0 || b.hi[0] > 1.0 {
        return Err(Error::invalid("A", "support must lie in [0, 1]"));
    }
    Ok(())
}

/// One coordinate of the path evaluated at the atoms of `a`, in atom order.
fn sample_path(a: &DiscreteMeasure, seed: u64, coord: u64, options: &BrownianOptions) -> Vec<f64> {
    let n = 1usize << options.resolution_log2;
    let h = 1.0 / n as f64;
    let sd = h.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2 * coord));
    let mut grid = Vec::with_capacity(n + 1);
    grid.push(0.0);
    let mut w = 0.0;
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(&mut rng);
        w += sd * z;
        grid.push(w);
    }
    let times = a.xs();
    let cell = |t: f64| ((t * n as f64).floor() as usize).min(n - 1);
    match options.interpolation {
        Interpolation::Linear => times
            .iter()
            .map(|&t| {
                let k = cell(t);
                let u = t * n as f64 - k as f64;
                grid[k] + u * (grid[k + 1] - grid[k])
            })
            .collect(),
        Interpolation::Bridge => {
            let mut bridge_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2 * coord + 1));
            let mut order: Vec<usize> = (0..times.len()).collect();
            order.sort_by(|&i, &j| times[i].total_cmp(&times[j]).then(i.cmp(&j)));
            let mut out = vec![0.0; times.len()];
            let mut prev: Option<(usize, f64, f64)> = None;
            for i in order {
                let t = times[i];
                let k = cell(t);
                let t1 = (k + 1) as f64 * h;
                let (s0, w0) = match prev {
                    Some((pk, ps, pw)) if pk == k => (ps, pw),
                    _ => (k as f64 * h, grid[k]),
                };
                let span = t1 - s0;
                let value = if t <= s0 {
                    w0
                } else if span <= 0.0 || t >= t1 {
                    grid[k + 1]
                } else {
                    let mean = w0 + (t - s0) / span * (grid[k + 1] - w0);
                    let var = (t - s0) * (t1 - t) / span;
                    let z: f64 = StandardNormal.sample(&mut bridge_rng);
                    mean + var.max(0.0).sqrt() * z
                };
                out[i] = value;
                prev = Some((k, t.max(s0), value));
            }
            out
        }
    }
}
