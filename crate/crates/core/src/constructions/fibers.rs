use serde::{Deserialize, Serialize};

use crate::constructions::brownian::{brownian_image_1d, BrownianOptions};
use crate::error::{Error, Result};
use crate::measure::{ifs_measure, uniform_interval_measure, DiscreteMeasure, IfsSpec};
use crate::numeric::derive_seed;

/// Generator of the one-dimensional measures placed along each segment.
/// Every generated fiber lives on `[0, 1]` and has mass 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FiberRule {
    /// Equal weights at the midpoints of `atoms` equal cells.
    Uniform {
        atoms: usize,
    },
    /// Cell midpoints weighted by the smooth bump `exp(−1/(1−z²))`,
    /// `z = 2r − 1`; its transform decays faster than any power.
    Bump {
        atoms: usize,
    },
    Cantor {
        ifs: IfsSpec,
    },
    /// Brownian image of a two-branch self-similar set of dimension `dim/2`
    /// with `levels` levels; a Salem measure of dimension `dim`.
    Brownian {
        dim: f64,
        levels: u32,
        #[serde(default)]
        options: BrownianOptions,
        /// Draw an independent fiber per direction instead of one shared fiber.
        #[serde(default)]
        per_direction: bool,
    },
}

impl FiberRule {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, FiberRule::Brownian { .. })
    }

    /// Whether every direction receives the same fiber.
    pub fn is_shared(&self) -> bool {
        !matches!(
            self,
            FiberRule::Brownian {
                per_direction: true,
                ..
            }
        )
    }

    pub fn atom_count(&self) -> usize {
        match self {
            FiberRule::Uniform { atoms } | FiberRule::Bump { atoms } => *atoms,
            FiberRule::Cantor { ifs } => ifs.branches.pow(ifs.levels),
            FiberRule::Brownian { levels, .. } => 1usize << levels,
        }
    }

    /// Fiber for direction `index`. Stochastic rules need `seed`; per-direction
    /// fibers use the derived seed `seed ⊕ index`.
    pub fn generate(&self, seed: Option<u64>, index: u64) -> Result<DiscreteMeasure> {
        match self {
            FiberRule::Uniform { atoms } => uniform_interval_measure(0.0, 1.0, *atoms),
            FiberRule::Bump { atoms } => bump_measure(*atoms),
            FiberRule::Cantor { ifs } => ifs_measure(ifs),
            FiberRule::Brownian {
                dim,
                levels,
                options,
                per_direction,
            } => {
                let seed = seed.ok_or_else(|| {
                    Error::invalid("seed", "Brownian fibers need an explicit seed")
                })?;
                let a = ifs_measure(&IfsSpec::with_dimension(dim / 2.0, *levels)?)?;
                let s = if *per_direction {
                    derive_seed(seed, index)
                } else {
                    seed
                };
                brownian_image_1d(&a, *dim, s, options)
            }
        }
    }
}

/// Smooth bump on `[0, 1]` sampled at `n` cell midpoints, normalized.
pub fn bump_measure(n: usize) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::invalid("atoms", "need at least one atom"));
    }
    let h = 1.0 / n as f64;
    let (xs, ws): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|k| {
            let r = (k as f64 + 0.5) * h;
            let z = 2.0 * r - 1.0;
            (r, (-1.0 / (1.0 - z * z)).exp())
        })
        .filter(|(_, w)| *w > 0.0)
        .unzip();
    let m = DiscreteMeasure::from_parts(1, xs, Vec::new(), ws, Some(h))?;
    m.normalized()
}
