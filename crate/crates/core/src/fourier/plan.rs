use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequency sampling layout: annuli `[R_j, 2R_j)` with `R_j = r0·2^j`,
/// `j = 0..=annuli`.
///
/// In dimension one each annulus gets `samples` stratified, jittered positive
/// frequencies; under [`Sampling::Dense`] the count is raised so consecutive
/// samples are at most `1/(4·extent)` apart. In dimension two each annulus
/// gets `rings` jittered radii times `samples / rings` fixed angles in
/// `[0, π)`, followed by a radial scan along the `refine_directions` angles
/// with the slowest decay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyPlan {
    pub r0: f64,
    pub annuli: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "default_rings")]
    pub rings: usize,
    #[serde(default = "default_refine")]
    pub refine_directions: usize,
    #[serde(default)]
    pub sampling: Sampling,
}

/// Sample density along a line of frequencies.
///
/// The annulus maximum of a random measure's transform exceeds its typical
/// size by a factor growing like `√log N` in the number `N` of independent
/// samples. Dense sampling lets `N` grow with the radius, which biases decay
/// fits of random measures downwards; fixed counts keep `N` bounded but can
/// step over narrow peaks of deterministic measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Spacing at most `1/(4·extent)`: no peak of width `1/extent` is missed.
    #[default]
    Dense,
    /// `samples` per annulus in dimension one, and
    /// [`FIXED_SCAN_SAMPLES`] per annulus along refined directions.
    Fixed,
}

/// Samples per annulus along a refined direction under [`Sampling::Fixed`].
pub const FIXED_SCAN_SAMPLES: usize = 64;

fn default_rings() -> usize {
    4
}

fn default_refine() -> usize {
    2
}

pub const MIN_ANNULI: usize = 6;

impl FrequencyPlan {
    /// Plan with the smallest admissible sample count for `dim`.
    pub fn new(dim: usize, r0: f64, annuli: usize, seed: u64) -> Self {
        FrequencyPlan {
            r0,
            annuli,
            samples: Self::min_samples(dim),
            seed,
            rings: default_rings(),
            refine_directions: default_refine(),
            sampling: Sampling::Dense,
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn min_samples(dim: usize) -> usize {
        if dim == 1 {
            64
        } else {
            512
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..=self.annuli)
            .map(|j| self.r0 * 2f64.powi(j as i32))
            .collect()
    }

    pub fn r_max(&self) -> f64 {
        self.r0 * 2f64.powi(self.annuli as i32)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.r0.is_finite() && self.r0 >= 1.0) {
            return Err(Error::invalid("r0", format!("{} is below 1", self.r0)));
        }
        if self.annuli < MIN_ANNULI {
            return Err(Error::invalid(
                "annuli",
                format!("{} is below {MIN_ANNULI}", self.annuli),
            ));
        }
        if self.annuli > 40 {
            return Err(Error::invalid("annuli", "at most 40 annuli"));
        }
        let min = Self::min_samples(dim);
        if self.samples < min {
            return Err(Error::invalid(
                "samples",
                format!("{} is below {min} in dimension {dim}", self.samples),
            ));
        }
        if dim == 2 && (self.rings == 0 || self.rings > self.samples / 8) {
            return Err(Error::invalid("rings", "need 1 ≤ rings ≤ samples/8"));
        }
        Ok(())
    }
}
