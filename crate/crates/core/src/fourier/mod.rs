//! Fourier transforms of discrete measures and decay-based dimension fits.

mod decay_frostman;
mod kernel;
mod plan;
mod profile;

pub use decay_frostman::{verify_frostman_from_decay, DecayFrostmanReport};
pub use kernel::{cos_sin_turns, nudft, BLOCK};
pub use plan::{FrequencyPlan, Sampling, FIXED_SCAN_SAMPLES, MIN_ANNULI};
pub use profile::{
    decay_profile, estimate_fourier_dim, estimate_fourier_dim_with, DecayProfile, FitOptions,
    FourierFit, MIN_FIT_ANNULI,
};
