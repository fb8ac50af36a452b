//! Numerical laboratory for Fourier dimension of Kakeya- and
//! Furstenberg-type sets in the plane.
//!
//! Measures are finite atom lists ([`measure::DiscreteMeasure`]); the
//! [`fourier`] module evaluates their transforms by direct summation and fits
//! decay exponents, [`constructions`] builds the example families,
//! [`bounds`] evaluates the closed-form thresholds and [`verify`] runs
//! experiments against them.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod fit;
pub mod fourier;
pub mod measure;
mod numeric;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use fit::{DimensionEstimate, EstimatorKind};
pub use measure::DiscreteMeasure;
