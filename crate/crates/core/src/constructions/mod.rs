//! Kakeya, Furstenberg and Brownian-image example measures.

mod brownian;
mod fibers;
mod kakeya;
mod lines;

pub use brownian::{
    brownian_image, brownian_image_1d, BrownianOptions, Interpolation, DEFAULT_RESOLUTION_LOG2,
    MIN_RESOLUTION_LOG2,
};
pub use fibers::{bump_measure, FiberRule};
pub use kakeya::{
    kakeya_measure, product_kakeya, radial_kakeya, radial_kakeya_with, AtomTag, BaseRule,
    DirectionSet, KakeyaMeasure, KakeyaSpec, PRODUCT_ARC,
};
pub use lines::{
    furstenberg_measure, strip_mass, strip_scaling, Line, LineFamily, StripScaling, MAX_OFFSET,
};
