//! Finite weighted atom sets in dimension one or two.
//!
//! Every measure in the laboratory is a [`DiscreteMeasure`]. Besides its atoms
//! each measure carries an *atom spacing*: the length scale below which the
//! atom list stops imitating the continuous measure it stands in for. All
//! estimators refuse to look below that scale.

mod ball;
mod boxcount;
mod ifs;
mod io;
mod map;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

pub use ball::{
    ball_mass_profile, frostman_exponent, BallMassProfile, ScaleBase, ScaleWindow, MIN_SCALES,
};
pub use boxcount::{box_counting, BoxCountEstimate};
pub use ifs::{ifs_measure, IfsSpec};
pub use io::{read_measure, write_measure};
pub use map::{pushforward, pushforward_with, PointMap};

/// A point of the plane; one-dimensional measures keep the second coordinate at zero.
pub type Point = [f64; 2];

/// Largest admissible side of a measure's bounding box.
pub const MAX_EXTENT: f64 = 16.0;

/// Cap on the atom count of product-type constructions.
pub const ATOM_CAP: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Point,
    pub hi: Point,
}

impl BoundingBox {
    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn max_side(&self) -> f64 {
        self.side(0).max(self.side(1))
    }

    pub fn diameter(&self) -> f64 {
        self.side(0).hypot(self.side(1))
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        (0..2).all(|k| p[k] >= self.lo[k] - tol && p[k] <= self.hi[k] + tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    xs: Vec<f64>,
    /// Empty for one-dimensional measures.
    ys: Vec<f64>,
    weights: Vec<f64>,
    mass: f64,
    bounds: BoundingBox,
    spacing: f64,
}

impl DiscreteMeasure {
    /// Builds a measure from points and weights, estimating the atom spacing
    /// as the median nearest-neighbour distance.
    pub fn new(dim: usize, points: &[Point], weights: Vec<f64>) -> Result<Self> {
        let xs = points.iter().map(|p| p[0]).collect();
        let ys = if dim == 2 {
            points.iter().map(|p| p[1]).collect()
        } else {
            Vec::new()
        };
        if dim == 1 && points.iter().any(|p| p[1] != 0.0) {
            return Err(Error::InvalidMeasure(
                "one-dimensional atoms must have a zero second coordinate".into(),
            ));
        }
        Self::from_parts(dim, xs, ys, weights, None)
    }

    /// Builds a measure from coordinate columns. `spacing` overrides the
    /// nearest-neighbour estimate when the caller knows the construction's
    /// resolution.
    pub fn from_parts(
        dim: usize,
        xs: Vec<f64>,
        ys: Vec<f64>,
        weights: Vec<f64>,
        spacing: Option<f64>,
    ) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidMeasure(format!(
                "ambient dimension must be 1 or 2, got {dim}"
            )));
        }
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidMeasure("measure has no atoms".into()));
        }
        if xs.len() != n || (dim == 2 && ys.len() != n) || (dim == 1 && !ys.is_empty()) {
            return Err(Error::InvalidMeasure(
                "coordinate and weight columns differ in length".into(),
            ));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidMeasure(format!(
                "atom {i} has non-positive or non-finite weight {}",
                weights[i]
            )));
        }
        if let Some(i) = xs.iter().chain(ys.iter()).position(|c| !c.is_finite()) {
            return Err(Error::InvalidMeasure(format!(
                "non-finite coordinate (column entry {i})"
            )));
        }
        let bounds = bounding_box(&xs, &ys);
        if bounds.max_side() > MAX_EXTENT {
            return Err(Error::InvalidMeasure(format!(
                "bounding box side {} exceeds {MAX_EXTENT}",
                bounds.max_side()
            )));
        }
        let mass = pairwise_sum(&weights);
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "total mass {mass} is not finite"
            )));
        }
        let mut m = DiscreteMeasure {
            dim,
            xs,
            ys,
            weights,
            mass,
            bounds,
            spacing: 0.0,
        };
        m.spacing = match spacing {
            Some(s) if s.is_finite() && s >= 0.0 => s,
            Some(s) => return Err(Error::invalid("spacing", format!("{s} is not a length"))),
            None => median_nn_distance(&m),
        };
        Ok(m)
    }

    /// Unit point mass.
    pub fn dirac(dim: usize, point: Point) -> Result<Self> {
        let p = if dim == 1 { [point[0], 0.0] } else { point };
        Self::new(dim, &[p], vec![1.0]).map(|m| m.with_spacing(0.0))
    }

    pub fn with_spacing(mut self, spacing: f64) -> Self {
        self.spacing = spacing.max(0.0);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    /// Second coordinates; empty for one-dimensional measures.
    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn point(&self, i: usize) -> Point {
        if self.dim == 2 {
            [self.xs[i], self.ys[i]]
        } else {
            [self.xs[i], 0.0]
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn bounds(&self) -> BoundingBox {
        self.bounds
    }

    /// Resolution of the atom list as a stand-in for a continuous measure.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Highest frequency at which the atom list still imitates its target:
    /// a quarter of the reciprocal spacing (`n/4` for `n` equispaced atoms
    /// on a unit interval). Infinite for exact point masses.
    pub fn atomization_frequency(&self) -> f64 {
        if self.spacing > 0.0 {
            0.25 / self.spacing
        } else {
            f64::INFINITY
        }
    }

    /// Smallest radius any ball or box estimator may use.
    pub fn min_admissible_scale(&self) -> f64 {
        4.0 * self.spacing
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::invalid("factor", "must be positive and finite"));
        }
        let weights = self.weights.iter().map(|w| w * factor).collect();
        Self::from_parts(
            self.dim,
            self.xs.clone(),
            self.ys.clone(),
            weights,
            Some(self.spacing),
        )
    }

    /// Rescales weights to total mass one.
    pub fn normalized(&self) -> Result<Self> {
        self.scaled(1.0 / self.mass)
    }
}

/// `[a, b]` split into `n` equal cells, one equal-weight atom at each cell midpoint.
pub fn uniform_interval_measure(a: f64, b: f64, n: usize) -> Result<DiscreteMeasure> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("interval", "endpoints must be finite"));
    }
    if a >= b {
        return Err(Error::invalid(
            "interval",
            format!("need a < b, got [{a}, {b}]"),
        ));
    }
    if n == 0 {
        return Err(Error::invalid("n", "need at least one atom"));
    }
    let h = (b - a) / n as f64;
    let xs = (0..n).map(|k| a + (k as f64 + 0.5) * h).collect();
    DiscreteMeasure::from_parts(1, xs, Vec::new(), vec![1.0 / n as f64; n], Some(h))
}

/// Cartesian product of two one-dimensional measures, weights multiplied.
/// Atoms are ordered with the first factor's index varying slowest.
pub fn product_measure(
    first: &DiscreteMeasure,
    second: &DiscreteMeasure,
) -> Result<DiscreteMeasure> {
    for m in [first, second] {
        if m.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: m.dim(),
            });
        }
    }
    let n = first
        .len()
        .checked_mul(second.len())
        .filter(|&n| n <= ATOM_CAP)
        .ok_or(Error::AtomCap {
            requested: first.len().saturating_mul(second.len()),
            limit: ATOM_CAP,
        })?;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for (x, wx) in first.xs.iter().zip(&first.weights) {
        for (y, wy) in second.xs.iter().zip(&second.weights) {
            xs.push(*x);
            ys.push(*y);
            ws.push(wx * wy);
        }
    }
    DiscreteMeasure::from_parts(2, xs, ys, ws, Some(first.spacing.max(second.spacing)))
}

fn bounding_box(xs: &[f64], ys: &[f64]) -> BoundingBox {
    let span = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
                (lo.min(c), hi.max(c))
            })
    };
    let (x0, x1) = span(xs);
    let (y0, y1) = if ys.is_empty() { (0.0, 0.0) } else { span(ys) };
    BoundingBox {
        lo: [x0, y0],
        hi: [x1, y1],
    }
}

/// Median distance from an atom to its nearest distinct neighbour; zero when
/// all atoms coincide.
fn median_nn_distance(m: &DiscreteMeasure) -> f64 {
    const MAX_PROBES: usize = 20_000;
    if m.len() < 2 {
        return 0.0;
    }
    let mut dists = if m.dim == 1 {
        let mut xs = m.xs.clone();
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.dedup();
        if xs.len() < 2 {
            return 0.0;
        }
        (0..xs.len())
            .map(|i| {
                let left = if i > 0 {
                    xs[i] - xs[i - 1]
                } else {
                    f64::INFINITY
                };
                let right = if i + 1 < xs.len() {
                    xs[i + 1] - xs[i]
                } else {
                    f64::INFINITY
                };
                left.min(right)
            })
            .collect::<Vec<_>>()
    } else {
        let b = m.bounds;
        let area = b.side(0).max(1e-12) * b.side(1).max(1e-12);
        let cell = (area / m.len() as f64)
            .sqrt()
            .max(b.max_side() / m.len() as f64);
        if cell <= 0.0 {
            return 0.0;
        }
        let key = |x: f64, y: f64| {
            (
                ((x - b.lo[0]) / cell).floor() as i64,
                ((y - b.lo[1]) / cell).floor() as i64,
            )
        };
        let mut grid: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for i in 0..m.len() {
            grid.entry(key(m.xs[i], m.ys[i]))
                .or_default()
                .push(i as u32);
        }
        let stride = m.len().div_ceil(MAX_PROBES);
        let max_ring = (b.max_side() / cell).ceil() as i64 + 1;
        (0..m.len())
            .step_by(stride)
            .filter_map(|i| {
                let (x, y) = (m.xs[i], m.ys[i]);
                let (cx, cy) = key(x, y);
                let mut best = f64::INFINITY;
                for ring in 0..=max_ring {
                    if best < (ring as f64 - 1.0).max(0.0) * cell {
                        break;
                    }
                    for dx in -ring..=ring {
                        for dy in -ring..=ring {
                            if dx.abs() != ring && dy.abs() != ring {
                                continue;
                            }
                            if let Some(cands) = grid.get(&(cx + dx, cy + dy)) {
                                for &j in cands {
                                    let d = (m.xs[j as usize] - x).hypot(m.ys[j as usize] - y);
                                    if d > 0.0 && d < best {
                                        best = d;
                                    }
                                }
                            }
                        }
                    }
                }
                best.is_finite().then_some(best)
            })
            .collect()
    };
    if dists.is_empty() {
        return 0.0;
    }
    dists.sort_by(|a, b| a.total_cmp(b));
    dists[dists.len() / 2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_four_atoms() {
        let m = uniform_interval_measure(0.0, 1.0, 4).unwrap();
        assert_eq!(m.xs(), &[0.125, 0.375, 0.625, 0.875]);
        assert!(m.weights().iter().all(|&w| w == 0.25));
        assert_eq!(m.total_mass(), 1.0);
    }

    #[test]
    fn uniform_single_atom() {
        let m = uniform_interval_measure(0.0, 1.0, 1).unwrap();
        assert_eq!(m.xs(), &[0.5]);
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn uniform_on_shifted_interval() {
        let m = uniform_interval_measure(2.0, 3.0, 10).unwrap();
        assert!((m.total_mass() - 1.0).abs() < 1e-15);
        assert!(m.xs().iter().all(|&x| (2.0..=3.0).contains(&x)));
        assert!((m.atomization_frequency() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_rejects_bad_input() {
        assert!(uniform_interval_measure(0.0, 1.0, 0).is_err());
        assert!(uniform_interval_measure(f64::NAN, 1.0, 3).is_err());
        assert!(uniform_interval_measure(0.0, f64::INFINITY, 3).is_err());
        assert!(uniform_interval_measure(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn invariants_enforced() {
        assert!(DiscreteMeasure::new(1, &[], vec![]).is_err());
        assert!(DiscreteMeasure::new(1, &[[0.0, 0.0]], vec![0.0]).is_err());
        assert!(DiscreteMeasure::new(1, &[[0.0, 0.0]], vec![-1.0]).is_err());
        assert!(DiscreteMeasure::new(2, &[[0.0, 0.0], [17.0, 0.0]], vec![1.0, 1.0]).is_err());
        assert!(DiscreteMeasure::new(3, &[[0.0, 0.0]], vec![1.0]).is_err());
        assert!(DiscreteMeasure::new(1, &[[0.0, 1.0]], vec![1.0]).is_err());
    }

    #[test]
    fn product_of_diracs() {
        let a = DiscreteMeasure::dirac(1, [0.3, 0.0]).unwrap();
        let b = DiscreteMeasure::dirac(1, [0.7, 0.0]).unwrap();
        let p = product_measure(&a, &b).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.point(0), [0.3, 0.7]);
        assert_eq!(p.total_mass(), 1.0);
    }

    #[test]
    fn product_of_uniforms() {
        let u = uniform_interval_measure(0.0, 1.0, 10).unwrap();
        let p = product_measure(&u, &u).unwrap();
        assert_eq!(p.len(), 100);
        assert!(p.weights().iter().all(|&w| (w - 0.01).abs() < 1e-16));
        assert!((p.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_rejects_planar_factor_and_cap() {
        let u = uniform_interval_measure(0.0, 1.0, 10).unwrap();
        let p = product_measure(&u, &u).unwrap();
        assert!(matches!(
            product_measure(&p, &u),
            Err(Error::DimensionMismatch { .. })
        ));
        let big = uniform_interval_measure(0.0, 1.0, 2001).unwrap();
        assert!(matches!(
            product_measure(&big, &big),
            Err(Error::AtomCap { .. })
        ));
    }

    #[test]
    fn median_spacing_of_planar_grid() {
        let u = uniform_interval_measure(0.0, 1.0, 50).unwrap();
        let p = product_measure(&u, &u).unwrap();
        let est = median_nn_distance(&p);
        assert!((est - 0.02).abs() < 1e-12, "{est}");
    }

    #[test]
    fn median_spacing_of_line() {
        let pts: Vec<Point> = (0..8).map(|k| [k as f64 * 0.5, 0.0]).collect();
        let m = DiscreteMeasure::new(1, &pts, vec![1.0; 8]).unwrap();
        assert!((m.spacing() - 0.5).abs() < 1e-15);
    }
}
