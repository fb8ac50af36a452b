use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, Point};

/// Pointwise maps a measure can be pushed through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointMap {
    Identity,
    /// `x ↦ A x + b` between dimensions `from` and `to`; only the leading
    /// `to × from` block of `matrix` is used.
    Affine {
        from: usize,
        to: usize,
        matrix: [[f64; 2]; 2],
        offset: Point,
    },
    /// `θ ↦ radius·(cos θ, sin θ)`.
    CircleEmbedding {
        radius: f64,
    },
    /// Orthogonal projection onto the line spanned by `direction`, reported
    /// as the coordinate `x·e / |e|`.
    LineProjection {
        direction: Point,
    },
    /// `x ↦ e + x − (x·e)e`: projection onto the line through `e` tangent to
    /// the unit circle (`e` is normalized first).
    TangentProjection {
        direction: Point,
    },
    /// `x ↦ angle of x` in `[0, 2π)`; undefined at the origin.
    Direction,
}

impl PointMap {
    pub fn source_dim(&self) -> Option<usize> {
        match self {
            PointMap::Identity => None,
            PointMap::Affine { from, .. } => Some(*from),
            PointMap::CircleEmbedding { .. } => Some(1),
            PointMap::LineProjection { .. }
            | PointMap::TangentProjection { .. }
            | PointMap::Direction => Some(2),
        }
    }

    pub fn target_dim(&self, source: usize) -> usize {
        match self {
            PointMap::Identity => source,
            PointMap::Affine { to, .. } => *to,
            PointMap::CircleEmbedding { .. } | PointMap::TangentProjection { .. } => 2,
            PointMap::LineProjection { .. } | PointMap::Direction => 1,
        }
    }

    /// Global Lipschitz constant, when one exists.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            PointMap::Identity => Some(1.0),
            PointMap::Affine { matrix, .. } => {
                let f = matrix.iter().flatten().map(|a| a * a).sum::<f64>().sqrt();
                Some(f)
            }
            PointMap::CircleEmbedding { radius } => Some(radius.abs()),
            PointMap::LineProjection { .. } | PointMap::TangentProjection { .. } => Some(1.0),
            PointMap::Direction => None,
        }
    }

    pub fn apply(&self, p: Point) -> Option<Point> {
        let q = match self {
            PointMap::Identity => p,
            PointMap::Affine {
                from,
                to,
                matrix,
                offset,
            } => {
                let mut q = [0.0; 2];
                for (i, qi) in q.iter_mut().enumerate().take(*to) {
                    *qi = offset[i] + (0..*from).map(|j| matrix[i][j] * p[j]).sum::<f64>();
                }
                q
            }
            PointMap::CircleEmbedding { radius } => {
                let (s, c) = p[0].sin_cos();
                [radius * c, radius * s]
            }
            PointMap::LineProjection { direction } => {
                let n = direction[0].hypot(direction[1]);
                if n == 0.0 {
                    return None;
                }
                [(p[0] * direction[0] + p[1] * direction[1]) / n, 0.0]
            }
            PointMap::TangentProjection { direction } => {
                let n = direction[0].hypot(direction[1]);
                if n == 0.0 {
                    return None;
                }
                let e = [direction[0] / n, direction[1] / n];
                let d = p[0] * e[0] + p[1] * e[1];
                [e[0] + p[0] - d * e[0], e[1] + p[1] - d * e[1]]
            }
            PointMap::Direction => {
                if p[0] == 0.0 && p[1] == 0.0 {
                    return None;
                }
                [p[1].atan2(p[0]).rem_euclid(2.0 * PI), 0.0]
            }
        };
        (q[0].is_finite() && q[1].is_finite()).then_some(q)
    }
}

/// Image measure under `map`: same weights, mapped points.
pub fn pushforward(measure: &DiscreteMeasure, map: &PointMap) -> Result<DiscreteMeasure> {
    if let Some(d) = map.source_dim() {
        if d != measure.dim() {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: measure.dim(),
            });
        }
    }
    if let PointMap::Affine { from, to, .. } = map {
        if !(1..=2).contains(to) || !(1..=2).contains(from) {
            return Err(Error::invalid("map", "affine dimensions must be 1 or 2"));
        }
    }
    pushforward_with(
        measure,
        map.target_dim(measure.dim()),
        map.lipschitz(),
        |p| map.apply(p),
    )
}

/// Image measure under an arbitrary map. With a Lipschitz bound the atom
/// spacing is scaled by it; otherwise it is re-estimated from the image.
pub fn pushforward_with<F>(
    measure: &DiscreteMeasure,
    target_dim: usize,
    lipschitz: Option<f64>,
    f: F,
) -> Result<DiscreteMeasure>
where
    F: Fn(Point) -> Option<Point>,
{
    let mut xs = Vec::with_capacity(measure.len());
    let mut ys = Vec::with_capacity(if target_dim == 2 { measure.len() } else { 0 });
    for (i, p) in measure.points().enumerate() {
        let q = f(p)
            .filter(|q| q[0].is_finite() && q[1].is_finite())
            .ok_or_else(|| {
                Error::invalid(
                    "map",
                    format!("undefined or non-finite at atom {i} ({p:?})"),
                )
            })?;
        xs.push(q[0]);
        if target_dim == 2 {
            ys.push(q[1]);
        }
    }
    let spacing = lipschitz.map(|l| l * measure.spacing());
    DiscreteMeasure::from_parts(target_dim, xs, ys, measure.weights().to_vec(), spacing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::uniform_interval_measure;

    #[test]
    fn identity_is_a_no_op() {
        let u = uniform_interval_measure(0.0, 1.0, 7).unwrap();
        assert_eq!(pushforward(&u, &PointMap::Identity).unwrap(), u);
    }

    #[test]
    fn circle_embedding_of_quarter_arc() {
        let u = uniform_interval_measure(0.0, PI / 2.0, 100).unwrap();
        let c = pushforward(&u, &PointMap::CircleEmbedding { radius: 1.0 }).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.len(), 100);
        assert_eq!(c.total_mass(), u.total_mass());
        for p in c.points() {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-14);
            assert!(p[0] >= 0.0 && p[1] >= 0.0);
        }
    }

    #[test]
    fn tangent_projection_lands_on_tangent_line() {
        let e = [0.6, 0.8];
        let map = PointMap::TangentProjection { direction: e };
        for p in [[0.1, 0.2], [1.0, -3.0], [0.0, 0.0]] {
            let q = map.apply(p).unwrap();
            assert!(((q[0] - e[0]) * e[0] + (q[1] - e[1]) * e[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn direction_map_undefined_at_origin() {
        let m = DiscreteMeasure::dirac(2, [0.0, 0.0]).unwrap();
        assert!(pushforward(&m, &PointMap::Direction).is_err());
        let m = DiscreteMeasure::dirac(2, [0.0, 2.0]).unwrap();
        let d = pushforward(&m, &PointMap::Direction).unwrap();
        assert!((d.xs()[0] - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_checked() {
        let u = uniform_interval_measure(0.0, 1.0, 3).unwrap();
        assert!(pushforward(&u, &PointMap::Direction).is_err());
    }
}
