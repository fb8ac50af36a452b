use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::FiberRule;
use crate::error::{Error, Result, ResultExt};
use crate::measure::{
    ifs_measure, product_measure, pushforward, uniform_interval_measure, DiscreteMeasure, IfsSpec,
    Point, PointMap, ATOM_CAP,
};

/// Default arc length of the direction set of the product example.
pub const PRODUCT_ARC: f64 = PI / 16.0;

/// Angle measures used as direction sets. Every variant has mass 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirectionSet {
    /// Uniform on `[start, start + length]`.
    Arc {
        start: f64,
        length: f64,
        atoms: usize,
    },
    /// Two-branch self-similar set of similarity dimension `dim`, placed
    /// affinely on `[start, start + length]`.
    Cantor {
        dim: f64,
        levels: u32,
        start: f64,
        length: f64,
    },
    Ifs {
        ifs: IfsSpec,
        start: f64,
        length: f64,
    },
    /// Explicit angles and weights; weights are normalized.
    Angles { angles: Vec<f64>, weights: Vec<f64> },
}

impl DirectionSet {
    pub fn quarter_arc(atoms: usize) -> Self {
        DirectionSet::Arc {
            start: 0.0,
            length: PI / 2.0,
            atoms,
        }
    }

    pub fn quarter_cantor(dim: f64, levels: u32) -> Self {
        DirectionSet::Cantor {
            dim,
            levels,
            start: 0.0,
            length: PI / 2.0,
        }
    }

    /// Angle measure on the line, mass 1.
    pub fn measure(&self) -> Result<DiscreteMeasure> {
        let place = |m: DiscreteMeasure, start: f64, length: f64| {
            if !(length.is_finite() && length > 0.0 && start.is_finite()) {
                return Err(Error::invalid(
                    "length",
                    "arc must have positive finite length",
                ));
            }
            pushforward(
                &m,
                &PointMap::Affine {
                    from: 1,
                    to: 1,
                    matrix: [[length, 0.0], [0.0, 0.0]],
                    offset: [start, 0.0],
                },
            )
        };
        match self {
            DirectionSet::Arc {
                start,
                length,
                atoms,
            } => uniform_interval_measure(*start, start + length, *atoms),
            DirectionSet::Cantor {
                dim,
                levels,
                start,
                length,
            } => place(
                ifs_measure(&IfsSpec::with_dimension(*dim, *levels)?)?,
                *start,
                *length,
            ),
            DirectionSet::Ifs { ifs, start, length } => place(ifs_measure(ifs)?, *start, *length),
            DirectionSet::Angles { angles, weights } => {
                let pts: Vec<Point> = angles.iter().map(|&a| [a, 0.0]).collect();
                DiscreteMeasure::new(1, &pts, weights.clone())?.normalized()
            }
        }
    }
}

/// Base point `a_e` of the segment in direction `e`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseRule {
    #[default]
    Origin,
    Constant {
        point: Point,
    },
    /// One base point per direction atom, in direction order.
    PerDirection {
        points: Vec<Point>,
    },
}

impl BaseRule {
    fn point(&self, index: usize) -> Point {
        match self {
            BaseRule::Origin => [0.0, 0.0],
            BaseRule::Constant { point } => *point,
            BaseRule::PerDirection { points } => points[index],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KakeyaSpec {
    pub directions: DirectionSet,
    pub fibers: FiberRule,
    #[serde(default)]
    pub base: BaseRule,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl KakeyaSpec {
    pub fn build(&self) -> Result<KakeyaMeasure> {
        let directions = self
            .directions
            .measure()
            .context(|| "direction set".into())?;
        kakeya_measure(&directions, &self.fibers, &self.base, self.seed)
    }
}

/// Which direction atom and which fiber atom produced an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomTag {
    pub direction: u32,
    pub fiber_atom: u32,
}

/// A Kakeya-type measure with the provenance of each atom.
#[derive(Debug, Clone, PartialEq)]
pub struct KakeyaMeasure {
    pub measure: DiscreteMeasure,
    pub tags: Vec<AtomTag>,
    pub angles: Vec<f64>,
    /// One fiber when shared, otherwise one per direction.
    pub fibers: Vec<DiscreteMeasure>,
    pub bases: Vec<Point>,
}

impl KakeyaMeasure {
    /// `(a_e, e, r)` for atom `i`.
    pub fn locate(&self, i: usize) -> (Point, Point, f64) {
        let tag = self.tags[i];
        let d = tag.direction as usize;
        let fiber = if self.fibers.len() == 1 {
            &self.fibers[0]
        } else {
            &self.fibers[d]
        };
        let (s, c) = self.angles[d].sin_cos();
        (self.bases[d], [c, s], fiber.xs()[tag.fiber_atom as usize])
    }
}

/// Weighted union of pushed fibers: atoms `a_e + r·e` with weight
/// `w_e · ν_e(r)` for every direction atom `e` (an angle) and fiber atom `r`.
pub fn kakeya_measure(
    directions: &DiscreteMeasure,
    fibers: &FiberRule,
    base: &BaseRule,
    seed: Option<u64>,
) -> Result<KakeyaMeasure> {
    if directions.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: directions.dim(),
        });
    }
    if (directions.total_mass() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(
            "directions",
            format!(
                "direction measure has mass {}, not 1",
                directions.total_mass()
            ),
        ));
    }
    if let BaseRule::PerDirection { points } = base {
        if points.len() != directions.len() {
            return Err(Error::invalid(
                "base",
                format!(
                    "{} base points for {} directions",
                    points.len(),
                    directions.len()
                ),
            ));
        }
    }
    let n_dir = directions.len();
    let fiber_list: Vec<DiscreteMeasure> = if fibers.is_shared() {
        vec![fibers
            .generate(seed, 0)
            .context(|| "fiber generation".into())?]
    } else {
        (0..n_dir)
            .into_par_iter()
            .map(|i| fibers.generate(seed, i as u64))
            .collect::<Result<_>>()
            .context(|| "fiber generation".into())?
    };
    let fiber_of = |i: usize| {
        if fiber_list.len() == 1 {
            &fiber_list[0]
        } else {
            &fiber_list[i]
        }
    };
    let total: usize = (0..n_dir).map(|i| fiber_of(i).len()).sum();
    if total > ATOM_CAP {
        return Err(Error::AtomCap {
            requested: total,
            limit: ATOM_CAP,
        });
    }
    let angles = directions.xs().to_vec();
    let bases: Vec<Point> = (0..n_dir).map(|i| base.point(i)).collect();
    let mut xs = Vec::with_capacity(total);
    let mut ys = Vec::with_capacity(total);
    let mut ws = Vec::with_capacity(total);
    let mut tags = Vec::with_capacity(total);
    let mut reach: f64 = 0.0;
    for (i, (&theta, &w)) in angles.iter().zip(directions.weights()).enumerate() {
        let (s, c) = theta.sin_cos();
        let b = bases[i];
        let f = fiber_of(i);
        for (k, (&r, &v)) in f.xs().iter().zip(f.weights()).enumerate() {
            xs.push(b[0] + r * c);
            ys.push(b[1] + r * s);
            ws.push(w * v);
            tags.push(AtomTag {
                direction: i as u32,
                fiber_atom: k as u32,
            });
            reach = reach.max(r.abs());
        }
    }
    let fiber_spacing = fiber_list.iter().map(|f| f.spacing()).fold(0.0, f64::max);
    let spacing = fiber_spacing.max(directions.spacing() * reach);
    let measure = DiscreteMeasure::from_parts(2, xs, ys, ws, Some(spacing))?;
    Ok(KakeyaMeasure {
        measure,
        tags,
        angles,
        fibers: fiber_list,
        bases,
    })
}

/// Segments `{r·e : r ∈ [0, 1]}` from the origin, one per direction atom,
/// carrying bump fibers of `fiber_atoms` atoms.
pub fn radial_kakeya(directions: &DiscreteMeasure, fiber_atoms: usize) -> Result<DiscreteMeasure> {
    radial_kakeya_with(directions, &FiberRule::Bump { atoms: fiber_atoms }, None)
}

pub fn radial_kakeya_with(
    directions: &DiscreteMeasure,
    fibers: &FiberRule,
    seed: Option<u64>,
) -> Result<DiscreteMeasure> {
    Ok(kakeya_measure(directions, fibers, &BaseRule::Origin, seed)?.measure)
}

/// `X₁ × [0, 1]` with `fiber_atoms` uniform atoms in the second factor.
pub fn product_kakeya(x1: &DiscreteMeasure, fiber_atoms: usize) -> Result<DiscreteMeasure> {
    if x1.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: x1.dim(),
        });
    }
    if (x1.total_mass() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(
            "X1",
            format!("mass {} is not 1", x1.total_mass()),
        ));
    }
    product_measure(x1, &uniform_interval_measure(0.0, 1.0, fiber_atoms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::nudft;

    #[test]
    fn single_direction_is_a_segment() {
        let d = DiscreteMeasure::dirac(1, [0.0, 0.0]).unwrap();
        let k = kakeya_measure(
            &d,
            &FiberRule::Uniform { atoms: 10 },
            &BaseRule::Origin,
            None,
        )
        .unwrap();
        let u = uniform_interval_measure(0.0, 1.0, 10).unwrap();
        assert_eq!(k.measure.xs(), u.xs());
        assert!(k.measure.ys().iter().all(|&y| y == 0.0));
        assert_eq!(k.measure.weights(), u.weights());
    }

    #[test]
    fn atoms_lie_on_their_segments() {
        let spec = KakeyaSpec {
            directions: DirectionSet::quarter_cantor(0.5, 4),
            fibers: FiberRule::Uniform { atoms: 16 },
            base: BaseRule::Constant {
                point: [0.25, -0.5],
            },
            seed: None,
        };
        let k = spec.build().unwrap();
        assert_eq!(k.measure.len(), 16 * 16);
        assert!((k.measure.total_mass() - 1.0).abs() < 1e-12);
        for i in 0..k.measure.len() {
            let (a, e, r) = k.locate(i);
            let p = k.measure.point(i);
            assert!((p[0] - a[0] - r * e[0]).abs() < 1e-15);
            assert!((p[1] - a[1] - r * e[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn full_circle_is_rotation_invariant() {
        let dirs = DirectionSet::Arc {
            start: 0.0,
            length: 2.0 * PI,
            atoms: 256,
        }
        .measure()
        .unwrap();
        let m = radial_kakeya(&dirs, 64).unwrap();
        // 256-fold symmetry: angles that differ by multiples of 2π/256 agree
        for rho in [3.0, 11.5] {
            let freqs: Vec<Point> = (0..8)
                .map(|k| {
                    let phi = 0.1 + k as f64 * 2.0 * PI / 256.0 * 32.0;
                    [rho * phi.cos(), rho * phi.sin()]
                })
                .collect();
            let v = nudft(&m, &freqs).unwrap();
            for z in &v {
                assert!((z.norm() - v[0].norm()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rotation_covariance() {
        let base = DirectionSet::quarter_cantor(0.5, 3);
        let phi = 0.3;
        let rotated = match &base {
            DirectionSet::Cantor {
                dim,
                levels,
                start,
                length,
            } => DirectionSet::Cantor {
                dim: *dim,
                levels: *levels,
                start: start + phi,
                length: *length,
            },
            _ => unreachable!(),
        };
        let a = radial_kakeya(&base.measure().unwrap(), 32).unwrap();
        let b = radial_kakeya(&rotated.measure().unwrap(), 32).unwrap();
        let xi = [4.2, -7.7];
        let (s, c) = phi.sin_cos();
        let back = [c * xi[0] + s * xi[1], -s * xi[0] + c * xi[1]];
        let vb = nudft(&b, &[xi]).unwrap()[0];
        let va = nudft(&a, &[back]).unwrap()[0];
        assert!((va - vb).norm() < 1e-10);
    }

    #[test]
    fn cap_enforced() {
        let d = DirectionSet::quarter_arc(4096).measure().unwrap();
        let err = radial_kakeya(&d, 2048).unwrap_err();
        assert!(matches!(err, Error::AtomCap { .. }));
    }

    #[test]
    fn product_kakeya_of_dirac_is_vertical_segment() {
        let d = DiscreteMeasure::dirac(1, [0.4, 0.0]).unwrap();
        let k = product_kakeya(&d, 8).unwrap();
        assert!(k.xs().iter().all(|&x| x == 0.4));
        assert_eq!(k.len(), 8);
    }

    #[test]
    fn arc_spacing_reflects_direction_resolution() {
        let d = DirectionSet::quarter_arc(512).measure().unwrap();
        let k = radial_kakeya(&d, 1024).unwrap();
        assert!((k.spacing() - PI / 1024.0 * (1.0 - 0.5 / 1024.0)).abs() < 1e-12);
    }
}
