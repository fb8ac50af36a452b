use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constructions::FiberRule;
use crate::error::{Error, Result, ResultExt};
use crate::fit::least_squares;
use crate::measure::{DiscreteMeasure, Point, ATOM_CAP};
use crate::numeric::pairwise_sum;

/// Largest admissible `|a|`.
pub const MAX_OFFSET: f64 = 8.0;

/// The line `{x : x·(−sin θ, cos θ) = a}` with direction `(cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub theta: f64,
    pub a: f64,
    pub weight: f64,
}

impl Line {
    pub fn direction(&self) -> Point {
        let (s, c) = self.theta.sin_cos();
        [c, s]
    }

    /// Foot of the perpendicular from the origin.
    pub fn base_point(&self) -> Point {
        let (s, c) = self.theta.sin_cos();
        [-self.a * s, self.a * c]
    }
}

/// Weighted set of lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LineFamilyRepr", into = "LineFamilyRepr")]
pub struct LineFamily {
    lines: Vec<Line>,
    /// Resolution of the `(θ, a)` parameters, as for atom spacing.
    spacing: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineFamilyRepr {
    lines: Vec<Line>,
    #[serde(default)]
    spacing: Option<f64>,
}

impl TryFrom<LineFamilyRepr> for LineFamily {
    type Error = Error;
    fn try_from(r: LineFamilyRepr) -> Result<Self> {
        LineFamily::new(r.lines, r.spacing)
    }
}

impl From<LineFamily> for LineFamilyRepr {
    fn from(f: LineFamily) -> Self {
        LineFamilyRepr {
            lines: f.lines,
            spacing: Some(f.spacing),
        }
    }
}

impl LineFamily {
    /// Without `spacing`, the parameter resolution is estimated from the
    /// `(θ, a)` atoms.
    pub fn new(lines: Vec<Line>, spacing: Option<f64>) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::invalid("lines", "family is empty"));
        }
        for (i, l) in lines.iter().enumerate() {
            if !(l.theta.is_finite() && l.a.is_finite()) {
                return Err(Error::invalid("lines", format!("line {i} is not finite")));
            }
            if l.a.abs() > MAX_OFFSET {
                return Err(Error::invalid(
                    "lines",
                    format!("line {i} has |a| = {} above {MAX_OFFSET}", l.a.abs()),
                ));
            }
            if !(l.weight.is_finite() && l.weight > 0.0) {
                return Err(Error::invalid(
                    "lines",
                    format!("line {i} has weight {}", l.weight),
                ));
            }
        }
        let spacing = match spacing {
            Some(s) if s.is_finite() && s >= 0.0 => s,
            Some(s) => return Err(Error::invalid("spacing", format!("{s} is not a length"))),
            None => {
                let pts: Vec<Point> = lines.iter().map(|l| [l.theta, l.a]).collect();
                DiscreteMeasure::new(2, &pts, lines.iter().map(|l| l.weight).collect())?.spacing()
            }
        };
        Ok(LineFamily { lines, spacing })
    }

    /// Lines from a planar measure whose atoms are `(θ, a)` pairs.
    pub fn from_parameter_measure(params: &DiscreteMeasure) -> Result<Self> {
        if params.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: params.dim(),
            });
        }
        let lines = params
            .points()
            .zip(params.weights())
            .map(|(p, &weight)| Line {
                theta: p[0],
                a: p[1],
                weight,
            })
            .collect();
        LineFamily::new(lines, Some(params.spacing()))
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.lines.iter().map(|l| l.weight).collect::<Vec<_>>())
    }
}

/// Atoms `a_ℓ + r·e_ℓ` weighted by line weight times fiber weight. Fibers
/// have mass 1, so the total mass equals the family's.
pub fn furstenberg_measure(
    family: &LineFamily,
    fibers: &FiberRule,
    seed: Option<u64>,
) -> Result<DiscreteMeasure> {
    let shared = if fibers.is_shared() {
        Some(
            fibers
                .generate(seed, 0)
                .context(|| "fiber generation".into())?,
        )
    } else {
        None
    };
    let total = family.len().saturating_mul(fibers.atom_count());
    if total > ATOM_CAP {
        return Err(Error::AtomCap {
            requested: total,
            limit: ATOM_CAP,
        });
    }
    let mut xs = Vec::with_capacity(total);
    let mut ys = Vec::with_capacity(total);
    let mut ws = Vec::with_capacity(total);
    let mut reach: f64 = 0.0;
    let mut fiber_spacing: f64 = 0.0;
    for (i, line) in family.lines().iter().enumerate() {
        let own;
        let fiber = match &shared {
            Some(f) => f,
            None => {
                own = fibers.generate(seed, i as u64)?;
                &own
            }
        };
        fiber_spacing = fiber_spacing.max(fiber.spacing());
        let e = line.direction();
        let b = line.base_point();
        for (&r, &v) in fiber.xs().iter().zip(fiber.weights()) {
            xs.push(b[0] + r * e[0]);
            ys.push(b[1] + r * e[1]);
            ws.push(line.weight * v);
            reach = reach.max((line.a * line.a + r * r).sqrt());
        }
    }
    // |∂/∂θ| = √(a² + r²), |∂/∂a| = 1
    let spacing = fiber_spacing.max(family.spacing() * reach.max(1.0));
    DiscreteMeasure::from_parts(2, xs, ys, ws, Some(spacing))
}

/// Mass of the lines with `|e_ℓ·ξ| < α|ξ|`.
pub fn strip_mass(family: &LineFamily, xi: Point, alpha: f64) -> Result<f64> {
    let norm = xi[0].hypot(xi[1]);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::invalid(
            "xi",
            "frequency must be non-zero and finite",
        ));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is not in (0, 1]")));
    }
    if alpha >= 1.0 - f64::EPSILON {
        return Ok(family.total_mass());
    }
    let u = [xi[0] / norm, xi[1] / norm];
    let w: Vec<f64> = family
        .lines()
        .iter()
        .filter(|l| {
            let e = l.direction();
            (e[0] * u[0] + e[1] * u[1]).abs() < alpha
        })
        .map(|l| l.weight)
        .collect();
    Ok(pairwise_sum(&w))
}

/// Line normals probed by [`strip_scaling`] beyond the equally spaced angles.
const MAX_NORMAL_PROBES: usize = 1024;

/// Power-law fit of the worst-case strip mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripScaling {
    pub alphas: Vec<f64>,
    /// `sup_ξ strip_mass(ξ, α)` over the probed frequency directions.
    pub max_mass: Vec<f64>,
    pub slope: f64,
    pub residual: f64,
}

/// Slope of `log sup_ξ strip_mass` against `log α` over dyadic
/// `α ∈ [alpha_min, alpha_max]`, with `ξ` ranging over `directions` equally
/// spaced angles in `[0, π)` and up to 1024 distinct line normals.
pub fn strip_scaling(
    family: &LineFamily,
    alpha_min: f64,
    alpha_max: f64,
    directions: usize,
) -> Result<StripScaling> {
    if !(alpha_min > 0.0 && alpha_min < alpha_max && alpha_max < 1.0) {
        return Err(Error::invalid(
            "alpha",
            "need 0 < alpha_min < alpha_max < 1",
        ));
    }
    if directions == 0 {
        return Err(Error::invalid("directions", "need at least one direction"));
    }
    let mut probes: Vec<f64> = (0..directions)
        .map(|k| PI * k as f64 / directions as f64)
        .collect();
    let mut normals: Vec<f64> = family
        .lines()
        .iter()
        .map(|l| (l.theta + PI / 2.0).rem_euclid(PI))
        .collect();
    normals.sort_by(f64::total_cmp);
    normals.dedup();
    let stride = normals.len().div_ceil(MAX_NORMAL_PROBES).max(1);
    probes.extend(normals.into_iter().step_by(stride));
    let mut alphas = Vec::new();
    let mut a = alpha_max;
    while a >= alpha_min * (1.0 - 1e-12) {
        alphas.push(a);
        a /= 2.0;
    }
    if alphas.len() < 3 {
        return Err(Error::TooFewScales {
            found: alphas.len(),
            required: 3,
        });
    }
    let max_mass: Vec<f64> = alphas
        .iter()
        .map(|&alpha| {
            probes
                .iter()
                .map(|phi| strip_mass(family, [phi.cos(), phi.sin()], alpha))
                .try_fold(0.0, |m: f64, v| v.map(|v| m.max(v)))
        })
        .collect::<Result<_>>()?;
    if max_mass.iter().any(|&m| m <= 0.0) {
        return Err(Error::Precondition(
            "some strip is empty for every probed frequency; widen the window".into(),
        ));
    }
    let xs: Vec<f64> = alphas.iter().map(|a| a.log2()).collect();
    let ys: Vec<f64> = max_mass.iter().map(|m| m.log2()).collect();
    let fit = least_squares(&xs, &ys)?;
    Ok(StripScaling {
        alphas,
        max_mass,
        slope: fit.slope,
        residual: fit.rms,
    })
}
