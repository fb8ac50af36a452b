use serde::{Deserialize, Serialize};

use crate::constructions::{
    brownian_image, furstenberg_measure, kakeya_measure, product_kakeya, BaseRule, BrownianOptions,
    DirectionSet, FiberRule, LineFamily,
};
use crate::error::{Error, Result, ResultExt};
use crate::measure::{
    ifs_measure, product_measure, uniform_interval_measure, DiscreteMeasure, IfsSpec,
};

/// Every measure the laboratory can build from a JSON description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstructionSpec {
    /// Uniform on `[0, 1]`.
    Uniform {
        atoms: usize,
    },
    Ifs {
        ifs: IfsSpec,
    },
    /// Unit mass at the origin.
    Dirac {
        dim: usize,
    },
    /// Fibers along unit segments `a_e + [0, 1]·e`, `e` drawn from `directions`.
    Kakeya {
        directions: DirectionSet,
        fibers: FiberRule,
        #[serde(default)]
        base: BaseRule,
    },
    /// `X₁ × [0, 1]`, with `X₁` generated by `x1` on `[0, 1]`.
    Product {
        x1: FiberRule,
        fiber_atoms: usize,
    },
    /// Lines `(θ, a)` drawn from `theta × offset`, each carrying a fiber.
    Furstenberg {
        theta: DirectionSet,
        offset: DirectionSet,
        fibers: FiberRule,
    },
    /// Explicit line family with fibers.
    Lines {
        family: LineFamily,
        fibers: FiberRule,
    },
    /// Planar Brownian image of a two-branch self-similar set of dimension
    /// `dim / 2`.
    Brownian {
        dim: f64,
        levels: u32,
        #[serde(default)]
        options: BrownianOptions,
    },
}

impl ConstructionSpec {
    pub fn id(&self) -> &'static str {
        match self {
            ConstructionSpec::Uniform { .. } => "uniform",
            ConstructionSpec::Ifs { .. } => "ifs",
            ConstructionSpec::Dirac { .. } => "dirac",
            ConstructionSpec::Kakeya { .. } => "kakeya",
            ConstructionSpec::Product { .. } => "product",
            ConstructionSpec::Furstenberg { .. } => "furstenberg",
            ConstructionSpec::Lines { .. } => "lines",
            ConstructionSpec::Brownian { .. } => "brownian",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        match self {
            ConstructionSpec::Kakeya { fibers, .. }
            | ConstructionSpec::Furstenberg { fibers, .. }
            | ConstructionSpec::Lines { fibers, .. } => fibers.is_stochastic(),
            ConstructionSpec::Product { x1, .. } => x1.is_stochastic(),
            ConstructionSpec::Brownian { .. } => true,
            _ => false,
        }
    }

    /// Fourier dimension of the limiting set when it is known in closed form.
    pub fn predicted_fourier_dim(&self) -> Option<f64> {
        let full_fiber =
            |f: &FiberRule| matches!(f, FiberRule::Uniform { .. } | FiberRule::Bump { .. });
        match self {
            ConstructionSpec::Uniform { .. } => Some(1.0),
            ConstructionSpec::Dirac { .. } => Some(0.0),
            ConstructionSpec::Ifs { ifs } if is_middle_third(ifs) => Some(0.0),
            ConstructionSpec::Kakeya {
                directions, fibers, ..
            } if full_fiber(fibers) => match directions {
                DirectionSet::Arc { .. } => Some(2.0),
                DirectionSet::Cantor { dim, .. } => Some(2.0 * dim),
                _ => None,
            },
            ConstructionSpec::Product {
                x1: FiberRule::Brownian { dim, .. },
                ..
            } => Some(*dim),
            ConstructionSpec::Product {
                x1: FiberRule::Uniform { .. } | FiberRule::Bump { .. },
                ..
            } => Some(2.0),
            ConstructionSpec::Furstenberg { theta, offset, .. }
                if matches!(theta, DirectionSet::Angles { angles, .. } if angles.len() == 1)
                    && matches!(offset, DirectionSet::Ifs { ifs, .. } if is_middle_third(ifs)) =>
            {
                Some(0.0)
            }
            ConstructionSpec::Brownian { dim, .. } => Some(*dim),
            _ => None,
        }
    }

    /// Builds the measure. Stochastic constructions require `seed`.
    pub fn build(&self, seed: Option<u64>) -> Result<DiscreteMeasure> {
        if self.is_stochastic() && seed.is_none() {
            return Err(Error::invalid(
                "seed",
                format!(
                    "`{}` construction is stochastic and needs a seed",
                    self.id()
                ),
            ));
        }
        let ctx = || format!("building `{}`", self.id());
        match self {
            ConstructionSpec::Uniform { atoms } => uniform_interval_measure(0.0, 1.0, *atoms),
            ConstructionSpec::Ifs { ifs } => ifs_measure(ifs),
            ConstructionSpec::Dirac { dim } => DiscreteMeasure::dirac(*dim, [0.0, 0.0]),
            ConstructionSpec::Kakeya {
                directions,
                fibers,
                base,
            } => {
                let dirs = directions.measure().context(|| "direction set".into())?;
                Ok(kakeya_measure(&dirs, fibers, base, seed)?.measure)
            }
            ConstructionSpec::Product { x1, fiber_atoms } => {
                let x = x1.generate(seed, 0).context(|| "X1".into())?;
                product_kakeya(&x, *fiber_atoms)
            }
            ConstructionSpec::Furstenberg {
                theta,
                offset,
                fibers,
            } => {
                let params = product_measure(
                    &theta.measure().context(|| "theta".into())?,
                    &offset.measure().context(|| "offset".into())?,
                )?;
                let family = LineFamily::from_parameter_measure(&params)?;
                furstenberg_measure(&family, fibers, seed)
            }
            ConstructionSpec::Lines { family, fibers } => furstenberg_measure(family, fibers, seed),
            ConstructionSpec::Brownian {
                dim,
                levels,
                options,
            } => {
                let a = ifs_measure(&IfsSpec::with_dimension(dim / 2.0, *levels)?)?;
                brownian_image(&a, *dim, seed.unwrap_or_default(), options)
            }
        }
        .context(ctx)
    }
}

fn is_middle_third(ifs: &IfsSpec) -> bool {
    ifs.branches == 2
        && (ifs.ratio - 1.0 / 3.0).abs() < 1e-12
        && ifs.translations.len() == 2
        && ifs.translations[0].abs() < 1e-12
        && (ifs.translations[1] - 2.0 / 3.0).abs() < 1e-12
}
