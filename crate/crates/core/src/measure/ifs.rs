use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, ATOM_CAP};

/// Equicontractive self-similar system on `[0, 1]`: branch `i` maps
/// `x ↦ ratio·x + translations[i]` and is chosen with `probabilities[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsSpec {
    pub branches: usize,
    pub ratio: f64,
    pub translations: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub levels: u32,
}

impl IfsSpec {
    /// Two equally weighted branches at the ends of `[0, 1]` with the given ratio.
    pub fn two_branch(ratio: f64, levels: u32) -> Self {
        IfsSpec {
            branches: 2,
            ratio,
            translations: vec![0.0, 1.0 - ratio],
            probabilities: vec![0.5, 0.5],
            levels,
        }
    }

    pub fn middle_third(levels: u32) -> Self {
        Self::two_branch(1.0 / 3.0, levels)
    }

    /// Two-branch system whose similarity dimension equals `dim`.
    pub fn with_dimension(dim: f64, levels: u32) -> Result<Self> {
        if !(dim > 0.0 && dim <= 1.0) {
            return Err(Error::invalid(
                "dimension",
                format!("{dim} is not in (0, 1]"),
            ));
        }
        Ok(Self::two_branch(2f64.powf(-1.0 / dim), levels))
    }

    /// `log m / log(1/r)`.
    pub fn similarity_dimension(&self) -> f64 {
        (self.branches as f64).ln() / (1.0 / self.ratio).ln()
    }

    /// Length of a level-`levels` cylinder.
    pub fn cylinder_length(&self) -> f64 {
        self.ratio.powi(self.levels as i32)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.branches;
        if m < 2 {
            return Err(Error::invalid("branches", "need at least two branches"));
        }
        if self.translations.len() != m || self.probabilities.len() != m {
            return Err(Error::invalid(
                "translations",
                format!("expected {m} translations and probabilities"),
            ));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::invalid(
                "ratio",
                format!("{} is not in (0, 1)", self.ratio),
            ));
        }
        if m as f64 * self.ratio > 1.0 + 1e-12 {
            return Err(Error::invalid("ratio", "branches·ratio exceeds 1"));
        }
        if self.levels == 0 {
            return Err(Error::invalid("levels", "need at least one level"));
        }
        if let Some(p) = self
            .probabilities
            .iter()
            .find(|p| !(p.is_finite() && **p > 0.0))
        {
            return Err(Error::invalid(
                "probabilities",
                format!("{p} is not positive"),
            ));
        }
        let total: f64 = self.probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "probabilities",
                format!("sum to {total}, not 1"),
            ));
        }
        let mut ts = self.translations.clone();
        if ts.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("translations", "must be finite"));
        }
        ts.sort_by(|a, b| a.total_cmp(b));
        if ts[0] < -1e-12 || ts[m - 1] + self.ratio > 1.0 + 1e-12 {
            return Err(Error::invalid(
                "translations",
                "children must lie in [0, 1]",
            ));
        }
        if ts.windows(2).any(|w| w[1] < w[0] + self.ratio - 1e-12) {
            return Err(Error::invalid(
                "translations",
                "children overlap (open set condition fails)",
            ));
        }
        let count = (m as f64).powi(self.levels as i32);
        if count > ATOM_CAP as f64 {
            return Err(Error::AtomCap {
                requested: count.min(usize::MAX as f64) as usize,
                limit: ATOM_CAP,
            });
        }
        Ok(())
    }
}

/// One atom per level-`L` cylinder, at the cylinder midpoint, weighted by the
/// product of the branch probabilities along its address. Atoms are listed
/// in lexicographic address order.
pub fn ifs_measure(spec: &IfsSpec) -> Result<DiscreteMeasure> {
    spec.validate()?;
    let mut lefts = vec![0.0];
    let mut weights = vec![1.0];
    let mut scale = 1.0;
    for _ in 0..spec.levels {
        let mut next_l = Vec::with_capacity(lefts.len() * spec.branches);
        let mut next_w = Vec::with_capacity(lefts.len() * spec.branches);
        for (l, w) in lefts.iter().zip(&weights) {
            for (t, p) in spec.translations.iter().zip(&spec.probabilities) {
                next_l.push(l + scale * t);
                next_w.push(w * p);
            }
        }
        lefts = next_l;
        weights = next_w;
        scale *= spec.ratio;
    }
    let half = 0.5 * scale;
    let xs = lefts.into_iter().map(|l| l + half).collect();
    DiscreteMeasure::from_parts(1, xs, Vec::new(), weights, Some(scale))
}
