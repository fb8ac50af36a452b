use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{least_squares, DimensionEstimate, EstimatorKind};
use crate::fourier::plan::{Sampling, FIXED_SCAN_SAMPLES};
use crate::fourier::{nudft, FrequencyPlan};
use crate::measure::{DiscreteMeasure, Point};
use crate::numeric::derive_seed;

/// Cap on frequencies per annulus (dimension one) or per scanned direction.
const MAX_DENSE: usize = 1 << 18;

/// Fewest annuli a Fourier fit may use.
pub const MIN_FIT_ANNULI: usize = 5;

/// Floor keeping logarithms finite when an envelope vanishes.
const ENVELOPE_FLOOR: f64 = 1e-300;

/// Per-annulus maximum of `|μ̂| / mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub radii: Vec<f64>,
    pub envelope: Vec<f64>,
    /// Frequencies sampled in each annulus.
    pub samples: Vec<usize>,
}

impl DecayProfile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("R,envelope\n");
        for (r, e) in self.radii.iter().zip(&self.envelope) {
            let _ = writeln!(s, "{r:.17e},{e:.17e}");
        }
        s
    }

    /// Running maximum from the high-frequency end.
    pub fn tail_max(&self) -> DecayProfile {
        let mut env = self.envelope.clone();
        for j in (0..env.len().saturating_sub(1)).rev() {
            env[j] = env[j].max(env[j + 1]);
        }
        DecayProfile {
            envelope: env,
            ..self.clone()
        }
    }
}

/// Optional refinements of the Fourier fit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitOptions {
    /// Inclusive annulus index range `(first, last)` entering the fit.
    #[serde(default)]
    pub window: Option<(usize, usize)>,
    /// Fit the tail-maximum envelope instead of the raw one.
    #[serde(default)]
    pub tail_max: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierFit {
    pub estimate: DimensionEstimate,
    pub profile: DecayProfile,
}

pub fn decay_profile(measure: &DiscreteMeasure, plan: &FrequencyPlan) -> Result<DecayProfile> {
    plan.validate(measure.dim())?;
    let radii = plan.radii();
    let mass = measure.total_mass();
    let (envelope, samples) = if measure.dim() == 1 {
        profile_1d(measure, plan, &radii)?
    } else {
        profile_2d(measure, plan, &radii)?
    };
    let envelope = envelope
        .into_iter()
        .map(|v| (v / mass).clamp(ENVELOPE_FLOOR, 1.0))
        .collect();
    Ok(DecayProfile {
        radii,
        envelope,
        samples,
    })
}

fn profile_1d(
    measure: &DiscreteMeasure,
    plan: &FrequencyPlan,
    radii: &[f64],
) -> Result<(Vec<f64>, Vec<usize>)> {
    let extent = measure.bounds().side(0);
    let mut env = Vec::with_capacity(radii.len());
    let mut counts = Vec::with_capacity(radii.len());
    for (j, &r) in radii.iter().enumerate() {
        let count = match plan.sampling {
            Sampling::Dense => plan.samples.max((4.0 * extent * r).ceil() as usize),
            Sampling::Fixed => plan.samples,
        }
        .min(MAX_DENSE);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(plan.seed, j as u64));
        let freqs: Vec<Point> = (0..count)
            .map(|k| {
                [
                    r * (1.0 + (k as f64 + rng.gen::<f64>()) / count as f64),
                    0.0,
                ]
            })
            .collect();
        let values = nudft(measure, &freqs)?;
        env.push(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        counts.push(count);
    }
    Ok((env, counts))
}

fn profile_2d(
    measure: &DiscreteMeasure,
    plan: &FrequencyPlan,
    radii: &[f64],
) -> Result<(Vec<f64>, Vec<usize>)> {
    let q = plan.rings;
    let angles = plan.samples / q;
    let dirs: Vec<Point> = (0..angles)
        .map(|a| {
            let (s, c) = (PI * a as f64 / angles as f64).sin_cos();
            [c, s]
        })
        .collect();
    let mut freqs = Vec::with_capacity(radii.len() * q * angles);
    for (j, &r) in radii.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(plan.seed, j as u64));
        for ring in 0..q {
            for d in &dirs {
                let u: f64 = rng.gen();
                let rho = r * 2f64.powf((ring as f64 + u) / q as f64);
                freqs.push([rho * d[0], rho * d[1]]);
            }
        }
    }
    let values: Vec<f64> = nudft(measure, &freqs)?.iter().map(|v| v.norm()).collect();
    let per_annulus = q * angles;
    let mut env: Vec<f64> = values
        .chunks(per_annulus)
        .map(|c| c.iter().copied().fold(0.0, f64::max))
        .collect();
    let mut counts = vec![per_annulus; radii.len()];

    if plan.refine_directions > 0 {
        // rank angles by their typical per-annulus maximum
        let mut score: Vec<(f64, usize)> = (0..angles)
            .map(|a| {
                let total: f64 = values
                    .chunks(per_annulus)
                    .map(|c| {
                        (0..q)
                            .map(|ring| c[ring * angles + a])
                            .fold(ENVELOPE_FLOOR, f64::max)
                            .ln()
                    })
                    .sum();
                (total / radii.len() as f64, a)
            })
            .collect();
        score.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        let rhos = scan_radii(measure, plan, radii);
        let mut scan = Vec::new();
        for &(_, a) in score.iter().take(plan.refine_directions) {
            scan.extend(rhos.iter().map(|rho| [rho * dirs[a][0], rho * dirs[a][1]]));
        }
        let scan_values = nudft(measure, &scan)?;
        for (xi, v) in scan.iter().zip(scan_values) {
            let rho = xi[0].hypot(xi[1]);
            let j = (rho / radii[0]).log2().floor();
            if j >= 0.0 && (j as usize) < radii.len() {
                let j = j as usize;
                env[j] = env[j].max(v.norm());
                counts[j] += 1;
            }
        }
    }
    Ok((env, counts))
}

/// Radii of the scan along one refined direction.
fn scan_radii(measure: &DiscreteMeasure, plan: &FrequencyPlan, radii: &[f64]) -> Vec<f64> {
    match plan.sampling {
        Sampling::Dense => {
            let diameter = measure.bounds().diameter();
            let lo = radii[0];
            let hi = 2.0 * radii[radii.len() - 1];
            let step = if diameter > 0.0 {
                (1.0 / (4.0 * diameter)).max((hi - lo) / MAX_DENSE as f64)
            } else {
                (hi - lo) / plan.samples as f64
            };
            let steps = ((hi - lo) / step).floor() as usize;
            (0..steps).map(|k| lo + (k as f64 + 0.5) * step).collect()
        }
        Sampling::Fixed => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(plan.seed, u64::MAX));
            let n = FIXED_SCAN_SAMPLES;
            radii
                .iter()
                .flat_map(|&r| (0..n).map(move |k| (r, k)))
                .map(|(r, k)| r * (1.0 + (k as f64 + rng.gen::<f64>()) / n as f64))
                .collect()
        }
    }
}

/// Empirical Fourier dimension of `measure`: least-squares slope of
/// `ln envelope` against `ln R`, negated and doubled, clamped to `[0, d]`.
///
/// This is the decay dimension of the given measure, a lower bound for the
/// Fourier dimension of its support.
pub fn estimate_fourier_dim(
    measure: &DiscreteMeasure,
    plan: &FrequencyPlan,
) -> Result<DimensionEstimate> {
    Ok(estimate_fourier_dim_with(measure, plan, &FitOptions::default())?.estimate)
}

pub fn estimate_fourier_dim_with(
    measure: &DiscreteMeasure,
    plan: &FrequencyPlan,
    options: &FitOptions,
) -> Result<FourierFit> {
    plan.validate(measure.dim())?;
    let (first, last) = options.window.unwrap_or((0, plan.annuli));
    if last > plan.annuli || first > last {
        return Err(Error::invalid(
            "window",
            format!("({first}, {last}) is not inside 0..={}", plan.annuli),
        ));
    }
    if last - first + 1 < MIN_FIT_ANNULI {
        return Err(Error::TooFewScales {
            found: last - first + 1,
            required: MIN_FIT_ANNULI,
        });
    }
    let radii = plan.radii();
    let cap = measure.atomization_frequency();
    if radii[last] > cap * (1.0 + 1e-9) {
        return Err(Error::ScaleWindow {
            requested_min: radii[first],
            requested_max: radii[last],
            admissible_min: 1.0,
            admissible_max: cap,
        });
    }
    let mut profile = decay_profile(measure, plan)?;
    if options.tail_max {
        profile = profile.tail_max();
    }
    let xs: Vec<f64> = radii[first..=last].iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = profile.envelope[first..=last]
        .iter()
        .map(|e| e.ln())
        .collect();
    let fit = least_squares(&xs, &ys)?;
    let estimate = DimensionEstimate::new(
        EstimatorKind::Fourier,
        -fit.slope,
        measure.dim(),
        fit.rms,
        (radii[first], radii[last]),
        last - first + 1,
    );
    Ok(FourierFit { estimate, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{ifs_measure, uniform_interval_measure, IfsSpec};

    #[test]
    fn dirac_profile_is_flat_one() {
        let d = DiscreteMeasure::dirac(1, [0.0, 0.0]).unwrap();
        let p = decay_profile(&d, &FrequencyPlan::new(1, 4.0, 8, 1)).unwrap();
        assert!(p.envelope.iter().all(|&e| (e - 1.0).abs() < 1e-15));
        let e = estimate_fourier_dim(&d, &FrequencyPlan::new(1, 4.0, 8, 1)).unwrap();
        assert_eq!(e.dim_value, 0.0);
    }

    #[test]
    fn uniform_envelope_follows_sinc() {
        let u = uniform_interval_measure(0.0, 1.0, 10_000).unwrap();
        let p = decay_profile(&u, &FrequencyPlan::new(1, 4.0, 8, 7)).unwrap();
        for (r, e) in p.radii.iter().zip(&p.envelope) {
            let oracle = 1.0 / (PI * r);
            assert!(*e <= 3.0 * oracle && *e >= oracle / 3.0, "R={r} e={e}");
        }
    }

    #[test]
    fn cantor_envelope_does_not_decay() {
        let c = ifs_measure(&IfsSpec::middle_third(12)).unwrap();
        let p = decay_profile(&c, &FrequencyPlan::new(1, 4.0, 8, 7)).unwrap();
        assert!(p.envelope.iter().all(|&e| e >= 0.2), "{:?}", p.envelope);
    }

    #[test]
    fn atomization_cap_enforced() {
        let u = uniform_interval_measure(0.0, 1.0, 1000).unwrap();
        let err = estimate_fourier_dim(&u, &FrequencyPlan::new(1, 4.0, 8, 0)).unwrap_err();
        assert!(matches!(err, Error::ScaleWindow { .. }));
    }

    #[test]
    fn narrow_window_rejected() {
        let u = uniform_interval_measure(0.0, 1.0, 10_000).unwrap();
        let opts = FitOptions {
            window: Some((2, 5)),
            tail_max: false,
        };
        let err = estimate_fourier_dim_with(&u, &FrequencyPlan::new(1, 4.0, 8, 0), &opts);
        assert!(matches!(err, Err(Error::TooFewScales { .. })));
    }

    #[test]
    fn csv_layout() {
        let d = DiscreteMeasure::dirac(1, [0.0, 0.0]).unwrap();
        let p = decay_profile(&d, &FrequencyPlan::new(1, 1.0, 6, 1)).unwrap();
        let csv = p.to_csv();
        assert!(csv.starts_with("R,envelope\n"));
        assert_eq!(csv.lines().count(), 8);
    }
}
