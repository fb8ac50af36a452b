//! Closed-form dimension thresholds for Kakeya- and Furstenberg-type sets and
//! the comparison curves plotted against them.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Fourier dimension of `(s, t)`-Kakeya sets.
    KakeyaFh,
    /// Fourier dimension of Furstenberg sets over a Fourier-dimension-`t` line family.
    FurstenbergFf,
    /// Fourier dimension of Furstenberg sets over a Hausdorff-dimension-`t` line family.
    FurstenbergFh,
}

impl Regime {
    pub const ALL: [Regime; 3] = [
        Regime::KakeyaFh,
        Regime::FurstenbergFf,
        Regime::FurstenbergFh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::KakeyaFh => "kakeya-fh",
            Regime::FurstenbergFf => "furstenberg-ff",
            Regime::FurstenbergFh => "furstenberg-fh",
        }
    }

    /// Upper end of the admissible `t` range.
    pub fn t_max(self) -> f64 {
        match self {
            Regime::KakeyaFh => 1.0,
            Regime::FurstenbergFf | Regime::FurstenbergFh => 2.0,
        }
    }

    pub fn bounds(self, s: f64, t: f64) -> Result<(f64, f64)> {
        match self {
            Regime::KakeyaFh => kakeya_bounds(s, t),
            Regime::FurstenbergFf => ff_bounds(s, t),
            Regime::FurstenbergFh => fh_bounds(s, t),
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kakeya" | "kakeya-fh" => Ok(Regime::KakeyaFh),
            "ff" | "furstenberg-ff" => Ok(Regime::FurstenbergFf),
            "fh" | "furstenberg-fh" => Ok(Regime::FurstenbergFh),
            other => Err(Error::invalid(
                "regime",
                format!("unknown regime `{other}` (kakeya, ff, fh)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub s: f64,
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    pub regime: Regime,
}

fn check(name: &str, v: f64, max: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v <= max {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{v} is not in (0, {max}]")))
    }
}

/// `(2st/(s+2t), min{s, 2t})` for `s, t ∈ (0, 1]`.
pub fn kakeya_bounds(s: f64, t: f64) -> Result<(f64, f64)> {
    check("s", s, 1.0)?;
    check("t", t, 1.0)?;
    Ok((2.0 * s * t / (s + 2.0 * t), s.min(2.0 * t)))
}

/// `(st/(s+t), min{s, 2t})` for `s ∈ (0, 1]`, `t ∈ (0, 2]`.
pub fn ff_bounds(s: f64, t: f64) -> Result<(f64, f64)> {
    check("s", s, 1.0)?;
    check("t", t, 2.0)?;
    Ok((s * t / (s + t), s.min(2.0 * t)))
}

/// `(0, 0)` for `t ≤ 1`; `(2s(t−1)/(s+2(t−1)), s)` for `1 < t ≤ 2`.
pub fn fh_bounds(s: f64, t: f64) -> Result<(f64, f64)> {
    check("s", s, 1.0)?;
    check("t", t, 2.0)?;
    if t <= 1.0 {
        return Ok((0.0, 0.0));
    }
    let u = t - 1.0;
    Ok((2.0 * s * u / (s + 2.0 * u), s))
}

/// Comparison curves from the Hausdorff and box-dimension literature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCurves {
    /// `min{s + t, (3s + t)/2, s + 1}`.
    pub hausdorff_furstenberg: f64,
    /// `max{s, t − 1}`.
    pub box_furstenberg: f64,
    /// `max{s, t/2}`.
    pub packing_furstenberg: f64,
}

pub fn reference_curves(s: f64, t: f64) -> Result<ReferenceCurves> {
    check("s", s, 1.0)?;
    check("t", t, 2.0)?;
    Ok(ReferenceCurves {
        hausdorff_furstenberg: (s + t).min((3.0 * s + t) / 2.0).min(s + 1.0),
        box_furstenberg: s.max(t - 1.0),
        packing_furstenberg: s.max(t / 2.0),
    })
}

/// Bounds on the Cartesian grid `s_grid × t_grid`, `s` varying slowest.
/// Fails if any row violates `0 ≤ lower ≤ upper ≤ 2` or if a lower bound
/// decreases along either grid direction (grids are sorted first).
pub fn bound_table(regime: Regime, s_grid: &[f64], t_grid: &[f64]) -> Result<Vec<ThresholdPoint>> {
    if s_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::invalid("grid", "empty parameter grid"));
    }
    let mut rows = Vec::with_capacity(s_grid.len() * t_grid.len());
    for &s in s_grid {
        for &t in t_grid {
            let (lower, upper) = regime.bounds(s, t)?;
            if !(0.0 <= lower && lower <= upper && upper <= 2.0) {
                return Err(Error::Precondition(format!(
                    "{}: bounds ({lower}, {upper}) out of order at s={s}, t={t}",
                    regime.as_str()
                )));
            }
            rows.push(ThresholdPoint {
                s,
                t,
                lower,
                upper,
                regime,
            });
        }
    }
    check_monotone(regime, s_grid, t_grid)?;
    Ok(rows)
}

fn check_monotone(regime: Regime, s_grid: &[f64], t_grid: &[f64]) -> Result<()> {
    let sorted = |g: &[f64]| {
        let mut v = g.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    let (ss, ts) = (sorted(s_grid), sorted(t_grid));
    let lower = |s, t| regime.bounds(s, t).map(|b| b.0);
    for &s in &ss {
        for w in ts.windows(2) {
            if lower(s, w[1])? < lower(s, w[0])? - 1e-12 {
                return Err(Error::Precondition(format!(
                    "{}: lower bound decreases in t at s={s}",
                    regime.as_str()
                )));
            }
        }
    }
    for &t in &ts {
        for w in ss.windows(2) {
            if lower(w[1], t)? < lower(w[0], t)? - 1e-12 {
                return Err(Error::Precondition(format!(
                    "{}: lower bound decreases in s at t={t}",
                    regime.as_str()
                )));
            }
        }
    }
    Ok(())
}

pub fn table_csv(rows: &[ThresholdPoint]) -> String {
    let mut out = String::from("regime,s,t,lower,upper\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e},{:.17e}",
            r.regime.as_str(),
            r.s,
            r.t,
            r.lower,
            r.upper
        );
    }
    out
}

/// `n` equally spaced points in `(0, max]`, excluding zero.
pub fn open_grid(max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| max * k as f64 / n as f64).collect()
}

/// Largest number of samples along a plotted curve.
pub const MAX_PLOT_SAMPLES: usize = 512;

/// The parameter held fixed in a one-parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fixed {
    S(f64),
    T(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigurePanel {
    pub name: &'static str,
    pub regime: Regime,
    pub fixed: Fixed,
}

/// Panels of the two bound-comparison figures: the Kakeya regime at fixed
/// `s` and fixed `t`, then both Furstenberg regimes at fixed `s` and `t`.
pub fn figure_panels() -> Vec<FigurePanel> {
    vec![
        FigurePanel {
            name: "fig1-kakeya-s0.4",
            regime: Regime::KakeyaFh,
            fixed: Fixed::S(0.4),
        },
        FigurePanel {
            name: "fig1-kakeya-t0.4",
            regime: Regime::KakeyaFh,
            fixed: Fixed::T(0.4),
        },
        FigurePanel {
            name: "fig2-ff-s0.4",
            regime: Regime::FurstenbergFf,
            fixed: Fixed::S(0.4),
        },
        FigurePanel {
            name: "fig2-ff-t0.4",
            regime: Regime::FurstenbergFf,
            fixed: Fixed::T(0.4),
        },
        FigurePanel {
            name: "fig2-fh-s0.4",
            regime: Regime::FurstenbergFh,
            fixed: Fixed::S(0.4),
        },
        FigurePanel {
            name: "fig2-fh-t1.5",
            regime: Regime::FurstenbergFh,
            fixed: Fixed::T(1.5),
        },
    ]
}

/// Bounds along the free parameter at `samples` equally spaced points of its
/// whole domain, `(0, 1]` for `s` and `(0, t_max]` for `t`.
pub fn sweep(regime: Regime, fixed: Fixed, samples: usize) -> Result<Vec<ThresholdPoint>> {
    if !(2..=MAX_PLOT_SAMPLES).contains(&samples) {
        return Err(Error::invalid(
            "samples",
            format!("{samples} is not in 2..={MAX_PLOT_SAMPLES}"),
        ));
    }
    match fixed {
        Fixed::S(s) => {
            check("s", s, 1.0)?;
            bound_table(regime, &[s], &open_grid(regime.t_max(), samples))
        }
        Fixed::T(t) => {
            check("t", t, regime.t_max())?;
            bound_table(regime, &open_grid(1.0, samples), &[t])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12
    }

    #[test]
    fn hand_values() {
        assert!(close(kakeya_bounds(1.0, 1.0).unwrap(), (2.0 / 3.0, 1.0)));
        assert!(close(kakeya_bounds(0.5, 0.5).unwrap(), (1.0 / 3.0, 0.5)));
        assert!(close(ff_bounds(1.0, 2.0).unwrap(), (2.0 / 3.0, 1.0)));
        assert!(close(fh_bounds(0.7, 1.0).unwrap(), (0.0, 0.0)));
        assert!(close(fh_bounds(1.0, 2.0).unwrap(), (2.0 / 3.0, 1.0)));
    }

    #[test]
    fn reference_values() {
        assert_eq!(
            reference_curves(1.0, 1.0).unwrap().hausdorff_furstenberg,
            2.0
        );
        let r = reference_curves(0.5, 2.0).unwrap();
        assert_eq!(r.box_furstenberg, 1.0);
        assert_eq!(r.packing_furstenberg, 1.0);
    }

    #[test]
    fn domain_is_strict() {
        assert!(kakeya_bounds(0.0, 0.5).is_err());
        assert!(kakeya_bounds(0.5, 1.5).is_err());
        assert!(ff_bounds(1.2, 1.0).is_err());
        assert!(fh_bounds(0.5, 2.5).is_err());
        assert!(fh_bounds(0.5, f64::NAN).is_err());
    }

    #[test]
    fn kakeya_sharp_as_t_vanishes() {
        for s in [0.2, 0.4, 1.0] {
            let (l, u) = kakeya_bounds(s, 1e-4).unwrap();
            assert!((l / u - 1.0).abs() <= 0.05);
        }
        let (l, u) = kakeya_bounds(1e-3, 0.4).unwrap();
        assert!(l / u >= 0.95);
    }

    #[test]
    fn ff_factor_two() {
        let (l, u) = ff_bounds(0.4, 1e-4).unwrap();
        assert!((0.49..=0.51).contains(&(l / u)));
        let (l, u) = ff_bounds(1e-4, 1.0).unwrap();
        assert!((l / u - 1.0).abs() <= 0.05);
    }

    #[test]
    fn fh_jump_at_one() {
        let s = 0.6;
        assert_eq!(fh_bounds(s, 1.0).unwrap(), (0.0, 0.0));
        let (l, u) = fh_bounds(s, 1.0 + 1e-9).unwrap();
        assert_eq!(u, s);
        assert!(l < 1e-8);
        let (l, _) = fh_bounds(s, 1.0 + 1e-3 * s).unwrap();
        assert!(l <= 0.01 * s);
    }

    #[test]
    fn table_rows_and_csv() {
        let rows = bound_table(Regime::KakeyaFh, &[0.4], &open_grid(1.0, 10)).unwrap();
        assert_eq!(rows.len(), 10);
        let csv = table_csv(&rows);
        assert_eq!(csv.lines().count(), 11);
        assert!(csv.starts_with("regime,s,t,lower,upper\n"));
        assert!(bound_table(Regime::KakeyaFh, &[], &[0.5]).is_err());
        assert_eq!(
            bound_table(Regime::FurstenbergFh, &[0.3], &[1.5])
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn full_grids_are_consistent() {
        for regime in Regime::ALL {
            let rows = bound_table(
                regime,
                &open_grid(1.0, 200),
                &open_grid(regime.t_max(), 200),
            );
            assert_eq!(rows.unwrap().len(), 40_000);
        }
    }

    #[test]
    fn sweeps_cover_the_domain() {
        for panel in figure_panels() {
            let rows = sweep(panel.regime, panel.fixed, MAX_PLOT_SAMPLES).unwrap();
            assert_eq!(rows.len(), MAX_PLOT_SAMPLES);
            let last = rows.last().unwrap();
            match panel.fixed {
                Fixed::S(_) => assert_eq!(last.t, panel.regime.t_max()),
                Fixed::T(_) => assert_eq!(last.s, 1.0),
            }
        }
        assert!(sweep(Regime::KakeyaFh, Fixed::T(1.5), 100).is_err());
        assert!(sweep(Regime::KakeyaFh, Fixed::S(0.4), 513).is_err());
        let fh = sweep(Regime::FurstenbergFh, Fixed::S(0.4), 512).unwrap();
        let jump = fh
            .windows(2)
            .find(|w| w[0].t <= 1.0 && w[1].t > 1.0)
            .unwrap();
        assert_eq!(jump[0].upper, 0.0);
        assert_eq!(jump[1].upper, 0.4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn sandwich(s in 1e-9f64..=1.0, t in 1e-9f64..=2.0, which in 0usize..3) {
            let regime = Regime::ALL[which];
            let t = t.min(regime.t_max());
            let (l, u) = regime.bounds(s, t).unwrap();
            prop_assert!(0.0 <= l && l <= u && u <= 2.0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2_000))]
        #[test]
        fn sharp_when_one_parameter_is_small(big in 0.05f64..=1.0, frac in 1e-6f64..=0.01) {
            let ratio = |(l, u): (f64, f64)| l / u;
            // Kakeya: t -> 0 with s fixed, and s -> 0 with t fixed
            prop_assert!((ratio(kakeya_bounds(big, frac * big).unwrap()) - 1.0).abs() <= 0.05);
            prop_assert!((ratio(kakeya_bounds(frac * big, big).unwrap()) - 1.0).abs() <= 0.05);
            prop_assert!((ratio(ff_bounds(frac * big, 2.0 * big).unwrap()) - 1.0).abs() <= 0.05);
            prop_assert!((ratio(fh_bounds(frac * big, 1.0 + big).unwrap()) - 1.0).abs() <= 0.05);
        }
    }
}
