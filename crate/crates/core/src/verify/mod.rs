//! Experiments: build a construction, run the estimators, compare against
//! predicted values and the closed-form bounds.
//!
//! Verdicts cover the explicit example measures only. The thresholds in
//! [`crate::bounds`] are infima over all sets and are not tested here beyond
//! the lower-bound sandwich.

mod construction;
mod manifest;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use construction::ConstructionSpec;
pub use manifest::default_manifest;

use crate::bounds::Regime;
use crate::error::{Error, Result, ResultExt};
use crate::fit::{median, DimensionEstimate, EstimatorKind};
use crate::fourier::{estimate_fourier_dim_with, FitOptions, FrequencyPlan};
use crate::measure::{box_counting, frostman_exponent, ScaleWindow};
use crate::numeric::derive_seed;

/// Slack below the closed-form lower bound tolerated by the sandwich check.
pub const SANDWICH_SLACK: f64 = 0.25;

/// Stated in every report.
pub const SCOPE_NOTE: &str = "thresholds are infima over all sets; only the explicit \
examples' values and the lower-bound sandwich are checked";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSettings {
    pub plan: FrequencyPlan,
    #[serde(default)]
    pub fit: FitOptions,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorPlans {
    #[serde(default)]
    pub fourier: Option<FourierSettings>,
    #[serde(default)]
    pub frostman: Option<ScaleWindow>,
    #[serde(default)]
    pub box_counting: Option<ScaleWindow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|value − predicted| ≤ tolerance`
    #[default]
    Within,
    /// `value ≥ predicted − tolerance`
    AtLeast,
    /// `value ≤ predicted + tolerance`
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub estimator: EstimatorKind,
    pub predicted: f64,
    pub tolerance: f64,
    #[serde(default)]
    pub comparison: Comparison,
}

impl Check {
    pub fn within(estimator: EstimatorKind, predicted: f64, tolerance: f64) -> Self {
        Check {
            estimator,
            predicted,
            tolerance,
            comparison: Comparison::Within,
        }
    }

    pub fn at_least(estimator: EstimatorKind, predicted: f64, tolerance: f64) -> Self {
        Check {
            comparison: Comparison::AtLeast,
            ..Check::within(estimator, predicted, tolerance)
        }
    }

    pub fn at_most(estimator: EstimatorKind, predicted: f64, tolerance: f64) -> Self {
        Check {
            comparison: Comparison::AtMost,
            ..Check::within(estimator, predicted, tolerance)
        }
    }

    pub fn holds(&self, value: f64) -> bool {
        match self.comparison {
            Comparison::Within => (value - self.predicted).abs() <= self.tolerance,
            Comparison::AtLeast => value >= self.predicted - self.tolerance,
            Comparison::AtMost => value <= self.predicted + self.tolerance,
        }
    }
}

/// `bounds.lower(s, t) − SANDWICH_SLACK ≤` median Fourier estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundCheck {
    pub regime: Regime,
    pub s: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub construction: ConstructionSpec,
    /// One run per seed for stochastic constructions; must be empty otherwise.
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub estimators: EstimatorPlans,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub bound: Option<BoundCheck>,
    /// The entry is expected to FAIL; a pass counts against the suite.
    #[serde(default)]
    pub negative_control: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.checks.is_empty() {
            return Err(Error::invalid("checks", "experiment has no checks"));
        }
        for c in &self.checks {
            if !(c.tolerance.is_finite() && c.tolerance > 0.0) {
                return Err(Error::invalid(
                    "tolerance",
                    format!("{} is not positive", c.tolerance),
                ));
            }
            if !c.predicted.is_finite() {
                return Err(Error::invalid("predicted", "must be finite"));
            }
            let planned = match c.estimator {
                EstimatorKind::Fourier => self.estimators.fourier.is_some(),
                EstimatorKind::Frostman => self.estimators.frostman.is_some(),
                EstimatorKind::BoxCounting => self.estimators.box_counting.is_some(),
            };
            if !planned {
                return Err(Error::invalid(
                    "checks",
                    format!("{:?} check has no estimator plan", c.estimator),
                ));
            }
        }
        if let Some(b) = &self.bound {
            if self.estimators.fourier.is_none() {
                return Err(Error::invalid("bound", "bound check needs a Fourier plan"));
            }
            b.regime.bounds(b.s, b.t).context(|| "bound".into())?;
        }
        match (self.construction.is_stochastic(), self.seeds.is_empty()) {
            (true, true) => Err(Error::invalid(
                "seeds",
                "stochastic construction needs a non-empty seed list",
            )),
            (false, false) => Err(Error::invalid(
                "seeds",
                "deterministic construction takes no seeds",
            )),
            _ => Ok(()),
        }
    }
}

/// Estimates from one construction draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: Option<u64>,
    pub atoms: usize,
    pub spacing: f64,
    pub fourier: Option<DimensionEstimate>,
    pub frostman: Option<DimensionEstimate>,
    pub box_counting: Option<DimensionEstimate>,
}

/// Median dimension over runs, per estimator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimates {
    pub fourier: Option<f64>,
    pub frostman: Option<f64>,
    pub box_counting: Option<f64>,
}

impl Estimates {
    pub fn get(&self, kind: EstimatorKind) -> Option<f64> {
        match kind {
            EstimatorKind::Fourier => self.fourier,
            EstimatorKind::Frostman => self.frostman,
            EstimatorKind::BoxCounting => self.box_counting,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    #[serde(flatten)]
    pub check: Check,
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundOutcome {
    #[serde(flatten)]
    pub check: BoundCheck,
    pub lower: f64,
    pub upper: f64,
    pub fourier: f64,
    pub pass: bool,
}

/// Outcome of one experiment. `wall_time` is not serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub construction: String,
    pub predicted_fourier: Option<f64>,
    pub runs: Vec<RunRecord>,
    pub median: Estimates,
    pub checks: Vec<CheckOutcome>,
    pub bound: Option<BoundOutcome>,
    pub error: Option<String>,
    pub negative_control: bool,
    pub pass: bool,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Verdict {
    /// Passed, or failed as a negative control should.
    pub fn as_expected(&self) -> bool {
        self.pass != self.negative_control
    }

    fn failed(config: &ExperimentConfig, error: &Error, wall_time: Duration) -> Self {
        Verdict {
            name: config.name.clone(),
            construction: config.construction.id().to_string(),
            predicted_fourier: config.construction.predicted_fourier_dim(),
            runs: Vec::new(),
            median: Estimates::default(),
            checks: Vec::new(),
            bound: None,
            error: Some(error.to_string()),
            negative_control: config.negative_control,
            pass: false,
            wall_time,
        }
    }
}

fn run_once(config: &ExperimentConfig, seed: Option<u64>) -> Result<RunRecord> {
    let measure = config.construction.build(seed)?;
    let est = &config.estimators;
    let fourier = est
        .fourier
        .as_ref()
        .map(|f| {
            let mut plan = f.plan.clone();
            if let Some(s) = seed {
                plan.seed = derive_seed(plan.seed, s);
            }
            estimate_fourier_dim_with(&measure, &plan, &f.fit).map(|fit| fit.estimate)
        })
        .transpose()
        .context(|| "fourier estimate".into())?;
    let frostman = est
        .frostman
        .as_ref()
        .map(|w| frostman_exponent(&measure, w, None))
        .transpose()
        .context(|| "frostman estimate".into())?;
    let box_counting = est
        .box_counting
        .as_ref()
        .map(|w| box_counting(&measure, w).map(|b| b.estimate))
        .transpose()
        .context(|| "box-counting estimate".into())?;
    Ok(RunRecord {
        seed,
        atoms: measure.len(),
        spacing: measure.spacing(),
        fourier,
        frostman,
        box_counting,
    })
}

/// Runs every seed of `config` and evaluates its checks on the seed medians.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Verdict> {
    let start = Instant::now();
    config
        .validate()
        .context(|| format!("experiment `{}`", config.name))?;
    let seeds: Vec<Option<u64>> = if config.seeds.is_empty() {
        vec![None]
    } else {
        config.seeds.iter().map(|&s| Some(s)).collect()
    };
    let runs = seeds
        .iter()
        .map(|&seed| {
            run_once(config, seed).context(|| match seed {
                Some(s) => format!("experiment `{}`, seed {s}", config.name),
                None => format!("experiment `{}`", config.name),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let med = |f: fn(&RunRecord) -> Option<DimensionEstimate>| {
        let v: Vec<f64> = runs
            .iter()
            .filter_map(|r| f(r).map(|e| e.dim_value))
            .collect();
        median(&v)
    };
    let median = Estimates {
        fourier: med(|r| r.fourier),
        frostman: med(|r| r.frostman),
        box_counting: med(|r| r.box_counting),
    };
    let checks: Vec<CheckOutcome> = config
        .checks
        .iter()
        .map(|c| {
            let value = median.get(c.estimator).unwrap_or(f64::NAN);
            CheckOutcome {
                check: *c,
                value,
                pass: c.holds(value),
            }
        })
        .collect();
    let bound = match (&config.bound, median.fourier) {
        (Some(b), Some(fourier)) => {
            let (lower, upper) = b.regime.bounds(b.s, b.t)?;
            Some(BoundOutcome {
                check: *b,
                lower,
                upper,
                fourier,
                pass: lower - SANDWICH_SLACK <= fourier,
            })
        }
        _ => None,
    };
    let pass = checks.iter().all(|c| c.pass) && bound.is_none_or(|b| b.pass);
    Ok(Verdict {
        name: config.name.clone(),
        construction: config.construction.id().to_string(),
        predicted_fourier: config.construction.predicted_fourier_dim(),
        runs,
        median,
        checks,
        bound,
        error: None,
        negative_control: config.negative_control,
        pass,
        wall_time: start.elapsed(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub experiments: Vec<ExperimentConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub scope: String,
    pub verdicts: Vec<Verdict>,
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
    pub pass_rate: f64,
    /// Every entry passed, except negative controls, which failed.
    pub all_as_expected: bool,
}

impl SuiteReport {
    /// Canonical JSON; identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
        for v in &self.verdicts {
            let status = match (v.pass, v.negative_control) {
                (true, false) => "PASS",
                (false, false) => "FAIL",
                (false, true) => "FAIL (expected, negative control)",
                (true, true) => "PASS (unexpected, negative control)",
            };
            let _ = writeln!(
                out,
                "{:<24} {:<36} fourier={} frostman={} box={} runs={} [{:.1}s]",
                v.name,
                status,
                fmt(v.median.fourier),
                fmt(v.median.frostman),
                fmt(v.median.box_counting),
                v.runs.len(),
                v.wall_time.as_secs_f64()
            );
            if let Some(e) = &v.error {
                let _ = writeln!(out, "    error: {e}");
            }
            for c in v.checks.iter().filter(|c| !c.pass) {
                let _ = writeln!(
                    out,
                    "    {:?} {:?} {} ± {}: got {:.3}",
                    c.check.estimator,
                    c.check.comparison,
                    c.check.predicted,
                    c.check.tolerance,
                    c.value
                );
            }
            if let Some(b) = v.bound.filter(|b| !b.pass) {
                let _ = writeln!(
                    out,
                    "    bound {}: lower {:.3} − {SANDWICH_SLACK} > {:.3}",
                    b.check.regime.as_str(),
                    b.lower,
                    b.fourier
                );
            }
        }
        let _ = writeln!(
            out,
            "{} passed, {} failed ({} errors), pass rate {:.2}; {}",
            self.passed,
            self.failed,
            self.errored,
            self.pass_rate,
            if self.all_as_expected {
                "all as expected"
            } else {
                "UNEXPECTED OUTCOMES"
            }
        );
        let _ = writeln!(out, "note: {}", self.scope);
        out
    }
}

/// Runs every entry; an entry that errors is recorded as a failed verdict and
/// the suite continues.
pub fn suite(manifest: &[ExperimentConfig]) -> Result<SuiteReport> {
    if manifest.is_empty() {
        return Err(Error::invalid("manifest", "empty manifest"));
    }
    let verdicts: Vec<Verdict> = manifest
        .par_iter()
        .map(|config| {
            let start = Instant::now();
            run_experiment(config).unwrap_or_else(|e| Verdict::failed(config, &e, start.elapsed()))
        })
        .collect();
    let passed = verdicts.iter().filter(|v| v.pass).count();
    let errored = verdicts.iter().filter(|v| v.error.is_some()).count();
    Ok(SuiteReport {
        scope: SCOPE_NOTE.to_string(),
        passed,
        failed: verdicts.len() - passed,
        errored,
        pass_rate: passed as f64 / verdicts.len() as f64,
        all_as_expected: verdicts.iter().all(Verdict::as_expected),
        verdicts,
    })
}
