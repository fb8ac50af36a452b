//! Acceptance criteria C1–C12, one line each. Exits non-zero if any fails.

use std::collections::HashMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use kakeya_core::bounds::{
    bound_table, ff_bounds, fh_bounds, figure_panels, kakeya_bounds, open_grid, sweep, Regime,
    MAX_PLOT_SAMPLES,
};
use kakeya_core::constructions::{radial_kakeya, strip_scaling, DirectionSet, LineFamily};
use kakeya_core::fourier::{verify_frostman_from_decay, FrequencyPlan};
use kakeya_core::measure::{
    frostman_exponent, ifs_measure, product_measure, uniform_interval_measure, IfsSpec, ScaleWindow,
};
use kakeya_core::verify::{default_manifest, suite, SuiteReport, Verdict};
use kakeya_core::DiscreteMeasure;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn report(id: &str, limit: Duration, elapsed: Duration, o: Outcome) -> bool {
    let in_time = elapsed <= limit;
    let pass = o.pass && in_time;
    let limit = if limit == Duration::MAX {
        "no limit".to_string()
    } else {
        format!("limit {:.0}s", limit.as_secs_f64())
    };
    println!(
        "{id:<4} {}  {}  [{:.2}s / {limit}]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
    );
    pass
}

fn timed(f: impl FnOnce() -> Outcome) -> (Duration, Outcome) {
    let start = Instant::now();
    let o = f();
    (start.elapsed(), o)
}

fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() <= 1e-12 && (a.1 - b.1).abs() <= 1e-12
}

fn c1() -> Outcome {
    let exact = close(kakeya_bounds(1.0, 1.0).unwrap(), (2.0 / 3.0, 1.0))
        && close(ff_bounds(1.0, 2.0).unwrap(), (2.0 / 3.0, 1.0))
        && close(fh_bounds(0.7, 1.0).unwrap(), (0.0, 0.0));
    let grids = Regime::ALL.iter().all(|&r| {
        bound_table(r, &open_grid(1.0, 200), &open_grid(r.t_max(), 200))
            .map(|rows| rows.len() == 40_000 && rows.iter().all(|p| p.lower <= p.upper))
            .unwrap_or(false)
    });
    outcome(
        exact && grids,
        format!("hand values exact: {exact}; lower <= upper on 200x200 grids: {grids}"),
    )
}

fn c2() -> Outcome {
    let ratio = |(l, u): (f64, f64)| l / u;
    let k1 = ratio(kakeya_bounds(0.4, 1e-3).unwrap());
    let k2 = ratio(kakeya_bounds(1e-3, 0.4).unwrap());
    let ff = ratio(ff_bounds(0.4, 1e-4).unwrap());
    let s = 0.4;
    let fh = fh_bounds(s, 1.0 + 1e-3 * s).unwrap().0;
    let pass = k1 >= 0.95 && k2 >= 0.95 && (0.49..=0.51).contains(&ff) && fh <= 0.01 * s;
    outcome(
        pass,
        format!(
            "kakeya ratios {k1:.4}, {k2:.4} (>= 0.95); ff ratio {ff:.4} in [0.49, 0.51]; \
             fh lower {fh:.2e} <= {:.0e}",
            0.01 * s
        ),
    )
}

fn describe(v: &Verdict) -> String {
    let f = |x: Option<f64>| x.map_or("-".to_string(), |x| format!("{x:.3}"));
    let mut s = format!(
        "{}: fourier {} frostman {} box {}",
        v.name,
        f(v.median.fourier),
        f(v.median.frostman),
        f(v.median.box_counting)
    );
    if v.runs.len() > 1 {
        s += &format!(" (median of {})", v.runs.len());
    }
    if let Some(e) = &v.error {
        s += &format!(" error: {e}");
    }
    s
}

fn from_suite(report: &SuiteReport, names: &[&str]) -> (Duration, Outcome) {
    let by_name: HashMap<&str, &Verdict> = report
        .verdicts
        .iter()
        .map(|v| (v.name.as_str(), v))
        .collect();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut elapsed = Duration::ZERO;
    for name in names {
        match by_name.get(name) {
            Some(v) => {
                pass &= v.pass;
                elapsed += v.wall_time;
                parts.push(describe(v));
            }
            None => {
                pass = false;
                parts.push(format!("{name}: missing from suite"));
            }
        }
    }
    (elapsed, outcome(pass, parts.join("; ")))
}

fn c9() -> Outcome {
    let uniform = uniform_interval_measure(0.0, 1.0, 10_000).unwrap();
    let u = verify_frostman_from_decay(
        &uniform,
        0.9,
        &ScaleWindow::dyadic(2f64.powi(-8), 2f64.powi(-3)),
        Some(&FrequencyPlan::new(1, 4.0, 8, 1)),
    )
    .unwrap();
    let arc = radial_kakeya(&DirectionSet::quarter_arc(512).measure().unwrap(), 1024).unwrap();
    let k = verify_frostman_from_decay(
        &arc,
        0.8,
        &ScaleWindow::dyadic(2f64.powi(-6), 0.5),
        Some(&FrequencyPlan::new(2, 1.0, 6, 1)),
    )
    .unwrap();
    let dirac = DiscreteMeasure::dirac(1, [0.0, 0.0]).unwrap();
    let d = verify_frostman_from_decay(
        &dirac,
        0.5,
        &ScaleWindow::dyadic(2f64.powi(-8), 2f64.powi(-3)),
        Some(&FrequencyPlan::new(1, 4.0, 8, 1)),
    )
    .unwrap();
    let scales_ok = u.scales.len() >= 6 && k.scales.len() >= 6;
    outcome(
        u.pass && k.pass && !d.pass && scales_ok,
        format!(
            "uniform a=0.9 growth {:.2} ({}); K0 arc a=0.8 growth {:.2} ({}); \
             Dirac a=0.5 decay {:.2} ({}, must fail)",
            u.growth,
            if u.pass { "pass" } else { "fail" },
            k.growth,
            if k.pass { "pass" } else { "fail" },
            d.decay_exponent.unwrap_or(f64::NAN),
            if d.pass { "pass" } else { "fail" },
        ),
    )
}

fn c10() -> Outcome {
    let cantor = ifs_measure(&IfsSpec::middle_third(8)).unwrap();
    let params = product_measure(&cantor, &cantor).unwrap();
    let t = frostman_exponent(
        &params,
        &ScaleWindow::triadic(3f64.powi(-6), 1.0 / 3.0),
        None,
    )
    .unwrap()
    .dim_value;
    let family = LineFamily::from_parameter_measure(&params).unwrap();
    let s = strip_scaling(&family, 2f64.powi(-8), 0.25, 64).unwrap();
    let nominal = 4f64.ln() / 3f64.ln();
    let threshold = nominal - 1.0 - 0.15;
    outcome(
        s.slope >= threshold,
        format!(
            "(theta, a) Frostman exponent {t:.3} (nominal {nominal:.3}); strip slope {:.3} >= {threshold:.3}",
            s.slope
        ),
    )
}

fn c11() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kakeya-lab"))
        .args(["plot", "--all", "--out"])
        .arg(dir.path())
        .output()
        .expect("binary runs");
    if !out.status.success() {
        return outcome(false, String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let panels = figure_panels();
    for panel in &panels {
        let csv = std::fs::read_to_string(dir.path().join(format!("{}.csv", panel.name)));
        let svg = std::fs::read_to_string(dir.path().join(format!("{}.svg", panel.name)));
        let (Ok(csv), Ok(svg)) = (csv, svg) else {
            ok = false;
            continue;
        };
        ok &= svg.contains("<svg") && svg.contains("<polyline");
        let expected = sweep(panel.regime, panel.fixed, MAX_PLOT_SAMPLES).unwrap();
        let rows: Vec<Vec<f64>> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').skip(1).map(|x| x.parse().unwrap()).collect())
            .collect();
        ok &= rows.len() == expected.len();
        for (r, e) in rows.iter().zip(&expected) {
            for (a, b) in r.iter().zip([e.s, e.t, e.lower, e.upper]) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    outcome(
        ok && worst <= 1e-12,
        format!(
            "{} panels (2 + 4), SVG + CSV written; max deviation from bound table {worst:.1e}",
            panels.len()
        ),
    )
}

fn run_suite(threads: usize) -> SuiteReport {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| suite(&default_manifest()).unwrap())
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut all = true;

    let (t, o) = timed(c1);
    all &= report("C1", secs(1), t, o);
    let (t, o) = timed(c2);
    all &= report("C2", secs(1), t, o);

    // Estimator criteria come from the default suite; its single-thread run
    // supplies the timings.
    let single = run_suite(1);
    let (t, o) = from_suite(&single, &["calibration-uniform", "calibration-cantor"]);
    all &= report("C3", secs(30), t, o);
    let (t, o) = from_suite(&single, &["k0-arc"]);
    all &= report("C4", secs(180), t, o);
    for name in ["k0-cantor-0.25", "k0-cantor-0.5"] {
        let (t, o) = from_suite(&single, &[name]);
        all &= report("C5", secs(300), t, o);
    }
    let (t, o) = from_suite(&single, &["k1-product-0.5", "k1-product-1.0"]);
    all &= report("C6", secs(600), t, o);
    let (t, o) = from_suite(&single, &["fh-zero"]);
    all &= report("C7", secs(120), t, o);
    let (t, o) = from_suite(&single, &["brownian-1.0", "brownian-0.5"]);
    all &= report("C8", secs(600), t, o);

    let (t, o) = timed(c9);
    all &= report("C9", secs(60), t, o);
    let (t, o) = timed(c10);
    all &= report("C10", secs(60), t, o);
    let (t, o) = timed(c11);
    all &= report("C11", secs(5), t, o);

    let (t, o) = timed(|| {
        let eight = run_suite(8);
        let (a, b) = (single.to_json(), eight.to_json());
        let control = single
            .verdicts
            .iter()
            .filter(|v| v.negative_control)
            .all(|v| !v.pass);
        outcome(
            a == b && control,
            format!(
                "suite JSON at 1 and 8 threads identical: {} ({} bytes); negative control fails: {control}",
                a == b,
                a.len()
            ),
        )
    });
    all &= report("C12", Duration::MAX, t, o);

    if all {
        println!("all acceptance criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance FAILED");
        ExitCode::FAILURE
    }
}
