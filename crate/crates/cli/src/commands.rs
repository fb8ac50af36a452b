use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use kakeya_core::bounds::{
    bound_table, figure_panels, open_grid, reference_curves, sweep, table_csv, Fixed, Regime,
};
use kakeya_core::fourier::{
    estimate_fourier_dim_with, FitOptions, FrequencyPlan, Sampling, MIN_ANNULI,
};
use kakeya_core::measure::{
    box_counting, frostman_exponent, read_measure, write_measure, ScaleBase, ScaleWindow,
    MIN_SCALES,
};
use kakeya_core::verify::{default_manifest, suite, ConstructionSpec, Manifest};
use kakeya_core::{DimensionEstimate, DiscreteMeasure, Error, Result};
use serde_json::json;

use crate::{svg, BaseArg, Command, EstimateArgs, SamplingArg};

/// Default number of annuli when the atomization cap allows it.
const DEFAULT_ANNULI: usize = 8;

/// Default ball/box ladder spans this many octaves below `r_max`.
const DEFAULT_OCTAVES: i32 = 9;

/// `Ok(false)` signals a failed verification.
pub fn run(command: Command) -> Result<bool> {
    match command {
        Command::Construct { spec, out, seed } => construct(&spec, &out, seed),
        Command::Estimate(args) => estimate(&args),
        Command::Bounds {
            regime,
            s,
            t,
            fixed_s,
            fixed_t,
            steps,
            out,
        } => bounds(&regime, s, t, fixed_s, fixed_t, steps, out.as_deref()),
        Command::Verify { spec, out, json } => verify(spec.as_deref(), out.as_deref(), json),
        Command::Plot {
            regime,
            fixed_s,
            fixed_t,
            all,
            samples,
            out,
        } => plot(regime.as_deref(), fixed_s, fixed_t, all, samples, &out),
    }
    .map(|ok| ok.unwrap_or(true))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::from(e).context(path.display().to_string()))?;
    serde_json::from_str(&text).map_err(|e| Error::from(e).context(path.display().to_string()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(Error::invalid(
            "out",
            format!("parent directory {} does not exist", parent.display()),
        ));
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::from(e).context(path.display().to_string()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn construct(spec: &Path, out: &Path, seed: Option<u64>) -> Result<Option<bool>> {
    let spec: ConstructionSpec = read_json(spec)?;
    let measure = spec.build(seed)?;
    let mut w = create(out)?;
    write_measure(&measure, &mut w)?;
    let meta = json!({
        "construction": spec.id(),
        "parameters": spec,
        "seed": seed,
        "atoms": measure.len(),
        "mass": measure.total_mass(),
        "spacing": measure.spacing(),
        "predicted_fourier_dim": spec.predicted_fourier_dim(),
    });
    write_text(
        &sidecar_path(out),
        &(serde_json::to_string_pretty(&meta)? + "\n"),
    )?;
    println!(
        "{}: {} atoms, mass {:.12}, spacing {:.3e} -> {}",
        spec.id(),
        measure.len(),
        measure.total_mass(),
        measure.spacing(),
        out.display()
    );
    Ok(None)
}

fn admissible(m: &DiscreteMeasure) -> String {
    format!(
        "admissible scale window [{:.6e}, {:.6e}], frequencies up to {:.6e}",
        m.min_admissible_scale(),
        m.bounds().diameter().max(1.0),
        m.atomization_frequency()
    )
}

fn fourier_plan(args: &EstimateArgs, m: &DiscreteMeasure) -> Result<FrequencyPlan> {
    let dim = m.dim();
    let r0 = args.r0.unwrap_or(if dim == 1 { 4.0 } else { 1.0 });
    let annuli = match args.annuli {
        Some(j) => j,
        None => {
            let cap = m.atomization_frequency();
            let fit = (0..=DEFAULT_ANNULI)
                .rev()
                .find(|&j| r0 * 2f64.powi(j as i32) <= cap)
                .unwrap_or(0);
            if fit < MIN_ANNULI {
                return Err(Error::Precondition(format!(
                    "r0 = {r0} leaves fewer than {MIN_ANNULI} annuli below the atomization cap; {}",
                    admissible(m)
                )));
            }
            fit
        }
    };
    let mut plan =
        FrequencyPlan::new(dim, r0, annuli, args.seed).with_sampling(match args.sampling {
            SamplingArg::Dense => Sampling::Dense,
            SamplingArg::Fixed => Sampling::Fixed,
        });
    if let Some(n) = args.samples {
        plan = plan.with_samples(n);
    }
    Ok(plan)
}

fn scale_window(args: &EstimateArgs, m: &DiscreteMeasure) -> ScaleWindow {
    let base = match args.base {
        BaseArg::Dyadic => ScaleBase::Dyadic,
        BaseArg::Triadic => ScaleBase::Triadic,
    };
    let b = base.factor();
    let ceiling = m.bounds().diameter().max(1.0);
    let floor = m.min_admissible_scale();
    let mut r_max = args.scale_max.unwrap_or_else(|| {
        let top = ceiling / 4.0;
        b.powf(top.log(b).floor())
    });
    let r_min = args
        .scale_min
        .unwrap_or_else(|| (r_max * b.powi(-DEFAULT_OCTAVES)).max(floor));
    if args.scale_max.is_none() {
        // widen upwards until the ladder has enough rungs
        while r_max * b <= ceiling && (r_max / r_min).log(b).floor() + 1.0 < MIN_SCALES as f64 {
            r_max *= b;
        }
    }
    ScaleWindow { r_min, r_max, base }
}

fn with_window<T>(r: Result<T>, m: &DiscreteMeasure, what: &str) -> Result<T> {
    r.map_err(|e| match e.kind() {
        kakeya_core::ErrorKind::Precondition => e.context(format!("{what} ({})", admissible(m))),
        _ => e.context(what.to_string()),
    })
}

fn estimate(args: &EstimateArgs) -> Result<Option<bool>> {
    let file = File::open(&args.measure)
        .map_err(|e| Error::from(e).context(args.measure.display().to_string()))?;
    let m = read_measure(BufReader::new(file))
        .map_err(|e| e.context(args.measure.display().to_string()))?;
    let plan = with_window(fourier_plan(args, &m), &m, "fourier")?;
    let fit = with_window(
        estimate_fourier_dim_with(&m, &plan, &FitOptions::default()),
        &m,
        "fourier",
    )?;
    let window = scale_window(args, &m);
    let frostman = with_window(frostman_exponent(&m, &window, None), &m, "frostman")?;
    let boxes = with_window(box_counting(&m, &window), &m, "box counting")?.estimate;
    if let Some(path) = &args.profile {
        write_text(path, &fit.profile.to_csv())?;
    }
    if args.json {
        let record = json!({
            "measure": args.measure.display().to_string(),
            "atoms": m.len(),
            "mass": m.total_mass(),
            "spacing": m.spacing(),
            "plan": plan,
            "fourier": fit.estimate,
            "frostman": frostman,
            "box_counting": boxes,
        });
        println!("{}", serde_json::to_string_pretty(&record)?);
    } else {
        println!(
            "measure   {} ({} atoms, dim {}, mass {:.12})",
            args.measure.display(),
            m.len(),
            m.dim(),
            m.total_mass()
        );
        for (name, e) in [
            ("fourier", &fit.estimate),
            ("frostman", &frostman),
            ("box", &boxes),
        ] {
            println!("{}", line(name, e));
        }
    }
    Ok(None)
}

fn line(name: &str, e: &DimensionEstimate) -> String {
    format!(
        "{name:<9} dim={:.4} slope={:.4} residual={:.4} window=[{:.4e}, {:.4e}] points={}",
        e.dim_value, e.slope, e.residual, e.scale_window.0, e.scale_window.1, e.points
    )
}

fn fixed(fixed_s: Option<f64>, fixed_t: Option<f64>) -> Result<Fixed> {
    match (fixed_s, fixed_t) {
        (Some(s), None) => Ok(Fixed::S(s)),
        (None, Some(t)) => Ok(Fixed::T(t)),
        _ => Err(Error::invalid(
            "fixed",
            "give exactly one of --fixed-s, --fixed-t",
        )),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bounds(
    regime: &str,
    s: Option<f64>,
    t: Option<f64>,
    fixed_s: Option<f64>,
    fixed_t: Option<f64>,
    steps: usize,
    out: Option<&Path>,
) -> Result<Option<bool>> {
    let regime: Regime = regime.parse()?;
    if steps == 0 {
        return Err(Error::invalid("steps", "must be positive"));
    }
    let rows = match (s, t, fixed_s.is_some() || fixed_t.is_some()) {
        (Some(s), Some(t), _) => {
            let (lower, upper) = regime.bounds(s, t)?;
            let mut text = format!(
                "{} s={s} t={t}: lower={lower:.12} upper={upper:.12}\n",
                regime.as_str()
            );
            if let Ok(r) = reference_curves(s, t) {
                text += &format!(
                    "reference: hausdorff-furstenberg={:.12} box-furstenberg={:.12} packing-furstenberg={:.12}\n",
                    r.hausdorff_furstenberg, r.box_furstenberg, r.packing_furstenberg
                );
            }
            return emit(out, &text).map(|_| None);
        }
        (None, None, true) => sweep(regime, fixed(fixed_s, fixed_t)?, steps)?,
        (None, None, false) => bound_table(
            regime,
            &open_grid(1.0, steps),
            &open_grid(regime.t_max(), steps),
        )?,
        _ => return Err(Error::invalid("s", "give both --s and --t, or neither")),
    };
    emit(out, &table_csv(&rows))?;
    Ok(None)
}

fn verify(spec: Option<&Path>, out: Option<&Path>, json: bool) -> Result<Option<bool>> {
    let manifest = match spec {
        Some(p) => read_json::<Manifest>(p)?.experiments,
        None => default_manifest(),
    };
    let report = suite(&manifest)?;
    let canonical = report.to_json() + "\n";
    if let Some(p) = out {
        write_text(p, &canonical)?;
    }
    if json {
        print!("{canonical}");
    } else {
        print!("{}", report.to_text());
    }
    Ok(Some(report.all_as_expected))
}

fn plot_one(regime: Regime, fixed: Fixed, samples: usize, svg_path: &Path) -> Result<()> {
    let rows = sweep(regime, fixed, samples)?;
    write_text(&svg_path.with_extension("csv"), &table_csv(&rows))?;
    write_text(svg_path, &svg::render(regime, fixed, &rows))
}

fn plot(
    regime: Option<&str>,
    fixed_s: Option<f64>,
    fixed_t: Option<f64>,
    all: bool,
    samples: usize,
    out: &Path,
) -> Result<Option<bool>> {
    if all {
        if !out.is_dir() {
            return Err(Error::invalid(
                "out",
                format!("{} is not a directory", out.display()),
            ));
        }
        for panel in figure_panels() {
            plot_one(
                panel.regime,
                panel.fixed,
                samples,
                &out.join(format!("{}.svg", panel.name)),
            )?;
            println!("{}", out.join(format!("{}.svg", panel.name)).display());
        }
    } else {
        let regime: Regime = regime.unwrap_or_default().parse()?;
        plot_one(regime, fixed(fixed_s, fixed_t)?, samples, out)?;
    }
    Ok(None)
}
