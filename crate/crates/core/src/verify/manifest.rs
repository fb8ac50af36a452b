use crate::bounds::Regime;
use crate::constructions::{BrownianOptions, DirectionSet, FiberRule};
use crate::fit::EstimatorKind::{BoxCounting, Fourier, Frostman};
use crate::fourier::{FitOptions, FrequencyPlan, Sampling};
use crate::measure::{IfsSpec, ScaleWindow};
use crate::verify::{
    BoundCheck, Check, ConstructionSpec, EstimatorPlans, ExperimentConfig, FourierSettings,
};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn fourier(plan: FrequencyPlan) -> Option<FourierSettings> {
    Some(FourierSettings {
        plan,
        fit: FitOptions::default(),
    })
}

fn entry(
    name: &str,
    construction: ConstructionSpec,
    estimators: EstimatorPlans,
) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        construction,
        seeds: Vec::new(),
        estimators,
        checks: Vec::new(),
        bound: None,
        negative_control: false,
    }
}

fn cantor_dirs(t: f64, levels: u32) -> ExperimentConfig {
    let mut e = entry(
        &format!("k0-cantor-{t}"),
        ConstructionSpec::Kakeya {
            directions: DirectionSet::quarter_cantor(t, levels),
            fibers: FiberRule::Bump { atoms: 1024 },
            base: Default::default(),
        },
        EstimatorPlans {
            fourier: fourier(FrequencyPlan::new(2, 1.0, 6, 11)),
            frostman: Some(ScaleWindow::dyadic(2f64.powi(-8), 2f64.powi(-3))),
            box_counting: None,
        },
    );
    e.checks = vec![
        Check::within(Fourier, 2.0 * t, 0.25),
        Check::at_least(Frostman, t + 1.0, 0.15),
    ];
    e.bound = Some(BoundCheck {
        regime: Regime::KakeyaFh,
        s: 1.0,
        t,
    });
    e
}

fn product(s: f64, levels: u32, fiber_atoms: usize, r0: f64) -> ExperimentConfig {
    let mut e = entry(
        &format!("k1-product-{s:.1}"),
        ConstructionSpec::Product {
            x1: FiberRule::Brownian {
                dim: s,
                levels,
                options: BrownianOptions::default(),
                per_direction: false,
            },
            fiber_atoms,
        },
        EstimatorPlans {
            fourier: fourier(FrequencyPlan::new(2, r0, 6, 13).with_sampling(Sampling::Fixed)),
            // reported, not checked
            frostman: (s < 1.0).then(|| ScaleWindow::dyadic(2f64.powi(-9), 2f64.powi(-3))),
            box_counting: None,
        },
    );
    e.seeds = SEEDS.to_vec();
    e.checks = vec![Check::within(Fourier, s, 0.2)];
    e.bound = Some(BoundCheck {
        regime: Regime::KakeyaFh,
        s,
        t: 1.0,
    });
    e
}

fn salem(t: f64) -> ExperimentConfig {
    let window = ScaleWindow::dyadic(2f64.powi(-9), 2f64.powi(-3));
    let mut e = entry(
        &format!("brownian-{t:.1}"),
        ConstructionSpec::Brownian {
            dim: t,
            levels: 14,
            options: BrownianOptions::default(),
        },
        EstimatorPlans {
            fourier: fourier(FrequencyPlan::new(2, 4.0, 8, 17).with_sampling(Sampling::Fixed)),
            frostman: Some(window),
            box_counting: Some(window),
        },
    );
    e.seeds = SEEDS.to_vec();
    e.checks = vec![
        Check::within(Fourier, t, 0.25),
        Check::within(Frostman, t, 0.25),
        Check::within(BoxCounting, t, 0.25),
    ];
    e
}

fn cantor_calibration(name: &str) -> ExperimentConfig {
    let window = ScaleWindow::triadic(3f64.powi(-10), 1.0 / 3.0);
    entry(
        name,
        ConstructionSpec::Ifs {
            ifs: IfsSpec::middle_third(12),
        },
        EstimatorPlans {
            fourier: fourier(FrequencyPlan::new(1, 4.0, 8, 7)),
            frostman: Some(window),
            box_counting: Some(window),
        },
    )
}

/// Calibration oracles, the example constructions and one negative control.
pub fn default_manifest() -> Vec<ExperimentConfig> {
    let log32 = 2f64.ln() / 3f64.ln();

    let mut uniform = entry(
        "calibration-uniform",
        ConstructionSpec::Uniform { atoms: 10_000 },
        EstimatorPlans {
            fourier: fourier(FrequencyPlan::new(1, 4.0, 8, 7)),
            ..Default::default()
        },
    );
    uniform.checks = vec![Check::within(Fourier, 1.0, 0.1)];

    let mut cantor = cantor_calibration("calibration-cantor");
    cantor.checks = vec![
        Check::at_most(Fourier, 0.0, 0.15),
        Check::within(Frostman, log32, 0.05),
        Check::within(BoxCounting, log32, 0.05),
    ];

    let mut arc = entry(
        "k0-arc",
        ConstructionSpec::Kakeya {
            directions: DirectionSet::quarter_arc(512),
            fibers: FiberRule::Bump { atoms: 1024 },
            base: Default::default(),
        },
        EstimatorPlans {
            fourier: fourier(FrequencyPlan::new(2, 1.0, 6, 11)),
            ..Default::default()
        },
    );
    arc.checks = vec![Check::at_least(Fourier, 2.0, 0.2)];
    arc.bound = Some(BoundCheck {
        regime: Regime::KakeyaFh,
        s: 1.0,
        t: 1.0,
    });

    let mut fh_zero = entry(
        "fh-zero",
        ConstructionSpec::Furstenberg {
            theta: DirectionSet::Angles {
                angles: vec![0.0],
                weights: vec![1.0],
            },
            offset: DirectionSet::Ifs {
                ifs: IfsSpec::middle_third(8),
                start: 0.0,
                length: 1.0,
            },
            fibers: FiberRule::Uniform { atoms: 256 },
        },
        EstimatorPlans {
            fourier: fourier(FrequencyPlan::new(2, 1.0, 6, 19)),
            ..Default::default()
        },
    );
    fh_zero.checks = vec![Check::at_most(Fourier, 0.0, 0.15)];
    fh_zero.bound = Some(BoundCheck {
        regime: Regime::FurstenbergFh,
        s: 1.0,
        t: log32,
    });

    let mut control = cantor_calibration("negative-control-cantor");
    control.checks = vec![Check::within(Fourier, 0.9, 0.1)];
    control.negative_control = true;

    vec![
        uniform,
        cantor,
        arc,
        cantor_dirs(0.25, 6),
        cantor_dirs(0.5, 8),
        product(0.5, 9, 2048, 8.0),
        product(1.0, 11, 1024, 4.0),
        fh_zero,
        salem(1.0),
        salem(0.5),
        control,
    ]
}
