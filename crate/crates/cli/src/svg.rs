//! Hand-written SVG line charts.

use std::fmt::Write as _;

use kakeya_core::bounds::{Fixed, Regime, ThresholdPoint};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

/// A vertical step larger than this breaks the polyline.
const JUMP: f64 = 0.05;

fn polylines(points: &[(f64, f64)]) -> Vec<Vec<(f64, f64)>> {
    let mut out: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for &p in points {
        let cur = out.last_mut().expect("non-empty");
        if let Some(&(_, y)) = cur.last() {
            if (p.1 - y).abs() > JUMP {
                out.push(Vec::new());
            }
        }
        out.last_mut().expect("non-empty").push(p);
    }
    out
}

/// Lower and upper bound against the free parameter. Axis ranges are the
/// parameter domain and `[0, y_max]` with `y_max` the regime's largest bound.
pub fn render(regime: Regime, fixed: Fixed, rows: &[ThresholdPoint]) -> String {
    let (x_label, x_max, title) = match fixed {
        Fixed::S(s) => ("t", regime.t_max(), format!("{}: s = {s}", regime.as_str())),
        Fixed::T(t) => ("s", 1.0, format!("{}: t = {t}", regime.as_str())),
    };
    let y_max = 1.0;
    let xof = |r: &ThresholdPoint| match fixed {
        Fixed::S(_) => r.t,
        Fixed::T(_) => r.s,
    };
    let px = |x: f64| MARGIN + (WIDTH - 2.0 * MARGIN) * x / x_max;
    let py = |y: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * y / y_max;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#,
        WIDTH / 2.0
    );
    let (x0, y0, x1, y1) = (px(0.0), py(0.0), px(x_max), py(y_max));
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let fx = x_max * k as f64 / 4.0;
        let fy = y_max * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{fx}</text>"#,
            px(fx),
            y0 + 18.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{fy}</text>"#,
            x0 - 6.0,
            py(fy) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    for (name, colour, dash, pick) in [
        (
            "lower",
            "#1f77b4",
            "",
            (|r: &ThresholdPoint| r.lower) as fn(&ThresholdPoint) -> f64,
        ),
        (
            "upper",
            "#d62728",
            r#" stroke-dasharray="6 4""#,
            |r: &ThresholdPoint| r.upper,
        ),
    ] {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (xof(r), pick(r))).collect();
        for seg in polylines(&pts) {
            let coords: Vec<String> = seg
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline class="{name}" points="{}" fill="none" stroke="{colour}" stroke-width="2"{dash}/>"#,
                coords.join(" ")
            );
        }
    }
    let lx = x1 - 110.0;
    for (i, (name, colour)) in [("lower bound", "#1f77b4"), ("upper bound", "#d62728")]
        .iter()
        .enumerate()
    {
        let y = y1 + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{name}</text>"#,
            lx + 24.0,
            lx + 30.0,
            y + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use kakeya_core::bounds::sweep;

    #[test]
    fn jump_splits_the_upper_curve() {
        let rows = sweep(Regime::FurstenbergFh, Fixed::S(0.4), 64).unwrap();
        let svg = render(Regime::FurstenbergFh, Fixed::S(0.4), &rows);
        assert_eq!(svg.matches(r#"class="upper""#).count(), 2);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn continuous_curves_are_single_polylines() {
        let rows = sweep(Regime::KakeyaFh, Fixed::T(0.4), 512).unwrap();
        let svg = render(Regime::KakeyaFh, Fixed::T(0.4), &rows);
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
