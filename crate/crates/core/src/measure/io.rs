//! Plain-text measure files.
//!
//! ```text
//! dim=2 mass=1.0000000000000000e0 n=3 spacing=1.0000000000000000e-3
//! 5.0000000000000000e-1 1.0000000000000000e-1 2.0000000000000000e-1
//! ...
//! ```
//! One atom per line, `weight x [y]`, 17 significant digits. `spacing` is
//! optional on input.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;

pub fn write_measure<W: Write>(measure: &DiscreteMeasure, mut out: W) -> Result<()> {
    writeln!(
        out,
        "dim={} mass={:.16e} n={} spacing={:.16e}",
        measure.dim(),
        measure.total_mass(),
        measure.len(),
        measure.spacing()
    )?;
    for (i, w) in measure.weights().iter().enumerate() {
        let p = measure.point(i);
        if measure.dim() == 2 {
            writeln!(out, "{w:.16e} {:.16e} {:.16e}", p[0], p[1])?;
        } else {
            writeln!(out, "{w:.16e} {:.16e}", p[0])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a measure file. Without a `spacing` header key the spacing is
/// re-estimated from the atoms.
pub fn read_measure<R: BufRead>(input: R) -> Result<DiscreteMeasure> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        reason: "empty file".into(),
    })?;
    let header = header?;
    let (dim, mass, n, spacing) = parse_header(&header)?;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(if dim == 2 { n } else { 0 });
    let mut ws = Vec::with_capacity(n);
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != dim + 1 {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("expected {} fields, found {}", dim + 1, fields.len()),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                reason: format!("`{s}`: {e}"),
            })
        };
        ws.push(num(fields[0])?);
        xs.push(num(fields[1])?);
        if dim == 2 {
            ys.push(num(fields[2])?);
        }
    }
    if ws.len() != n {
        return Err(Error::Parse {
            line: 1,
            reason: format!("header declares n={n} but file has {} atoms", ws.len()),
        });
    }
    let m = DiscreteMeasure::from_parts(dim, xs, ys, ws, spacing)?;
    if (m.total_mass() - mass).abs() > 1e-9 * mass.abs().max(1.0) {
        return Err(Error::Parse {
            line: 1,
            reason: format!(
                "header mass {mass} disagrees with atom total {}",
                m.total_mass()
            ),
        });
    }
    Ok(m)
}

fn parse_header(header: &str) -> Result<(usize, f64, usize, Option<f64>)> {
    let bad = |reason: String| Error::Parse { line: 1, reason };
    let mut dim = None;
    let mut mass = None;
    let mut n = None;
    let mut spacing = None;
    for tok in header.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed header token `{tok}`")))?;
        match k {
            "dim" => dim = Some(v.parse::<usize>().map_err(|e| bad(format!("dim: {e}")))?),
            "mass" => mass = Some(v.parse::<f64>().map_err(|e| bad(format!("mass: {e}")))?),
            "n" => n = Some(v.parse::<usize>().map_err(|e| bad(format!("n: {e}")))?),
            "spacing" => {
                spacing = Some(v.parse::<f64>().map_err(|e| bad(format!("spacing: {e}")))?)
            }
            other => return Err(bad(format!("unknown header key `{other}`"))),
        }
    }
    match (dim, mass, n) {
        (Some(d @ (1 | 2)), Some(m), Some(n)) => Ok((d, m, n, spacing)),
        (Some(d), Some(_), Some(_)) => Err(bad(format!("dim must be 1 or 2, got {d}"))),
        _ => Err(bad("header must define dim, mass and n".into())),
    }
}
