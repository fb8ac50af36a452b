//! Direct nonuniform DFT `μ̂(ξ) = Σ w·exp(−2πi x·ξ)`.
//!
//! Summation contract: atoms are consumed in storage order in blocks of
//! [`BLOCK`]; inside a block, atom `i` goes to lane `i mod LANES` and lanes
//! are combined pairwise; blocks are combined by a balanced binary tree over
//! block indices. The result for a frequency is therefore a fixed function of
//! the atom list, independent of how frequencies are spread over threads.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, Point};

pub const BLOCK: usize = 512;
const LANES: usize = 8;

/// `|x·ξ|` must stay below this for the phase reduction to be exact.
const PHASE_LIMIT: f64 = 4.5e15;

const ROUND_MAGIC: f64 = 6_755_399_441_055_744.0;

/// Nearest integer, ties to even; exact for `|t| < 2^51`.
#[inline(always)]
fn round_magic(t: f64) -> f64 {
    (t + ROUND_MAGIC) - ROUND_MAGIC
}

#[inline(always)]
fn madd<const FMA: bool>(a: f64, b: f64, c: f64) -> f64 {
    if FMA {
        a.mul_add(b, c)
    } else {
        a * b + c
    }
}

/// `(cos 2πt, sin 2πt)`, branch-free.
#[inline(always)]
fn cos_sin_impl<const FMA: bool>(t: f64) -> (f64, f64) {
    const S: [f64; 8] = [
        -1.0 / 1_307_674_368_000.0,
        1.0 / 6_227_020_800.0,
        -1.0 / 39_916_800.0,
        1.0 / 362_880.0,
        -1.0 / 5040.0,
        1.0 / 120.0,
        -1.0 / 6.0,
        1.0,
    ];
    const C: [f64; 9] = [
        1.0 / 20_922_789_888_000.0,
        -1.0 / 87_178_291_200.0,
        1.0 / 479_001_600.0,
        -1.0 / 3_628_800.0,
        1.0 / 40_320.0,
        -1.0 / 720.0,
        1.0 / 24.0,
        -0.5,
        1.0,
    ];
    let f = t - round_magic(t);
    let q = round_magic(4.0 * f);
    let r = f - 0.25 * q;
    // |θ| ≤ π/4
    let th = std::f64::consts::TAU * r;
    let z = th * th;
    let mut ps = S[0];
    for k in &S[1..] {
        ps = madd::<FMA>(ps, z, *k);
    }
    let mut c = C[0];
    for k in &C[1..] {
        c = madd::<FMA>(c, z, *k);
    }
    let s = th * ps;
    let aq = q.abs();
    let cq = 1.0 - aq;
    let sq = q * (2.0 - aq);
    (c * cq - s * sq, s * cq + c * sq)
}

/// `(cos 2πt, sin 2πt)` as evaluated by the portable kernel.
pub fn cos_sin_turns(t: f64) -> (f64, f64) {
    cos_sin_impl::<false>(t)
}

/// Transform of `measure` at each frequency. In dimension one only the first
/// coordinate of a frequency is used.
pub fn nudft(measure: &DiscreteMeasure, frequencies: &[Point]) -> Result<Vec<Complex64>> {
    let reach = measure
        .points()
        .map(|p| p[0].abs() + p[1].abs())
        .fold(0.0, f64::max);
    for (k, xi) in frequencies.iter().enumerate() {
        if !(xi[0].is_finite() && xi[1].is_finite()) {
            return Err(Error::invalid(
                "frequency",
                format!("entry {k} is not finite"),
            ));
        }
        if reach * (xi[0].abs() + xi[1].abs()) > PHASE_LIMIT {
            return Err(Error::invalid(
                "frequency",
                format!("entry {k} is out of range"),
            ));
        }
    }
    let level = simd_level();
    let xs = measure.xs();
    let ws = measure.weights();
    let out = if measure.dim() == 1 {
        frequencies
            .par_iter()
            .map(|xi| {
                tree(ws.len(), &|lo, hi| {
                    block_1d(level, &xs[lo..hi], &ws[lo..hi], xi[0])
                })
            })
            .collect()
    } else {
        let ys = measure.ys();
        frequencies
            .par_iter()
            .map(|xi| {
                tree(ws.len(), &|lo, hi| {
                    block_2d(level, &xs[lo..hi], &ys[lo..hi], &ws[lo..hi], xi[0], xi[1])
                })
            })
            .collect()
    };
    Ok(out)
}

/// Pairwise sum of block results over `[0, n)`, split on block boundaries.
fn tree(n: usize, block: &dyn Fn(usize, usize) -> Complex64) -> Complex64 {
    fn go(
        lo: usize,
        nblocks: usize,
        n: usize,
        block: &dyn Fn(usize, usize) -> Complex64,
    ) -> Complex64 {
        if nblocks == 1 {
            return block(lo, (lo + BLOCK).min(n));
        }
        let left = nblocks / 2;
        go(lo, left, n, block) + go(lo + left * BLOCK, nblocks - left, n, block)
    }
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    go(0, n.div_ceil(BLOCK), n, block)
}

#[inline(always)]
fn fold_lanes(mut re: [f64; LANES], mut im: [f64; LANES]) -> Complex64 {
    let mut width = LANES;
    while width > 1 {
        width /= 2;
        for l in 0..width {
            re[l] += re[l + width];
            im[l] += im[l + width];
        }
    }
    Complex64::new(re[0], im[0])
}

#[inline(always)]
fn block_1d_impl<const FMA: bool>(xs: &[f64], ws: &[f64], xi: f64) -> Complex64 {
    let mut re = [0.0; LANES];
    let mut im = [0.0; LANES];
    let full = xs.len() / LANES * LANES;
    for (xc, wc) in xs[..full]
        .chunks_exact(LANES)
        .zip(ws[..full].chunks_exact(LANES))
    {
        for l in 0..LANES {
            let (c, s) = cos_sin_impl::<FMA>(xc[l] * xi);
            re[l] = madd::<FMA>(wc[l], c, re[l]);
            im[l] = madd::<FMA>(-wc[l], s, im[l]);
        }
    }
    for (l, (x, w)) in xs[full..].iter().zip(&ws[full..]).enumerate() {
        let (c, s) = cos_sin_impl::<FMA>(x * xi);
        re[l] = madd::<FMA>(*w, c, re[l]);
        im[l] = madd::<FMA>(-*w, s, im[l]);
    }
    fold_lanes(re, im)
}

#[inline(always)]
fn block_2d_impl<const FMA: bool>(xs: &[f64], ys: &[f64], ws: &[f64], u: f64, v: f64) -> Complex64 {
    let mut re = [0.0; LANES];
    let mut im = [0.0; LANES];
    let full = xs.len() / LANES * LANES;
    for ((xc, yc), wc) in xs[..full]
        .chunks_exact(LANES)
        .zip(ys[..full].chunks_exact(LANES))
        .zip(ws[..full].chunks_exact(LANES))
    {
        for l in 0..LANES {
            let (c, s) = cos_sin_impl::<FMA>(xc[l] * u + yc[l] * v);
            re[l] = madd::<FMA>(wc[l], c, re[l]);
            im[l] = madd::<FMA>(-wc[l], s, im[l]);
        }
    }
    for (l, ((x, y), w)) in xs[full..]
        .iter()
        .zip(&ys[full..])
        .zip(&ws[full..])
        .enumerate()
    {
        let (c, s) = cos_sin_impl::<FMA>(x * u + y * v);
        re[l] = madd::<FMA>(*w, c, re[l]);
        im[l] = madd::<FMA>(-*w, s, im[l]);
    }
    fold_lanes(re, im)
}

/// Instruction-set tier of the kernel. The tier is fixed per process, so
/// results never depend on scheduling; they may differ in the last bits
/// between machines with different tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SimdLevel {
    Portable,
    #[cfg(target_arch = "x86_64")]
    Avx2,
    #[cfg(target_arch = "x86_64")]
    Avx512,
}

fn simd_level() -> SimdLevel {
    #[cfg(target_arch = "x86_64")]
    {
        if std::env::var_os("KAKEYA_PORTABLE_KERNEL").is_none() {
            if is_x86_feature_detected!("avx512f") && is_x86_feature_detected!("fma") {
                return SimdLevel::Avx512;
            }
            if is_x86_feature_detected!("avx2") && is_x86_feature_detected!("fma") {
                return SimdLevel::Avx2;
            }
        }
    }
    SimdLevel::Portable
}

#[cfg(target_arch = "x86_64")]
mod x86 {
    use super::*;

    #[target_feature(enable = "avx2,fma")]
    pub(super) fn block_1d_avx2(xs: &[f64], ws: &[f64], xi: f64) -> Complex64 {
        block_1d_impl::<true>(xs, ws, xi)
    }

    #[target_feature(enable = "avx512f,avx2,fma")]
    pub(super) fn block_1d_avx512(xs: &[f64], ws: &[f64], xi: f64) -> Complex64 {
        block_1d_impl::<true>(xs, ws, xi)
    }

    #[target_feature(enable = "avx2,fma")]
    pub(super) fn block_2d_avx2(xs: &[f64], ys: &[f64], ws: &[f64], u: f64, v: f64) -> Complex64 {
        block_2d_impl::<true>(xs, ys, ws, u, v)
    }

    #[target_feature(enable = "avx512f,avx2,fma")]
    pub(super) fn block_2d_avx512(xs: &[f64], ys: &[f64], ws: &[f64], u: f64, v: f64) -> Complex64 {
        block_2d_impl::<true>(xs, ys, ws, u, v)
    }
}

fn block_1d(level: SimdLevel, xs: &[f64], ws: &[f64], xi: f64) -> Complex64 {
    match level {
        SimdLevel::Portable => block_1d_impl::<false>(xs, ws, xi),
        // SAFETY: the tier was selected by runtime feature detection.
        #[cfg(target_arch = "x86_64")]
        SimdLevel::Avx2 => unsafe { x86::block_1d_avx2(xs, ws, xi) },
        #[cfg(target_arch = "x86_64")]
        SimdLevel::Avx512 => unsafe { x86::block_1d_avx512(xs, ws, xi) },
    }
}

fn block_2d(level: SimdLevel, xs: &[f64], ys: &[f64], ws: &[f64], u: f64, v: f64) -> Complex64 {
    match level {
        SimdLevel::Portable => block_2d_impl::<false>(xs, ys, ws, u, v),
        // SAFETY: the tier was selected by runtime feature detection.
        #[cfg(target_arch = "x86_64")]
        SimdLevel::Avx2 => unsafe { x86::block_2d_avx2(xs, ys, ws, u, v) },
        #[cfg(target_arch = "x86_64")]
        SimdLevel::Avx512 => unsafe { x86::block_2d_avx512(xs, ys, ws, u, v) },
    }
}
