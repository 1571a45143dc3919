//! Globally adaptive Gauss–Kronrod (7/15) quadrature with the endpoint
//! substitutions used throughout the crate.
//!
//! Integrands on (0,1) with power singularities at the endpoints are handed
//! both `u` and `1 − u`, computed without cancellation, so that factors like
//! `(1 − u)^{−1/2}` stay accurate right up to the boundary.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the 7-point rule (nodes are XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        resk += w * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let value = resk * half;
    let error = ((resk - resg) * half).abs();
    if !value.is_finite() {
        return Err(Error::Quadrature {
            detail: format!("non-finite integrand on [{a}, {b}]"),
            location: None,
        });
    }
    Ok((value, error))
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    let (value, error) = kronrod(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                detail: format!(
                    "no convergence after {} intervals (error {total_err:e})",
                    heap.len()
                ),
                location: None,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod(&f, worst.a, mid)?;
        let (v2, e2) = kronrod(&f, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // re-sum to shed accumulated rounding from the running totals
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Integral {
        value,
        error,
        intervals: heap.len(),
    })
}

/// Integrate over (0, 1) an integrand given as `f(u, 1 − u)`.
///
/// The left half is mapped through `u = s²` and the right half through
/// `u = 1 − t²`, which removes integrable singularities of order up to
/// `u^{−1/2}` and `(1 − u)^{−1/2}` and tames stronger ones.
pub fn integrate_unit<F: Fn(f64, f64) -> f64>(f: F, opts: QuadOptions) -> Result<Integral> {
    let edge = std::f64::consts::FRAC_1_SQRT_2;
    let left = integrate(
        |s| {
            let u = s * s;
            2.0 * s * f(u, 1.0 - u)
        },
        0.0,
        edge,
        opts,
    )?;
    let right = integrate(
        |t| {
            let w = t * t;
            2.0 * t * f(1.0 - w, w)
        },
        0.0,
        edge,
        opts,
    )?;
    Ok(Integral {
        value: left.value + right.value,
        error: left.error + right.error,
        intervals: left.intervals + right.intervals,
    })
}

/// Integrate over (0, ∞).
///
/// `[0, 1]` goes through `θ = s²` (absorbing `θ^{−1/2}` behaviour at the
/// origin) and `[1, ∞)` through `θ = t/(1 − t)`, `t ∈ [1/2, 1)`, followed by
/// `t = 1 − w²` so that tails decaying like `θ^{−3/2}` stay bounded.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, opts: QuadOptions) -> Result<Integral> {
    let near = integrate(|s| 2.0 * s * f(s * s), 0.0, 1.0, opts)?;
    let far = integrate(
        |w| {
            if w == 0.0 {
                return 0.0;
            }
            let w2 = w * w;
            // θ = (1 − w²)/w², dθ = 2 dw / w³
            2.0 * f((1.0 - w2) / w2) / (w2 * w)
        },
        0.0,
        std::f64::consts::FRAC_1_SQRT_2,
        opts,
    )?;
    Ok(Integral {
        value: near.value + far.value,
        error: near.error + far.error,
        intervals: near.intervals + far.intervals,
    })
}
