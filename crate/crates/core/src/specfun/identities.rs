//! The functions Δ₀ and I entering the limit law of the last coalescent
//! event, and the integrals they are identified with.
//!
//! Throughout, `Q(θ) = θ² + 2aθ + b`, `c = 1 + √b` and `d = 1 + b − 2a`.
//! Δ₀ is written as `(2/c)·g(d/c²)` with `g(w) = atanh(√w)/√w`, an entire
//! function of `w` off the cut `[1, ∞)`. For `d < 0` this is the arctangent
//! form `(2/√|d|)·atan(√|d|/c)`; the logarithm with `|1+b−2a|` inside it
//! is only valid for `d > 0`.

use num_complex::Complex64;

use super::quad::{integrate_half_line, QuadOptions};
use crate::error::{Error, Result};

/// Below this `|1 + b − 2a|` the degenerate branch `2/(1+√b)` is used.
pub const DEGENERATE_THRESHOLD: f64 = 1e-9;

fn check_ab(op: &'static str, a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(op, format!("need a, b ≥ 0, got ({a}, {b})")));
    }
    Ok(())
}

/// atanh(√w)/√w for real w < 1.
fn atanh_ratio(w: f64) -> f64 {
    if w.abs() < 1e-4 {
        // 1 + w/3 + w²/5 + w³/7
        1.0 + w * (1.0 / 3.0 + w * (0.2 + w / 7.0))
    } else if w > 0.0 {
        let s = w.sqrt();
        s.atanh() / s
    } else {
        let s = (-w).sqrt();
        s.atan() / s
    }
}

/// atanh(√w)/√w on the complex plane cut along [1, ∞).
fn atanh_ratio_c(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        Complex64::new(1.0, 0.0) + w * (1.0 / 3.0 + w * (0.2 + w / 7.0))
    } else {
        let s = w.sqrt();
        s.atanh() / s
    }
}

/// Δ₀(a, b) for a, b ≥ 0 with a + b > 0.
pub fn delta0(a: f64, b: f64) -> Result<f64> {
    check_ab("delta0", a, b)?;
    if a + b == 0.0 {
        return Err(Error::domain("delta0", "undefined at (0,0)"));
    }
    let c = 1.0 + b.sqrt();
    let d = 1.0 + b - 2.0 * a;
    if d.abs() < DEGENERATE_THRESHOLD {
        return Ok(2.0 / c);
    }
    Ok(2.0 / c * atanh_ratio(d / (c * c)))
}

/// I(a, b) = 1 + log 2 − log(√b + a) − Δ₀(a, b), with I(0,0) = 1.
pub fn i_func(a: f64, b: f64) -> Result<f64> {
    check_ab("i_func", a, b)?;
    if a == 0.0 && b == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 + std::f64::consts::LN_2 - (b.sqrt() + a).ln() - delta0(a, b)?)
}

/// Complex I on the region where `Re(√b + a) > 0`, principal branches.
pub fn i_func_c(a: Complex64, b: Complex64) -> Result<Complex64> {
    if a == Complex64::new(0.0, 0.0) && b == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let sb = b.sqrt();
    let s = sb + a;
    if s.re <= 0.0 {
        return Err(Error::domain(
            "i_func_c",
            format!("√b + a = {s} leaves the right half-plane"),
        ));
    }
    let c = 1.0 + sb;
    let w = (1.0 + b - 2.0 * a) / (c * c);
    if w.im == 0.0 && w.re >= 1.0 {
        return Err(Error::domain("i_func_c", format!("argument {w} on the branch cut")));
    }
    let d0 = 2.0 / c * atanh_ratio_c(w);
    Ok(1.0 + std::f64::consts::LN_2 - s.ln() - d0)
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-12,
        max_intervals: 20_000,
    }
}

/// J(a,b) = ∫₀^∞ (θ/√Q − θ/(θ+1)) dθ/(θ+1).
pub fn quad_j(a: f64, b: f64) -> Result<f64> {
    check_ab("quad_j", a, b)?;
    let f = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let q = t * t + 2.0 * a * t + b;
        let sq = q.sqrt();
        let t1 = t + 1.0;
        // θ/√Q − θ/(θ+1) = θ((θ+1)² − Q) / (√Q (θ+1)(θ+1+√Q))
        let num = t * ((2.0 - 2.0 * a) * t + 1.0 - b);
        num / (sq * t1 * (t1 + sq)) / t1
    };
    Ok(integrate_half_line(f, quad_opts())?.value)
}

/// Δ(a,b) = ∫₀^∞ dθ/((θ+1)√Q).
pub fn quad_delta(a: f64, b: f64) -> Result<f64> {
    check_ab("quad_delta", a, b)?;
    if a + b == 0.0 {
        return Err(Error::domain("quad_delta", "divergent at (0,0)"));
    }
    let f = |t: f64| 1.0 / ((t + 1.0) * (t * t + 2.0 * a * t + b).sqrt());
    Ok(integrate_half_line(f, quad_opts())?.value)
}

/// ∫₀^∞ θ dθ/Q^{3/2} by quadrature; equals 1/(√b + a).
pub fn quad_three_halves_first(a: f64, b: f64) -> Result<f64> {
    check_ab("quad_three_halves_first", a, b)?;
    let f = |t: f64| {
        let q = t * t + 2.0 * a * t + b;
        t / (q * q.sqrt())
    };
    Ok(integrate_half_line(f, quad_opts())?.value)
}

/// ∫₀^∞ dθ/Q^{3/2} by quadrature; equals 1/(√b(√b + a)). Needs b > 0.
pub fn quad_three_halves_zeroth(a: f64, b: f64) -> Result<f64> {
    check_ab("quad_three_halves_zeroth", a, b)?;
    if b == 0.0 {
        return Err(Error::domain("quad_three_halves_zeroth", "divergent for b = 0"));
    }
    let f = |t: f64| {
        let q = t * t + 2.0 * a * t + b;
        1.0 / (q * q.sqrt())
    };
    Ok(integrate_half_line(f, quad_opts())?.value)
}

/// Closed forms of the two integrals above.
pub fn three_halves_closed(a: f64, b: f64) -> (f64, f64) {
    let sb = b.sqrt();
    (1.0 / (sb + a), 1.0 / (sb * (sb + a)))
}
