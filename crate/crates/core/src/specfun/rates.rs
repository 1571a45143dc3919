//! Merger rates of Λ-coalescents and the Laplace exponent of the
//! β(3/2,1/2) case.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::gamma::{beta_fn, binomial, ln_gamma_unchecked};
use super::quad::{integrate_unit, QuadOptions};
use crate::error::{Error, Result};

/// The finite measure Λ on [0,1] driving a Λ-coalescent.
///
/// `Beta { a, b }` is the kernel `u^{a−1}(1−u)^{b−1} du` without the
/// `1/β(a,b)` normalization, so `Beta { a: 1.5, b: 0.5 }` is exactly
/// `√(u/(1−u)) du` (total mass π/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LambdaMeasure {
    /// Point mass at 0.
    Kingman,
    /// Lebesgue measure on [0,1] (Bolthausen–Sznitman).
    Uniform,
    Beta { a: f64, b: f64 },
}

impl LambdaMeasure {
    /// The β(3/2,1/2) measure `√(u/(1−u)) du`.
    pub const PRUNING: LambdaMeasure = LambdaMeasure::Beta { a: 1.5, b: 0.5 };

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::domain(
                "LambdaMeasure::beta",
                format!("parameters must be positive and finite, got ({a}, {b})"),
            ));
        }
        Ok(LambdaMeasure::Beta { a, b })
    }

    /// Density with respect to Lebesgue measure on (0,1). `None` for Kingman.
    pub fn density(&self, u: f64) -> Option<f64> {
        match *self {
            LambdaMeasure::Kingman => None,
            LambdaMeasure::Uniform => Some(1.0),
            LambdaMeasure::Beta { a, b } => Some(u.powf(a - 1.0) * (1.0 - u).powf(b - 1.0)),
        }
    }

    /// True for the measure whose rates have the closed form
    /// β(k−1/2, b−k+1/2).
    pub fn is_pruning(&self) -> bool {
        matches!(*self, LambdaMeasure::Beta { a, b } if a == 1.5 && b == 0.5)
    }

    fn validate(&self) -> Result<()> {
        if let LambdaMeasure::Beta { a, b } = *self {
            LambdaMeasure::beta(a, b)?;
        }
        Ok(())
    }
}

impl fmt::Display for LambdaMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaMeasure::Kingman => write!(f, "kingman"),
            LambdaMeasure::Uniform => write!(f, "uniform"),
            LambdaMeasure::Beta { a, b } => write!(f, "beta:{a},{b}"),
        }
    }
}

/// Parses `kingman`, `uniform` or `beta:A,B`.
impl FromStr for LambdaMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "kingman" => return Ok(LambdaMeasure::Kingman),
            "uniform" | "bolthausen-sznitman" => return Ok(LambdaMeasure::Uniform),
            _ => {}
        }
        let params = s
            .strip_prefix("beta:")
            .ok_or_else(|| Error::Parse(format!("unknown measure `{s}`")))?;
        let (a, b) = params
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected beta:A,B, got `{s}`")))?;
        let a: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad beta parameter `{a}`")))?;
        let b: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad beta parameter `{b}`")))?;
        LambdaMeasure::beta(a, b)
    }
}

fn check_nk(op: &'static str, n: u32, k: u32) -> Result<()> {
    if n < 2 || k < 2 || k > n {
        return Err(Error::domain(op, format!("need 2 ≤ k ≤ n, got n={n}, k={k}")));
    }
    Ok(())
}

/// Rate at which `k` fixed blocks among `n` merge in the β(3/2,1/2)
/// coalescent: β(k−1/2, n−k+1/2).
pub fn rate_nk(n: u32, k: u32) -> Result<f64> {
    check_nk("rate_nk", n, k)?;
    beta_fn(k as f64 - 0.5, (n - k) as f64 + 0.5)
}

/// Total event rate from `n` blocks: (n−1)·β(1/2, n−1/2).
pub fn rate_total(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("rate_total", format!("need n ≥ 2, got {n}")));
    }
    Ok((n - 1) as f64 * beta_fn(0.5, n as f64 - 0.5)?)
}

/// ∫ u^{k−2}(1−u)^{b−k} Λ(du) by adaptive quadrature (Kingman and
/// Uniform are exact).
pub fn rate_bk_general(measure: LambdaMeasure, b: u32, k: u32) -> Result<f64> {
    check_nk("rate_bk_general", b, k)?;
    measure.validate()?;
    let (p, q) = ((k - 2) as f64, (b - k) as f64);
    match measure {
        LambdaMeasure::Kingman => Ok(if k == 2 { 1.0 } else { 0.0 }),
        // ∫ u^p (1−u)^q du
        LambdaMeasure::Uniform => beta_fn(p + 1.0, q + 1.0),
        LambdaMeasure::Beta { a, b: bb } => {
            let (e0, e1) = (p + a - 1.0, q + bb - 1.0);
            if e0 <= -1.0 || e1 <= -1.0 {
                return Err(Error::domain(
                    "rate_bk_general",
                    format!("integrand not integrable for {measure} at (b,k)=({b},{k})"),
                ));
            }
            // relative accuracy only: entries for large b are far below 1e-12
            let opts = QuadOptions {
                abs_tol: f64::MIN_POSITIVE,
                rel_tol: 1e-12,
                max_intervals: 20_000,
            };
            integrate_unit(|u, v| u.powf(e0) * v.powf(e1), opts)
                .map(|r| r.value)
                .map_err(|e| match e {
                    Error::Quadrature { detail, .. } => Error::Quadrature {
                        detail,
                        location: Some(format!("(b,k)=({b},{k})")),
                    },
                    other => other,
                })
        }
    }
}

/// Φ(λ) = ∫(1−(1−u)^λ) Λ(du)/u² = 2√π Γ(λ+1/2)/Γ(λ) for the pruning
/// measure.
pub fn laplace_exponent(lam: f64) -> Result<f64> {
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(Error::domain("laplace_exponent", format!("need λ > 0, got {lam}")));
    }
    Ok(2.0 * PI.sqrt() * (ln_gamma_unchecked(lam + 0.5) - ln_gamma_unchecked(lam)).exp())
}

/// The defining integral of [`laplace_exponent`], evaluated numerically.
pub fn laplace_exponent_quad(lam: f64) -> Result<f64> {
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(Error::domain("laplace_exponent_quad", format!("need λ > 0, got {lam}")));
    }
    let integrand = |u: f64, v: f64| {
        let ln_v = if u < 0.5 { (-u).ln_1p() } else { v.ln() };
        // 1 − (1−u)^λ without cancellation near u = 0
        let gain = -(lam * ln_v).exp_m1();
        gain / (u * u.sqrt() * v.sqrt())
    };
    let opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-12,
        max_intervals: 20_000,
    };
    Ok(integrate_unit(integrand, opts)?.value)
}

/// Σ_{k=2}^{n} C(n,k)·λ_{n,k}, the right-hand side of the rate identity.
pub fn rate_total_by_sum(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("rate_total_by_sum", format!("need n ≥ 2, got {n}")));
    }
    let mut s = 0.0;
    for k in 2..=n {
        s += binomial(n as u64, k as u64) * rate_nk(n, k)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn closed_form_examples() {
        assert!(close(rate_nk(3, 2).unwrap(), PI / 8.0, 1e-14));
        assert!(close(rate_nk(3, 3).unwrap(), 3.0 * PI / 8.0, 1e-14));
        assert!(close(rate_nk(2, 2).unwrap(), PI / 2.0, 1e-14));
        assert!(close(rate_total(2).unwrap(), PI / 2.0, 1e-14));
        assert!(close(rate_total(3).unwrap(), 3.0 * PI / 4.0, 1e-14));
        assert!(close(3.0 * PI / 8.0 + 3.0 * PI / 8.0, rate_total(3).unwrap(), 1e-14));
    }

    #[test]
    fn largest_rate_is_total_over_n_minus_one() {
        for n in 2..40 {
            let lhs = rate_nk(n, n).unwrap();
            let rhs = rate_total(n).unwrap() / (n - 1) as f64;
            assert!((lhs / rhs - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(rate_nk(3, 1).is_err());
        assert!(rate_nk(3, 4).is_err());
        assert!(rate_total(1).is_err());
        assert!(rate_bk_general(LambdaMeasure::Uniform, 2, 3).is_err());
        assert!(laplace_exponent(0.0).is_err());
        assert!(LambdaMeasure::beta(0.0, 1.0).is_err());
    }

    #[test]
    fn general_rates() {
        assert_eq!(rate_bk_general(LambdaMeasure::Kingman, 5, 2).unwrap(), 1.0);
        assert_eq!(rate_bk_general(LambdaMeasure::Kingman, 5, 3).unwrap(), 0.0);
        assert!(close(rate_bk_general(LambdaMeasure::Uniform, 4, 3).unwrap(), 1.0 / 6.0, 1e-14));
        let q = rate_bk_general(LambdaMeasure::PRUNING, 3, 2).unwrap();
        assert!(close(q, PI / 8.0, 1e-8));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for n in 2..=12 {
            for k in 2..=n {
                let q = rate_bk_general(LambdaMeasure::PRUNING, n, k).unwrap();
                let c = rate_nk(n, k).unwrap();
                assert!(close(q, c, 1e-8), "n={n} k={k}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn non_pruning_beta_uses_quadrature() {
        // Beta(2 − 1.2, 1.2) is the usual β(2−α, α) family at α = 1.2
        let m = LambdaMeasure::beta(0.8, 1.2).unwrap();
        let q = rate_bk_general(m, 6, 2).unwrap();
        let exact = beta_fn(0.8, 5.2).unwrap();
        assert!(close(q, exact, 1e-8), "{q} vs {exact}");
    }

    #[test]
    fn laplace_exponent_values() {
        assert!(close(laplace_exponent(1.0).unwrap(), PI, 1e-12));
        assert!(close(laplace_exponent(2.0).unwrap(), 1.5 * PI, 1e-12));
        assert!(laplace_exponent(1e-12).unwrap() < 1e-10);
        for lam in [0.5, 1.0, 2.0, 5.0] {
            let q = laplace_exponent_quad(lam).unwrap();
            assert!(close(q, laplace_exponent(lam).unwrap(), 1e-6), "λ={lam}");
        }
    }

    #[test]
    fn measure_parsing() {
        assert_eq!("kingman".parse::<LambdaMeasure>().unwrap(), LambdaMeasure::Kingman);
        assert_eq!("uniform".parse::<LambdaMeasure>().unwrap(), LambdaMeasure::Uniform);
        assert_eq!("beta:1.5,0.5".parse::<LambdaMeasure>().unwrap(), LambdaMeasure::PRUNING);
        assert!("beta:1.5".parse::<LambdaMeasure>().is_err());
        assert!("beta:-1,2".parse::<LambdaMeasure>().is_err());
        let m = LambdaMeasure::beta(0.8, 1.2).unwrap();
        assert_eq!(m.to_string().parse::<LambdaMeasure>().unwrap(), m);
    }
}
