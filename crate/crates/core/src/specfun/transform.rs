//! Transforms of the total mass σ under the excursion measure with
//! branching mechanism ψ(λ) = αλ², and the joint transform f_θ.

use super::gamma::ln_gamma_unchecked;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Coefficients of the radicand `δ0 + 2δ1√(1−a) − δ2·a` in f_θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaCoeffs {
    pub delta0: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub theta: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl DeltaCoeffs {
    pub fn new(theta: f64, lambda: f64, alpha: f64, rho: f64, rho0: f64, rho1: f64) -> Result<Self> {
        for (name, v) in [("theta", theta), ("lambda", lambda), ("alpha", alpha)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain("DeltaCoeffs", format!("{name}={v} must be positive")));
            }
        }
        for (name, v) in [("rho", rho), ("rho0", rho0), ("rho1", rho1)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain("DeltaCoeffs", format!("{name}={v} outside [0,1]")));
            }
        }
        let q = (lambda / alpha).sqrt();
        Ok(DeltaCoeffs {
            delta0: theta * theta + lambda / alpha + 2.0 * theta * q * (1.0 - rho),
            delta1: theta * rho * q,
            delta2: lambda / alpha * rho0 - theta * q * (rho - rho1),
            theta,
            lambda,
            alpha,
        })
    }

    /// δ0 − δ2, bounded below by θ².
    pub fn gap(&self) -> f64 {
        self.delta0 - self.delta2
    }
}

/// f_θ(a) = θ + √(λ/α) − √(δ0 + 2δ1√(1−a) − δ2·a).
pub fn f_theta(a: f64, c: &DeltaCoeffs) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::domain("f_theta", format!("a={a} outside [0,1]")));
    }
    let radicand = c.delta0 + 2.0 * c.delta1 * (1.0 - a).sqrt() - c.delta2 * a;
    if !(radicand > 0.0) {
        return Err(Error::Invariant(format!("f_theta radicand {radicand} is not positive")));
    }
    Ok(c.theta + (c.lambda / c.alpha).sqrt() - radicand.sqrt())
}

fn check_lam_alpha(op: &'static str, lam: f64, alpha: f64) -> Result<()> {
    if !(lam > 0.0 && alpha > 0.0) || !lam.is_finite() || !alpha.is_finite() {
        return Err(Error::domain(op, format!("need λ, α > 0, got ({lam}, {alpha})")));
    }
    Ok(())
}

/// N[1 − e^{−κσ}] = √(κ/α).
pub fn laplace_sigma(kappa: f64, alpha: f64) -> Result<f64> {
    check_lam_alpha("laplace_sigma", kappa, alpha)?;
    Ok((kappa / alpha).sqrt())
}

/// N[σ^n e^{−λσ}] = Γ(n − 1/2) / (2√(απ) λ^{n−1/2}).
pub fn sigma_moment(n: u32, lam: f64, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("sigma_moment", "need n ≥ 1"));
    }
    check_lam_alpha("sigma_moment", lam, alpha)?;
    let nh = n as f64 - 0.5;
    Ok((ln_gamma_unchecked(nh) - nh * lam.ln()).exp() / (2.0 * (alpha * PI).sqrt()))
}

/// N[Ñ = k] for the Poissonian number of sampled leaves with intensity λ:
/// √(λ/α)·Γ(k − 1/2) / (2√π·Γ(k+1)).
pub fn poisson_leaf_mass(k: u32, lam: f64, alpha: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("poisson_leaf_mass", "need k ≥ 1"));
    }
    check_lam_alpha("poisson_leaf_mass", lam, alpha)?;
    let kf = k as f64;
    let ln_ratio = ln_gamma_unchecked(kf - 0.5) - ln_gamma_unchecked(kf + 1.0);
    Ok((lam / alpha).sqrt() * ln_ratio.exp() / (2.0 * PI.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_examples() {
        assert!((sigma_moment(1, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-14);
        assert!((sigma_moment(2, 1.0, 1.0).unwrap() - 0.25).abs() < 1e-14);
        assert!((sigma_moment(1, 4.0, 1.0).unwrap() - 0.25).abs() < 1e-14);
        assert!(sigma_moment(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn moments_are_signed_derivatives_of_root() {
        // N[σ^n e^{−λσ}] = (−1)^{n+1} dⁿ/dλⁿ √(λ/α); the n-th derivative of
        // λ^{1/2} is (1/2)(1/2 − 1)…(1/2 − n + 1) λ^{1/2 − n}
        for &(lam, alpha) in &[(1.0f64, 1.0f64), (0.7, 2.0), (3.0, 0.5)] {
            let mut falling = 1.0;
            for n in 1..=6u32 {
                falling *= 0.5 - (n - 1) as f64;
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                let deriv = sign * falling * f64::powf(lam, 0.5 - n as f64) / alpha.sqrt();
                let m = sigma_moment(n, lam, alpha).unwrap();
                assert!((m / deriv - 1.0).abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn leaf_mass_is_scaled_moment() {
        let (lam, alpha) = (2.5f64, 2.0f64);
        let mut fact = 1.0;
        for k in 1..=8u32 {
            fact *= k as f64;
            let via_moment = lam.powi(k as i32) / fact * sigma_moment(k, lam, alpha).unwrap();
            assert!((poisson_leaf_mass(k, lam, alpha).unwrap() / via_moment - 1.0).abs() < 1e-12);
        }
        // the masses sum to N[Ñ > 0] = N[1 − e^{−λσ}]; terms decay like
        // C·k^{−3/2}, so the tail past K is 2C/√(K − 1/2) up to O(K^{−3/2})
        let big_k = 4000u32;
        let head: f64 = (1..big_k).map(|k| poisson_leaf_mass(k, lam, alpha).unwrap()).sum();
        let c = (lam / alpha).sqrt() / (2.0 * std::f64::consts::PI.sqrt());
        let tail = 2.0 * c / (big_k as f64 - 0.5).sqrt();
        assert!((head + tail - laplace_sigma(lam, alpha).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn f_theta_reductions() {
        for &(theta, lam, alpha) in &[(1.0, 1.0, 1.0), (0.3, 2.0, 2.0), (4.0, 0.1, 0.5)] {
            let c = DeltaCoeffs::new(theta, lam, alpha, 1.0, 1.0, 1.0).unwrap();
            let v = f_theta(1.0, &c).unwrap();
            assert!((v - (lam / alpha).sqrt()).abs() < 1e-10);
            let c = DeltaCoeffs::new(theta, lam, alpha, 0.4, 0.2, 0.9).unwrap();
            let v0 = f_theta(0.0, &c).unwrap();
            let expect = theta + (lam / alpha).sqrt() - (c.delta0 + 2.0 * c.delta1).sqrt();
            assert!((v0 - expect).abs() < 1e-14);
        }
        let c = DeltaCoeffs::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((c.gap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gap_closed_form() {
        let (theta, lam, alpha, r, r0, r1) = (0.7, 1.3, 2.0, 0.2, 0.6, 0.9);
        let c = DeltaCoeffs::new(theta, lam, alpha, r, r0, r1).unwrap();
        let q = (lam / alpha).sqrt();
        let expect = theta * theta + lam / alpha * (1.0 - r0) + theta * q * (2.0 - r - r1);
        assert!((c.gap() - expect).abs() < 1e-14);
        assert!(c.gap() >= theta * theta);
    }
}
