//! Generating functions of the last coalescent event.
//!
//! Φ(ρ, ρ_*) = E[ρ^{B−E} ρ_*^E] and Ψ(ρ, ρ0, ρ1) = E[ρ^{U−V} ρ0^{V−W} ρ1^W].
//! With `c = 1 + √(1−ρ_*)` and `r = √ρ`,
//!
//! ```text
//! Φ = ρ(1 + 2 log 2) − (ρ + r) log(c + r) + (r − ρ) log(c − r)
//! ```
//!
//! which is even in `r`, hence analytic in ρ. Ψ goes through
//! [`i_func`](super::identities::i_func); Φ(ρ,ρ_*) = Ψ(ρ,ρ_*,ρ_*) is an
//! algebraic identity between the two routes, not a shared code path.

use num_complex::Complex64;
use std::f64::consts::LN_2;

use super::identities::{i_func, i_func_c};
use crate::error::{Error, Result};

/// Evaluation point of Φ or Ψ. For Φ, `rho_star` is read from `rho0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfPoint {
    pub rho: f64,
    pub rho0: f64,
    pub rho1: f64,
}

impl GfPoint {
    pub fn new(rho: f64, rho0: f64, rho1: f64) -> Result<Self> {
        for (name, v) in [("rho", rho), ("rho0", rho0), ("rho1", rho1)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain("GfPoint", format!("{name}={v} outside [0,1]")));
            }
        }
        Ok(GfPoint { rho, rho0, rho1 })
    }

    pub fn phi(&self) -> Result<f64> {
        gf_phi(self.rho, self.rho0)
    }

    pub fn psi(&self) -> Result<f64> {
        gf_psi(self.rho, self.rho0, self.rho1)
    }
}

fn unit(op: &'static str, name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::domain(op, format!("{name}={v} outside [0,1]")));
    }
    Ok(())
}

/// x·log(y) with the convention 0·log 0 = 0.
fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Φ(ρ, ρ_*) for real arguments in [0,1].
pub fn gf_phi(rho: f64, rho_star: f64) -> Result<f64> {
    unit("gf_phi", "rho", rho)?;
    unit("gf_phi", "rho_star", rho_star)?;
    let c = 1.0 + (1.0 - rho_star).sqrt();
    let r = rho.sqrt();
    if c - r < 0.0 {
        return Err(Error::domain("gf_phi", "1 + √(1−ρ_*) − √ρ < 0"));
    }
    // c − r vanishes only at ρ = ρ_* = 1, where r − ρ vanishes too
    Ok(rho * (1.0 + 2.0 * LN_2) - xlogy(rho + r, c + r) + xlogy(r - rho, c - r))
}

/// Φ on the open unit polydisc, principal branches.
pub fn gf_phi_c(rho: Complex64, rho_star: Complex64) -> Result<Complex64> {
    if rho.norm() >= 1.0 || rho_star.norm() >= 1.0 {
        return Err(Error::domain("gf_phi_c", "arguments must lie in the open unit disc"));
    }
    let c = 1.0 + (1.0 - rho_star).sqrt();
    let r = rho.sqrt();
    if (c - r).re <= 0.0 || (c + r).re <= 0.0 {
        return Err(Error::domain("gf_phi_c", "logarithm argument reaches the branch cut"));
    }
    let zero = Complex64::new(0.0, 0.0);
    if rho == zero {
        return Ok(zero);
    }
    Ok(rho * (1.0 + 2.0 * LN_2) - (rho + r) * (c + r).ln() + (r - rho) * (c - r).ln())
}

/// Ψ(ρ, ρ0, ρ1) = ρ·I(1 − (ρ+ρ1)/2, 1 − ρ0) for real arguments in [0,1].
pub fn gf_psi(rho: f64, rho0: f64, rho1: f64) -> Result<f64> {
    unit("gf_psi", "rho", rho)?;
    unit("gf_psi", "rho0", rho0)?;
    unit("gf_psi", "rho1", rho1)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    Ok(rho * i_func(1.0 - 0.5 * (rho + rho1), 1.0 - rho0)?)
}

/// Ψ on the open unit polydisc.
pub fn gf_psi_c(rho: Complex64, rho0: Complex64, rho1: Complex64) -> Result<Complex64> {
    if rho.norm() >= 1.0 || rho0.norm() >= 1.0 || rho1.norm() >= 1.0 {
        return Err(Error::domain("gf_psi_c", "arguments must lie in the open unit disc"));
    }
    Ok(rho * i_func_c(1.0 - 0.5 * (rho + rho1), 1.0 - rho0)?)
}

/// E[ρ1^W] = I((1−ρ1)/2, 0).
pub fn gf_w(rho1: f64) -> Result<f64> {
    unit("gf_w", "rho1", rho1)?;
    i_func(0.5 * (1.0 - rho1), 0.0)
}

/// The one-variable marginals that are extracted into laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Marginal {
    /// Φ(1, z): law of E.
    E,
    /// Φ(z, z): law of B.
    B,
    /// Φ(z, 1): law of B − E.
    BMinusE,
    /// Ψ(1, 1, z): law of W.
    W,
}

impl Marginal {
    pub const ALL: [Marginal; 4] = [Marginal::E, Marginal::B, Marginal::BMinusE, Marginal::W];

    pub fn name(&self) -> &'static str {
        match self {
            Marginal::E => "E",
            Marginal::B => "B",
            Marginal::BMinusE => "B-E",
            Marginal::W => "W",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e" | "phi-e" => Ok(Marginal::E),
            "b" | "phi-b" => Ok(Marginal::B),
            "b-e" | "be" | "phi-be" | "phi" => Ok(Marginal::BMinusE),
            "w" | "psi-w" | "psi" => Ok(Marginal::W),
            other => Err(Error::Parse(format!("unknown marginal `{other}`"))),
        }
    }

    /// The probability generating function on the open unit disc.
    pub fn pgf(&self, z: Complex64) -> Result<Complex64> {
        // a slot fixed at 1 is substituted in closed form, since the
        // polydisc routines only accept the open disc
        let one = Complex64::new(1.0, 0.0);
        match self {
            Marginal::E => phi_at_one_first(z),
            Marginal::B => gf_phi_c(z, z),
            Marginal::BMinusE => phi_at_one_second(z),
            Marginal::W => {
                let a = 0.5 * (one - z);
                i_func_c(a, Complex64::new(0.0, 0.0))
            }
        }
    }
}

/// Φ(1, z) = 1 + 2 log 2 − 2 log(2 + √(1−z)).
fn phi_at_one_first(z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::domain("gf_phi_c", "argument must lie in the open unit disc"));
    }
    let s = (1.0 - z).sqrt();
    Ok(1.0 + 2.0 * LN_2 - 2.0 * (2.0 + s).ln())
}

/// Φ(z, 1) = z(1 + 2 log 2) − (z + √z) log(1 + √z) + (√z − z) log(1 − √z).
fn phi_at_one_second(z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::domain("gf_phi_c", "argument must lie in the open unit disc"));
    }
    gf_phi_c_boundary(z)
}

fn gf_phi_c_boundary(rho: Complex64) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if rho == zero {
        return Ok(zero);
    }
    let r = rho.sqrt();
    Ok(rho * (1.0 + 2.0 * LN_2) - (rho + r) * (1.0 + r).ln() + (r - rho) * (1.0 - r).ln())
}
