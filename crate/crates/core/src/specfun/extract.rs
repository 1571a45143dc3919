//! Laws from generating functions: contour inversion for moderate orders,
//! power-series expansion for high orders.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{LN_2, TAU};

use super::gf::Marginal;
use super::series::Series;
use crate::error::{Error, Result};

pub const DEFAULT_RADIUS: f64 = 0.5;
pub const MAX_ORDER: usize = 512;

/// Coefficients `p_0..=p_kmax` with an error estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extraction {
    pub probs: Vec<f64>,
    pub error_estimate: f64,
    pub radius: f64,
    pub points: usize,
}

fn dft_coefficients<F>(pgf: &F, kmax: usize, radius: f64, points: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let samples: Vec<Complex64> = (0..points)
        .map(|j| pgf(Complex64::from_polar(radius, TAU * j as f64 / points as f64)))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(kmax + 1);
    let mut scale = 1.0 / points as f64;
    for k in 0..=kmax {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, s) in samples.iter().enumerate() {
            // index reduction keeps the twiddle angle exact
            let idx = (j * k) % points;
            acc += s * Complex64::from_polar(1.0, -TAU * idx as f64 / points as f64);
        }
        out.push(acc * scale);
        scale /= radius;
    }
    Ok(out)
}

/// Coefficients of a probability generating function by discrete Fourier
/// inversion on the circle `|z| = radius` with `N ≥ 8·kmax` points.
///
/// The error estimate is the largest difference to a second run at
/// `radius/2`. Fails with [`Error::Precision`] when that estimate or any
/// imaginary residue exceeds `tol` (residues are held to 1e-9 regardless).
pub fn pgf_extract<F>(pgf: F, kmax: usize, radius: f64, tol: f64) -> Result<Extraction>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if kmax > MAX_ORDER {
        return Err(Error::domain("pgf_extract", format!("kmax {kmax} exceeds {MAX_ORDER}")));
    }
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::domain("pgf_extract", format!("radius {radius} outside (0,1)")));
    }
    let points = (8 * kmax.max(1)).next_power_of_two();
    let main = dft_coefficients(&pgf, kmax, radius, points)?;
    let check = dft_coefficients(&pgf, kmax, radius / 2.0, points)?;
    let error_estimate = main
        .iter()
        .zip(&check)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if error_estimate > tol {
        return Err(Error::Precision {
            op: "pgf_extract",
            estimate: error_estimate,
            tolerance: tol,
        });
    }
    let residue = main.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if residue > tol.min(1e-9) {
        return Err(Error::Precision {
            op: "pgf_extract (imaginary residue)",
            estimate: residue,
            tolerance: tol.min(1e-9),
        });
    }
    if let Some((k, c)) = main.iter().enumerate().find(|(_, c)| c.re < -1e-9) {
        return Err(Error::Invariant(format!(
            "coefficient {k} = {} is negative; not a probability generating function",
            c.re
        )));
    }
    Ok(Extraction {
        probs: main.iter().map(|c| c.re).collect(),
        error_estimate,
        radius,
        points,
    })
}

/// Law of a marginal by power-series expansion, `p_0..=p_kmax`.
///
/// Accurate to a few ulps at every order; used where the contour route's
/// `radius^{−k}` amplification of round-off makes it unusable.
pub fn series_law(marginal: Marginal, kmax: usize) -> Result<Vec<f64>> {
    let m = kmax + 1;
    match marginal {
        Marginal::E => {
            // 1 + 2 log 2 − 2 log(2 + √(1−z))
            let one = Series::constant(1.0, m);
            let s = one.sub(&Series::monomial(1, m)).sqrt()?;
            let l = Series::constant(2.0, m).add(&s).ln()?;
            Ok(Series::constant(1.0 + 2.0 * LN_2, m).sub(&l.scale(2.0)).0)
        }
        Marginal::B | Marginal::BMinusE => {
            // work in t = √z, keep even powers
            let mt = 2 * kmax + 2;
            let r = Series::monomial(1, mt);
            let rho = Series::monomial(2, mt);
            let one = Series::constant(1.0, mt);
            let c = if marginal == Marginal::B {
                one.add(&one.sub(&rho).sqrt()?)
            } else {
                one.clone()
            };
            let phi = rho
                .scale(1.0 + 2.0 * LN_2)
                .sub(&rho.add(&r).mul(&c.add(&r).ln()?))
                .add(&r.sub(&rho).mul(&c.sub(&r).ln()?));
            let odd = phi.0.iter().skip(1).step_by(2).fold(0.0f64, |a, &b| a.max(b.abs()));
            if odd > 1e-12 {
                return Err(Error::Invariant(format!("odd powers of √z survive ({odd:e})")));
            }
            Ok(phi.0.iter().step_by(2).take(m).copied().collect())
        }
        Marginal::W => {
            // I((1−z)/2, 0) = 1 + 2 log 2 − log(1−z) − 2 Σ z^j/(2j+1)
            let log1m = Series::constant(1.0, m).sub(&Series::monomial(1, m)).ln()?;
            let mut out = vec![0.0; m];
            for (j, o) in out.iter_mut().enumerate() {
                *o = -log1m.0[j] - 2.0 / (2 * j + 1) as f64;
            }
            out[0] += 1.0 + 2.0 * LN_2;
            Ok(out)
        }
    }
}

/// Extracted laws of E (Φ(1,·)) and B (Φ(ρ,ρ)) at order 3, the only two
/// candidates for the value 23/160.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderThreeReport {
    pub p_e3: f64,
    pub p_b3: f64,
    pub target: f64,
    pub matches_e: bool,
    pub matches_b: bool,
}

pub fn order_three_report(radius: f64) -> Result<OrderThreeReport> {
    let e = pgf_extract(|z| Marginal::E.pgf(z), 8, radius, 1e-8)?;
    let b = pgf_extract(|z| Marginal::B.pgf(z), 8, radius, 1e-8)?;
    let target = 23.0 / 160.0;
    Ok(OrderThreeReport {
        p_e3: e.probs[3],
        p_b3: b.probs[3],
        target,
        matches_e: (e.probs[3] - target).abs() < 1e-8,
        matches_b: (b.probs[3] - target).abs() < 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln4m1() -> f64 {
        4f64.ln() - 1.0
    }

    #[test]
    fn geometric_law() {
        // pgf of Geometric(1/2) on {0,1,..}: 1/(2 − z)
        let ex = pgf_extract(|z| Ok(1.0 / (2.0 - z)), 10, 0.5, 1e-10).unwrap();
        for (k, p) in ex.probs.iter().enumerate() {
            assert!((p - 0.5f64.powi(k as i32 + 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn remark_values_by_contour() {
        let e = pgf_extract(|z| Marginal::E.pgf(z), 8, DEFAULT_RADIUS, 1e-8).unwrap();
        assert!((e.probs[0] - (1.0 - 2.0 * 1.5f64.ln())).abs() < 1e-8);
        assert!((e.probs[1] - 1.0 / 3.0).abs() < 1e-8);
        assert!((e.probs[2] - 1.0 / 9.0).abs() < 1e-8);
        let be = pgf_extract(|z| Marginal::BMinusE.pgf(z), 8, DEFAULT_RADIUS, 1e-8).unwrap();
        assert!(be.probs[0].abs() < 1e-8);
        assert!((be.probs[1] - ln4m1()).abs() < 1e-8);
        assert!((be.probs[2] - 1.0 / 3.0).abs() < 1e-8);
        let b = pgf_extract(|z| Marginal::B.pgf(z), 8, DEFAULT_RADIUS, 1e-8).unwrap();
        assert!((b.probs[2] - 5.0 / 12.0).abs() < 1e-8);
    }

    #[test]
    fn order_three_resolution() {
        let r = order_three_report(DEFAULT_RADIUS).unwrap();
        assert!(r.matches_b && !r.matches_e);
        assert!((r.p_e3 - 19.0 / 324.0).abs() < 1e-8);
    }

    #[test]
    fn series_matches_exact_rationals() {
        let e = series_law(Marginal::E, 6).unwrap();
        let e_exact = [
            1.0 - (2.25f64).ln(),
            1.0 / 3.0,
            1.0 / 9.0,
            19.0 / 324.0,
            97.0 / 2592.0,
            2059.0 / 77760.0,
            11191.0 / 559872.0,
        ];
        let b = series_law(Marginal::B, 6).unwrap();
        let b_exact = [0.0, 0.0, 5.0 / 12.0, 23.0 / 160.0, 17.0 / 224.0, 443.0 / 9216.0, 949.0 / 28160.0];
        for k in 0..=6 {
            assert!((e[k] - e_exact[k]).abs() < 1e-14, "E_{k}");
            assert!((b[k] - b_exact[k]).abs() < 1e-14, "B_{k}");
        }
    }

    #[test]
    fn series_b_minus_e_closed_form_to_order_200() {
        let be = series_law(Marginal::BMinusE, 200).unwrap();
        assert!(be[0].abs() < 1e-15);
        assert!((be[1] - ln4m1()).abs() < 1e-14);
        for k in 2..=200usize {
            let exact = 1.0 / ((k - 1) as f64 * (2 * k - 1) as f64);
            assert!((be[k] - exact).abs() < 1e-13 * (1.0 + exact), "k={k}");
        }
        let w = series_law(Marginal::W, 199).unwrap();
        for k in 0..200 {
            assert!((w[k] - be[k + 1]).abs() < 1e-13);
        }
    }

    #[test]
    fn series_agrees_with_contour_for_small_orders() {
        for m in Marginal::ALL {
            let s = series_law(m, 12).unwrap();
            let c = pgf_extract(|z| m.pgf(z), 12, DEFAULT_RADIUS, 1e-7).unwrap();
            for k in 0..=12 {
                assert!((s[k] - c.probs[k]).abs() < 1e-8, "{m:?} k={k}");
            }
        }
    }

    #[test]
    fn high_order_contour_is_refused() {
        let r = pgf_extract(|z| Marginal::E.pgf(z), 50, DEFAULT_RADIUS, 1e-8);
        assert!(matches!(r, Err(Error::Precision { .. })));
    }

    #[test]
    fn argument_checks() {
        assert!(pgf_extract(|z| Ok(z), 600, 0.5, 1.0).is_err());
        assert!(pgf_extract(|z| Ok(z), 5, 1.0, 1.0).is_err());
    }
}
