//! Special functions and generating functions against independent
//! closed forms.

use std::f64::consts::{LN_2, PI};

use coalforge_core::specfun::{
    gf_phi, gf_psi, gf_w, laplace_exponent, laplace_exponent_quad, pgf_extract, rate_bk_general, rate_nk,
    rate_total, rate_total_by_sum, series_law, LambdaMeasure, Marginal, DEFAULT_RADIUS,
};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn pruning_rates_from_the_general_kernel() {
    for n in 2..40u32 {
        for k in 2..=n {
            let general = rate_bk_general(LambdaMeasure::PRUNING, n, k).unwrap();
            assert!(close(general, rate_nk(n, k).unwrap(), 1e-8), "n={n} k={k}");
        }
        assert!(close(rate_total(n).unwrap(), rate_total_by_sum(n).unwrap(), 1e-10));
    }
    // λ_2 = β(½, 3/2) = π/2
    assert!(close(rate_total(2).unwrap(), PI / 2.0, 1e-14));
}

#[test]
fn laplace_exponent_closed_form_against_quadrature() {
    assert!(close(laplace_exponent(1.0).unwrap(), PI, 1e-13));
    assert!(close(laplace_exponent(2.0).unwrap(), 1.5 * PI, 1e-13));
    for lam in [0.1, 0.7, 3.3, 25.0] {
        assert!(close(laplace_exponent(lam).unwrap(), laplace_exponent_quad(lam).unwrap(), 1e-8), "{lam}");
    }
}

#[test]
fn w_law_matches_its_closed_form() {
    let law = series_law(Marginal::W, 60).unwrap();
    assert!(close(law[0], 2.0 * LN_2 - 1.0, 1e-12));
    for j in 1..=60usize {
        let j = j as f64;
        assert!(close(law[j as usize], 1.0 / (j * (2.0 * j + 1.0)), 1e-10), "j={j}");
    }
}

#[test]
fn b_minus_e_law_matches_its_closed_form() {
    let law = series_law(Marginal::BMinusE, 60).unwrap();
    assert!(law[0].abs() < 1e-14);
    assert!(close(law[1], 2.0 * LN_2 - 1.0, 1e-12));
    for k in 2..=60usize {
        let k = k as f64;
        assert!(close(law[k as usize], 1.0 / ((k - 1.0) * (2.0 * k - 1.0)), 1e-10), "k={k}");
    }
}

#[test]
fn laws_are_probability_vectors() {
    for m in Marginal::ALL {
        let law = series_law(m, 400).unwrap();
        assert!(law.iter().all(|&p| p >= -1e-15), "{m:?}");
        let s: f64 = law.iter().sum();
        assert!(s <= 1.0 + 1e-12 && s > 0.9, "{m:?}: {s}");
    }
}

#[test]
fn contour_and_series_agree_at_low_order() {
    for m in Marginal::ALL {
        let series = series_law(m, 12).unwrap();
        let contour = pgf_extract(|z| m.pgf(z), 12, DEFAULT_RADIUS, 1e-8).unwrap();
        for (k, (a, b)) in contour.probs.iter().zip(&series).enumerate() {
            assert!((a - b).abs() < 1e-7, "{m:?} k={k}: {a} vs {b}");
        }
    }
}

#[test]
fn generating_functions_at_the_corner() {
    assert!(close(gf_w(1.0).unwrap(), 1.0, 1e-12));
    assert!(close(gf_w(0.0).unwrap(), 2.0 * LN_2 - 1.0, 1e-12));
    assert!(close(gf_phi(1.0, 1.0).unwrap(), 1.0, 1e-12));
    assert!(close(gf_psi(1.0, 1.0, 1.0).unwrap(), 1.0, 1e-12));
    assert_eq!(gf_psi(0.0, 0.3, 0.4).unwrap(), 0.0);
}
