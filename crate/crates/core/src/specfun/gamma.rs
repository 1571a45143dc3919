//! Gamma, beta and incomplete-gamma functions, plus exact tree counts.

use num_bigint::BigUint;
use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

/// Lanczos parameter `r` for the 11-term approximation below.
const LANCZOS_R: f64 = 10.900511;

/// Lanczos coefficients (Godfrey), accurate to roughly 1e-15 relative.
const LANCZOS_D: [f64; 11] = [
    2.485_740_891_387_535_655_46e-5,
    1.051_423_785_817_219_742_10,
    -3.456_870_972_220_162_354_69,
    4.512_277_094_668_948_237_00,
    -2.982_852_253_235_766_557_21,
    1.056_397_115_771_267_130_77,
    -1.954_287_731_916_458_695_83e-1,
    1.709_705_434_044_412_243_07e-2,
    -5.719_261_174_043_057_812_83e-4,
    4.633_994_733_599_056_367_08e-6,
    -2.719_949_084_886_077_039_10e-9,
];

/// ln(2·sqrt(e/π))
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_222_345_518_445_781_647_212_251_852_727_902_597_8;

const LN_PI: f64 = 1.144_729_885_849_400_174_143_427_351_353_058_711_647_294_812_915_311_6;

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS_D
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_D[0], |s, (i, d)| s + d / (x + i as f64 - 1.0))
}

/// Natural log of Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma", format!("x = {x} must be positive and finite")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let s = LANCZOS_D
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_D[0], |s, (i, d)| s + d / (i as f64 - x));
        LN_PI
            - (PI * x).sin().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + LANCZOS_R) / E).ln()
    } else {
        lanczos_sum(x).ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / E).ln()
    }
}

/// Γ(x) for x > 0 (overflows to infinity beyond x ≈ 171.6).
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

/// ln β(a, b).
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("beta_fn", format!("a = {a}, b = {b} must be positive")));
    }
    Ok(ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b))
}

/// β(a,b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    ln_beta(a, b).map(f64::exp)
}

/// ln of the binomial coefficient C(n, k) as a real number.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma_unchecked(n as f64 + 1.0)
        - ln_gamma_unchecked(k as f64 + 1.0)
        - ln_gamma_unchecked((n - k) as f64 + 1.0)
}

/// Exact binomial coefficient for small arguments.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Number of ordered binary trees with `n` labelled leaves, (2n−2)!/(n−1)!.
pub fn catalan_trees(n: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("catalan_trees", "n must be at least 1"));
    }
    if n > 30 {
        return Err(Error::domain("catalan_trees", format!("n = {n} exceeds 30")));
    }
    // (2n-2)!/(n-1)! = n · (n+1) ··· (2n-2)
    let mut acc = BigUint::from(1u32);
    for i in n..=(2 * n - 2) {
        acc *= i;
    }
    Ok(acc)
}

const INC_GAMMA_EPS: f64 = 1e-15;
const INC_GAMMA_MAX_ITER: usize = 10_000;

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    check_inc_gamma(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        Ok(gamma_p_series(a, x))
    } else {
        Ok(1.0 - gamma_q_fraction(a, x))
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x).
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    check_inc_gamma(a, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < a + 1.0 {
        Ok(1.0 - gamma_p_series(a, x))
    } else {
        Ok(gamma_q_fraction(a, x))
    }
}

fn check_inc_gamma(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !(x >= 0.0) {
        return Err(Error::domain("incomplete_gamma", format!("a = {a}, x = {x}")));
    }
    Ok(())
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..INC_GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * INC_GAMMA_EPS {
            break;
        }
    }
    (sum.ln() - x + a * x.ln() - ln_gamma_unchecked(a)).exp()
}

/// Modified Lentz evaluation of the continued fraction for Q(a, x).
fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..INC_GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < INC_GAMMA_EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma_unchecked(a)).exp() * h
}

/// Standard normal CDF through erf(z) = P(1/2, z²).
pub fn normal_cdf(x: f64) -> f64 {
    let z2 = 0.5 * x * x;
    if z2 == 0.0 {
        0.5
    } else if z2 < 1.5 {
        let p = gamma_p_series(0.5, z2);
        if x > 0.0 { 0.5 + 0.5 * p } else { 0.5 - 0.5 * p }
    } else {
        let q = gamma_q_fraction(0.5, z2);
        if x > 0.0 { 1.0 - 0.5 * q } else { 0.5 * q }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn log_gamma_known_values() {
        assert!((log_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-14);
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-14);
        // ln 9! and ln 99!
        assert!(rel(log_gamma(10.0).unwrap(), 362_880f64.ln()) < 1e-13);
        assert!(rel(log_gamma(100.0).unwrap(), 359.134_205_369_575_4) < 1e-13);
        assert!(rel(log_gamma(3.5).unwrap(), (15.0 * PI.sqrt() / 8.0).ln()) < 1e-13);
    }

    #[test]
    fn log_gamma_matches_factorials_on_range() {
        let mut ln_fact = 0.0f64;
        for k in 1..100u32 {
            // ln Γ(k+1) = ln k!
            ln_fact += (k as f64).ln();
            let lg = log_gamma(k as f64 + 1.0).unwrap();
            assert!((lg - ln_fact).abs() <= 1e-12 * ln_fact.abs().max(1.0), "k={k}");
        }
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain { .. })));
        assert!(matches!(log_gamma(-1.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn duplication_formula() {
        for a in [0.5, 1.0, 2.5, 7.0] {
            let lhs = gamma(a + 0.5).unwrap();
            let rhs = PI.sqrt() * 2f64.powf(1.0 - 2.0 * a) * gamma(2.0 * a).unwrap() / gamma(a).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * lhs, "a={a}");
        }
    }

    #[test]
    fn beta_examples() {
        assert!(rel(beta_fn(0.5, 0.5).unwrap(), PI) < 1e-12);
        assert!(rel(beta_fn(1.0, 1.0).unwrap(), 1.0) < 1e-12);
        assert!(rel(beta_fn(1.5, 1.5).unwrap(), PI / 8.0) < 1e-12);
        assert!(beta_fn(0.0, 1.0).is_err());
        assert!(beta_fn(1.0, -2.0).is_err());
    }

    #[test]
    fn catalan_small() {
        let c: Vec<u64> = (1..=6)
            .map(|n| catalan_trees(n).unwrap().try_into().unwrap())
            .collect();
        assert_eq!(c, vec![1, 2, 12, 120, 1680, 30240]);
        assert!(catalan_trees(0).is_err());
        assert!(catalan_trees(31).is_err());
    }

    #[test]
    fn catalan_convolution_exact() {
        // sum_k C(n,k) C_k C_{n-k} = C_n
        for n in 2..=30u32 {
            let mut acc = BigUint::from(0u32);
            for k in 1..n {
                let mut binom = BigUint::from(1u32);
                for i in 0..k {
                    binom *= n - i;
                }
                for i in 1..=k {
                    binom /= i;
                }
                acc += binom * catalan_trees(k).unwrap() * catalan_trees(n - k).unwrap();
            }
            assert_eq!(acc, catalan_trees(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn catalan_gamma_form() {
        // C_n = 2^{2n-2} Γ(n-1/2)/sqrt(π)
        for n in 1..=30u32 {
            let exact: f64 = catalan_trees(n).unwrap().to_string().parse().unwrap();
            let via_gamma = ((2.0 * n as f64 - 2.0) * 2f64.ln() + log_gamma(n as f64 - 0.5).unwrap()
                - 0.5 * PI.ln())
            .exp();
            assert!(rel(via_gamma, exact) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn incomplete_gamma_values() {
        // P(1, x) = 1 - e^{-x}
        for x in [0.1, 1.0, 3.0, 20.0] {
            assert!((gamma_p(1.0, x).unwrap() - (1.0 - (-x).exp())).abs() < 1e-14);
        }
        // chi-square with 2 dof: Q(1, s/2) = exp(-s/2)
        assert!((gamma_q(1.0, 5.0).unwrap() - (-5.0f64).exp()).abs() < 1e-15);
        // Q(a, x) + P(a, x) = 1
        for (a, x) in [(0.5, 0.3), (5.5, 2.0), (50.0, 60.0)] {
            let s = gamma_p(a, x).unwrap() + gamma_q(a, x).unwrap();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-13);
        assert!((normal_cdf(-1.959_963_984_540_054) - 0.025).abs() < 1e-13);
        assert!((normal_cdf(3.0) - 0.998_650_101_968_369_9).abs() < 1e-13);
    }
}
