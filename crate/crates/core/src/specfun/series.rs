//! Truncated power series in one variable, used to expand the generating
//! functions to high order where contour inversion loses accuracy.
//!
//! Every series has the same length `m`; coefficients beyond it are dropped.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Series(pub Vec<f64>);

impl Series {
    pub fn constant(c: f64, m: usize) -> Self {
        let mut v = vec![0.0; m];
        if m > 0 {
            v[0] = c;
        }
        Series(v)
    }

    /// The monomial `x^k`.
    pub fn monomial(k: usize, m: usize) -> Self {
        let mut v = vec![0.0; m];
        if k < m {
            v[k] = 1.0;
        }
        Series(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn add(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: f64) -> Series {
        Series(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Series) -> Series {
        let m = self.len();
        let mut out = vec![0.0; m];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in o.0.iter().take(m - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Series(out)
    }

    /// `self / o`; needs `o[0] ≠ 0`.
    pub fn div(&self, o: &Series) -> Result<Series> {
        let m = self.len();
        let d0 = o.0[0];
        if d0 == 0.0 {
            return Err(Error::domain("Series::div", "divisor has zero constant term"));
        }
        let mut q = vec![0.0; m];
        for k in 0..m {
            let mut s = self.0[k];
            for j in 1..=k {
                s -= o.0[j] * q[k - j];
            }
            q[k] = s / d0;
        }
        Ok(Series(q))
    }

    /// Formal derivative, padded with a trailing zero to keep the length.
    fn derivative(&self) -> Series {
        let m = self.len();
        let mut out = vec![0.0; m];
        for k in 1..m {
            out[k - 1] = k as f64 * self.0[k];
        }
        Series(out)
    }

    /// Principal square root; needs `self[0] > 0`.
    pub fn sqrt(&self) -> Result<Series> {
        let m = self.len();
        let a0 = self.0[0];
        if !(a0 > 0.0) {
            return Err(Error::domain("Series::sqrt", "constant term must be positive"));
        }
        let mut r = vec![0.0; m];
        r[0] = a0.sqrt();
        for k in 1..m {
            let mut s = self.0[k];
            for j in 1..k {
                s -= r[j] * r[k - j];
            }
            r[k] = s / (2.0 * r[0]);
        }
        Ok(Series(r))
    }

    /// Principal logarithm; needs `self[0] > 0`.
    pub fn ln(&self) -> Result<Series> {
        let m = self.len();
        let a0 = self.0[0];
        if !(a0 > 0.0) {
            return Err(Error::domain("Series::ln", "constant term must be positive"));
        }
        // (log f)' = f'/f
        let q = self.derivative().div(self)?;
        let mut out = vec![0.0; m];
        out[0] = a0.ln();
        for k in 1..m {
            out[k] = q.0[k - 1] / k as f64;
        }
        Ok(Series(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(s: &Series, expect: &[f64], tol: f64) {
        for (k, (a, b)) in s.0.iter().zip(expect).enumerate() {
            assert!((a - b).abs() < tol, "coefficient {k}: {a} vs {b}");
        }
    }

    #[test]
    fn geometric_series() {
        let m = 20;
        let one_minus_x = Series::constant(1.0, m).sub(&Series::monomial(1, m));
        let g = Series::constant(1.0, m).div(&one_minus_x).unwrap();
        assert_close(&g, &[1.0; 20], 1e-15);
        assert_close(&g.mul(&one_minus_x), &Series::constant(1.0, m).0, 1e-15);
    }

    #[test]
    fn log_one_plus_x() {
        let m = 30;
        let f = Series::constant(1.0, m).add(&Series::monomial(1, m));
        let l = f.ln().unwrap();
        let expect: Vec<f64> = (0..m)
            .map(|k| if k == 0 { 0.0 } else { (-1f64).powi(k as i32 + 1) / k as f64 })
            .collect();
        assert_close(&l, &expect, 1e-14);
    }

    #[test]
    fn sqrt_one_minus_x() {
        let m = 40;
        let f = Series::constant(1.0, m).sub(&Series::monomial(1, m));
        let s = f.sqrt().unwrap();
        // c_k = c_{k−1}·(k − 3/2)/k
        let mut expect = vec![1.0];
        for k in 1..m {
            let prev = expect[k - 1];
            expect.push(prev * (k as f64 - 1.5) / k as f64);
        }
        assert_close(&s, &expect, 1e-15);
        assert_close(&s.mul(&s), &f.0, 1e-14);
    }

    #[test]
    fn rejects_bad_constant_terms() {
        let z = Series::monomial(1, 5);
        assert!(z.ln().is_err());
        assert!(z.sqrt().is_err());
        assert!(Series::constant(1.0, 5).div(&z).is_err());
    }
}
