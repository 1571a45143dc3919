//! Goodness-of-fit statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gamma_q;

/// Chi-square significance level of every gate.
pub const SIGNIFICANCE: f64 = 1e-3;
/// Minimum expected count per cell; smaller cells are pooled.
pub const MIN_EXPECTED: f64 = 5.0;
pub const MIN_KS_SAMPLES: usize = 100;

/// Sup distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::domain(
            "ks_statistic",
            format!("need at least {MIN_KS_SAMPLES} samples, got {}", samples.len()),
        ));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("ks_statistic", "NaN sample"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // ties form one jump of the empirical CDF
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(d)
}

/// Rayleigh CDF 1 − e^{−x²/2}.
pub fn rayleigh_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-0.5 * x * x).exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: u32,
    pub p_value: f64,
    /// Cells left after pooling.
    pub cells: u32,
}

impl ChiSquare {
    pub fn passes(&self) -> bool {
        self.p_value > SIGNIFICANCE
    }
}

fn survival(statistic: f64, dof: u32) -> Result<f64> {
    if dof == 0 {
        return Ok(1.0);
    }
    gamma_q(0.5 * dof as f64, 0.5 * statistic)
}

/// Groups of cell indices, each with total `weight` at least `min`, formed
/// by sweeping cells in order of increasing weight and merging the smallest
/// into a running group. The last short group joins the previous one.
fn pool_cells(weight: &[f64], min: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..weight.len()).collect();
    order.sort_by(|&a, &b| weight[a].total_cmp(&weight[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    let mut acc = 0.0;
    for i in order {
        if weight[i] >= min && current.is_empty() {
            groups.push(vec![i]);
            continue;
        }
        current.push(i);
        acc += weight[i];
        if acc >= min {
            groups.push(std::mem::take(&mut current));
            acc = 0.0;
        }
    }
    if !current.is_empty() {
        match groups.last_mut() {
            Some(g) => g.extend(current),
            None => groups.push(current),
        }
    }
    groups
}

/// Pearson goodness of fit of `observed` counts to `expected`
/// probabilities (normalized here), pooling cells with expected count below
/// [`MIN_EXPECTED`].
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<ChiSquare> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::domain("chi_square", "observed and expected differ in length or are empty"));
    }
    if expected.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
        return Err(Error::domain("chi_square", "expected probabilities must be finite and nonnegative"));
    }
    if let Some(i) = (0..observed.len()).find(|&i| expected[i] == 0.0 && observed[i] > 0) {
        return Err(Error::domain("chi_square", format!("cell {i} is observed but has zero expected mass")));
    }
    let mass: f64 = expected.iter().sum();
    let total: u64 = observed.iter().sum();
    if !(mass > 0.0) || total == 0 {
        return Err(Error::domain("chi_square", "no mass"));
    }
    let exp_counts: Vec<f64> = expected.iter().map(|p| p / mass * total as f64).collect();
    let support: Vec<usize> = (0..exp_counts.len()).filter(|&i| exp_counts[i] > 0.0).collect();
    let weights: Vec<f64> = support.iter().map(|&i| exp_counts[i]).collect();
    let groups = pool_cells(&weights, MIN_EXPECTED);
    let mut statistic = 0.0;
    for g in &groups {
        let e: f64 = g.iter().map(|&j| weights[j]).sum();
        let o: u64 = g.iter().map(|&j| observed[support[j]]).sum();
        statistic += (o as f64 - e).powi(2) / e;
    }
    let dof = groups.len() as u32 - 1;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: survival(statistic, dof)?,
        cells: groups.len() as u32,
    })
}

/// Two-sample homogeneity test on a shared set of cells, pooling cells
/// whose smaller expected count falls below [`MIN_EXPECTED`].
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> Result<ChiSquare> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::domain("chi_square_homogeneity", "tables differ in length or are empty"));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::domain("chi_square_homogeneity", "empty sample"));
    }
    let n = na + nb;
    let support: Vec<usize> = (0..a.len()).filter(|&i| a[i] + b[i] > 0).collect();
    // expected count of the smaller sample in each cell
    let weights: Vec<f64> = support
        .iter()
        .map(|&i| (a[i] + b[i]) as f64 * na.min(nb) / n)
        .collect();
    let groups = pool_cells(&weights, MIN_EXPECTED);
    let mut statistic = 0.0;
    for g in &groups {
        let oa: u64 = g.iter().map(|&j| a[support[j]]).sum();
        let ob: u64 = g.iter().map(|&j| b[support[j]]).sum();
        let col = (oa + ob) as f64;
        let (ea, eb) = (col * na / n, col * nb / n);
        statistic += (oa as f64 - ea).powi(2) / ea + (ob as f64 - eb).powi(2) / eb;
    }
    let dof = groups.len() as u32 - 1;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: survival(statistic, dof)?,
        cells: groups.len() as u32,
    })
}

/// Outcome of a chi-square gate under the retry rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryOutcome {
    /// One entry per attempt made.
    pub attempts: Vec<ChiSquare>,
    pub pass: bool,
}

impl RetryOutcome {
    /// The p-value that decided the gate: the first attempt's if it passed,
    /// otherwise the median of the three.
    pub fn p_value(&self) -> f64 {
        if self.attempts.len() == 1 {
            return self.attempts[0].p_value;
        }
        let mut p: Vec<f64> = self.attempts.iter().map(|c| c.p_value).collect();
        p.sort_by(f64::total_cmp);
        p[p.len() / 2]
    }
}

/// Attempt 0 runs on `seed`. If it fails, attempts 1 and 2 run on seeds
/// derived from `seed`, and the gate fails iff at least two of the three
/// attempts fail.
pub fn with_retries(seed: u64, mut attempt: impl FnMut(u64) -> Result<ChiSquare>) -> Result<RetryOutcome> {
    let first = attempt(seed)?;
    if first.passes() {
        return Ok(RetryOutcome {
            attempts: vec![first],
            pass: true,
        });
    }
    let mut attempts = vec![first];
    for k in 1..3u64 {
        attempts.push(attempt(super::rng::derive_seed(seed, u64::MAX - k))?);
    }
    let failures = attempts.iter().filter(|c| !c.passes()).count();
    Ok(RetryOutcome {
        pass: failures < 2,
        attempts,
    })
}

/// Mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Proportion with its binomial standard error.
pub fn proportion(hits: u64, total: u64) -> (f64, f64) {
    let p = hits as f64 / total as f64;
    (p, (p * (1.0 - p) / total as f64).sqrt())
}
