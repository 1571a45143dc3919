//! A generic Λ-coalescent jump chain driven only by the rate table.
//!
//! Nothing here refers to trees, so comparing this chain with the pruning
//! chain pits two independent mechanisms against each other.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::{CoalescenceEvent, EventLog};
use crate::specfun::{binomial, ln_beta, ln_binomial, rate_bk_general, LambdaMeasure};
use crate::treecore::{Block, LeafPayload};

pub const MAX_CLOSED_FORM: u32 = 10_000;
pub const MAX_QUADRATURE: u32 = 200;

/// Merger rates λ_{b,k} for `2 ≤ k ≤ b ≤ n_max`, with per-row totals and
/// cumulative merger-size probabilities. Memory is about `8·n_max²` bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RateTable {
    pub measure: LambdaMeasure,
    pub n_max: u32,
    /// `lambda_nk[b][k]`; unused slots are 0.
    lambda_nk: Vec<Vec<f64>>,
    /// λ_b = Σ_k C(b,k) λ_{b,k}.
    lambda_b: Vec<f64>,
    /// `cumulative[b][k]` = P(merger size ≤ k) from `b` blocks.
    cumulative: Vec<Vec<f64>>,
}

impl RateTable {
    /// Closed forms for Kingman, Uniform and β(3/2,1/2); quadrature otherwise.
    pub fn build(measure: LambdaMeasure, n_max: u32) -> Result<Self> {
        let closed = measure.is_pruning() || matches!(measure, LambdaMeasure::Kingman | LambdaMeasure::Uniform);
        Self::build_inner(measure, n_max, closed)
    }

    /// Every entry by quadrature of the defining integral.
    pub fn build_by_quadrature(measure: LambdaMeasure, n_max: u32) -> Result<Self> {
        Self::build_inner(measure, n_max, false)
    }

    fn build_inner(measure: LambdaMeasure, n_max: u32, closed: bool) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::domain("build_table", "need n_max ≥ 2"));
        }
        let cap = if closed { MAX_CLOSED_FORM } else { MAX_QUADRATURE };
        if n_max > cap {
            return Err(Error::Refused(format!("rate table for {measure} limited to n_max ≤ {cap}")));
        }
        let size = n_max as usize + 1;
        let mut lambda_nk = vec![Vec::new(); size];
        let mut lambda_b = vec![0.0; size];
        let mut cumulative = vec![Vec::new(); size];
        for b in 2..=n_max {
            let mut rates = vec![0.0; b as usize + 1];
            // C(b,k)λ_{b,k}, in log space where the closed form allows it
            let mut weights = vec![0.0; b as usize + 1];
            for k in 2..=b {
                let (r, w) = match measure {
                    _ if !closed => {
                        let r = rate_bk_general(measure, b, k)?;
                        (r, r * binomial(b as u64, k as u64))
                    }
                    LambdaMeasure::Kingman => {
                        let r = if k == 2 { 1.0 } else { 0.0 };
                        (r, r * binomial(b as u64, 2))
                    }
                    LambdaMeasure::Uniform => {
                        let lb = ln_beta((k - 1) as f64, (b - k + 1) as f64)?;
                        (lb.exp(), (lb + ln_binomial(b as u64, k as u64)).exp())
                    }
                    _ if measure.is_pruning() => {
                        let lb = ln_beta(k as f64 - 0.5, (b - k) as f64 + 0.5)?;
                        (lb.exp(), (lb + ln_binomial(b as u64, k as u64)).exp())
                    }
                    _ => {
                        let r = rate_bk_general(measure, b, k)?;
                        (r, r * binomial(b as u64, k as u64))
                    }
                };
                rates[k as usize] = r;
                weights[k as usize] = w;
            }
            let total: f64 = weights.iter().sum();
            if !(total > 0.0) {
                return Err(Error::Invariant(format!("row {b} has no mass")));
            }
            let mut acc = 0.0;
            let cum: Vec<f64> = weights
                .iter()
                .map(|w| {
                    acc += w;
                    acc / total
                })
                .collect();
            lambda_nk[b as usize] = rates;
            lambda_b[b as usize] = total;
            cumulative[b as usize] = cum;
        }
        Ok(RateTable {
            measure,
            n_max,
            lambda_nk,
            lambda_b,
            cumulative,
        })
    }

    pub fn rate(&self, b: u32, k: u32) -> f64 {
        self.lambda_nk[b as usize][k as usize]
    }

    pub fn total(&self, b: u32) -> f64 {
        self.lambda_b[b as usize]
    }

    /// P(k blocks merge | b blocks) = C(b,k)λ_{b,k}/λ_b.
    pub fn merger_probability(&self, b: u32, k: u32) -> f64 {
        let c = &self.cumulative[b as usize];
        c[k as usize] - c[k as usize - 1]
    }

    /// Draw a merger size from `b` blocks by binary search.
    pub fn sample_merger_size<R: Rng + ?Sized>(&self, b: u32, rng: &mut R) -> u32 {
        let c = &self.cumulative[b as usize];
        let u: f64 = rng.random();
        // first k with cumulative > u; the last entry is 1 up to rounding
        let k = c.partition_point(|&p| p <= u);
        k.clamp(2, b as usize) as u32
    }
}

/// Stepper over the partition, exposing which blocks merged.
#[derive(Debug, Clone)]
pub struct LambdaChain<'a> {
    table: &'a RateTable,
    blocks: Vec<Block>,
    time: f64,
    steps: u32,
    timed: bool,
}

/// One event together with the merged blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaStep {
    pub event: CoalescenceEvent,
    /// The blocks that merged, each as it was before the event.
    pub parts: Vec<Block>,
}

impl<'a> LambdaChain<'a> {
    pub fn new(n: u32, table: &'a RateTable, timed: bool) -> Result<Self> {
        if n < 1 || n > table.n_max {
            return Err(Error::domain(
                "run_lambda_chain",
                format!("n={n} outside 1..={}", table.n_max),
            ));
        }
        Ok(LambdaChain {
            table,
            blocks: (1..=n).map(Block::singleton).collect(),
            time: 0.0,
            steps: 0,
            timed,
        })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<LambdaStep> {
        let b = self.blocks.len() as u32;
        if b < 2 {
            return None;
        }
        self.steps += 1;
        self.time = if self.timed {
            let e: f64 = Exp1.sample(rng);
            self.time + e / self.table.total(b)
        } else {
            self.steps as f64
        };
        let k = self.table.sample_merger_size(b, rng) as usize;
        // partial Fisher–Yates: a uniform k-subset ends up in the first k slots
        for i in 0..k {
            let j = rng.random_range(i..b as usize);
            self.blocks.swap(i, j);
        }
        let parts: Vec<Block> = self.blocks.drain(..k).collect();
        let singletons = parts.iter().filter(|p| p.size() == 1).count() as u32;
        self.blocks.push(Block::merge(parts.clone()));
        Some(LambdaStep {
            event: CoalescenceEvent {
                time: self.time,
                merged: k as u32,
                singletons,
                tree_code: None,
            },
            parts,
        })
    }
}

/// Run from the trivial partition of `1..=n` to absorption.
pub fn run_lambda_chain<R: Rng + ?Sized>(n: u32, table: &RateTable, rng: &mut R, timed: bool) -> Result<EventLog> {
    let mut chain = LambdaChain::new(n, table, timed)?;
    let events = std::iter::from_fn(|| chain.step(rng).map(|s| s.event)).collect();
    Ok(EventLog { n, seed: 0, events })
}

/// First two merger sizes (0 when the chain is absorbed earlier).
pub fn first_two_mergers<R: Rng + ?Sized>(n: u32, table: &RateTable, rng: &mut R) -> Result<(u32, u32)> {
    let mut chain = LambdaChain::new(n, table, false)?;
    let a = chain.step(rng).map_or(0, |s| s.event.merged);
    let b = chain.step(rng).map_or(0, |s| s.event.merged);
    Ok((a, b))
}
