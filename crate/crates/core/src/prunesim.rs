//! The pruning coalescent: start from a uniform ordered binary tree with
//! `n` labelled leaves, repeatedly pick a uniform internal vertex, merge
//! the blocks below it and cut its subtree back to a single leaf.
//!
//! The block partition read off the leaves is a β(3/2,1/2)-coalescent.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::events::{CoalescenceEvent, EventLog};
use crate::specfun::rate_total;
use crate::treecore::{sample_shape, BinaryTree, Block, BlockSize, LabelledBinaryTree, LeafPayload, TreeCode};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChainOptions {
    /// Draw Exp(λ_k) waiting times; otherwise events sit at times 1, 2, ….
    pub timed: bool,
    /// Store the tree code after each event. Needs label tracking.
    pub record_trees: bool,
}

/// A pruning chain that can be advanced one event at a time.
#[derive(Debug, Clone)]
pub struct PruneChain<P: LeafPayload> {
    tree: BinaryTree<P>,
    time: f64,
    timed: bool,
}

impl<P: LeafPayload> PruneChain<P> {
    pub fn new<R: Rng + ?Sized>(n: usize, timed: bool, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("run_chain", format!("need n ≥ 2, got {n}")));
        }
        Ok(PruneChain {
            tree: sample_shape(n, rng)?,
            time: 0.0,
            timed,
        })
    }

    pub fn from_tree(tree: BinaryTree<P>, timed: bool) -> Self {
        PruneChain { tree, time: 0.0, timed }
    }

    pub fn tree(&self) -> &BinaryTree<P> {
        &self.tree
    }

    pub fn is_absorbed(&self) -> bool {
        self.tree.leaf_count() == 1
    }

    /// Advance by one event; `None` once a single block is left.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<CoalescenceEvent> {
        let k = self.tree.leaf_count();
        if k == 1 {
            return None;
        }
        self.time += if self.timed {
            let rate = rate_total(k as u32).expect("k ≥ 2");
            let e: f64 = Exp1.sample(rng);
            e / rate
        } else {
            1.0
        };
        let live = self.tree.live_internal();
        let v = live[rng.random_range(0..live.len())];
        let out = self.tree.prune_in_place(v).expect("live internal node");
        Some(CoalescenceEvent {
            time: self.time,
            merged: out.merged as u32,
            singletons: out.singletons as u32,
            tree_code: None,
        })
    }
}

impl PruneChain<Block> {
    /// Current partition of `1..=n`.
    pub fn partition(&self) -> Vec<Block> {
        self.tree.blocks()
    }
}

/// Run the chain to absorption and return its log (with `seed` 0; callers
/// that derive the generator from a seed record it).
pub fn run_chain<R: Rng + ?Sized>(n: usize, rng: &mut R, opts: ChainOptions) -> Result<EventLog> {
    let events = if opts.record_trees {
        let mut chain = PruneChain::<Block>::new(n, opts.timed, rng)?;
        let mut events = Vec::with_capacity(n);
        while let Some(mut e) = chain.step(rng) {
            e.tree_code = Some(TreeCode::encode(chain.tree()));
            events.push(e);
        }
        events
    } else {
        // labels are never inspected: sizes suffice for k and singletons
        let mut chain = PruneChain::<BlockSize>::new(n, opts.timed, rng)?;
        std::iter::from_fn(|| chain.step(rng)).collect()
    };
    Ok(EventLog {
        n: n as u32,
        seed: 0,
        events,
    })
}

/// X'_n.
pub fn collision_count(log: &EventLog) -> usize {
    log.collision_count()
}

/// (B_n, E_n).
pub fn last_event_stats(log: &EventLog) -> Result<(u32, u32)> {
    log.last_event_stats()
}

/// Outcome of a single pruning step from a fresh uniform tree.
#[derive(Debug, Clone)]
pub struct FirstMerger {
    /// Number of blocks merged.
    pub merged: usize,
    /// Leaves left afterwards.
    pub remaining: usize,
    /// The post-merger tree with blocks renamed canonically to `1..=remaining`.
    pub tree: LabelledBinaryTree,
}

pub fn first_merger_snapshot<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<FirstMerger> {
    if n < 3 {
        return Err(Error::domain("first_merger_snapshot", format!("need n ≥ 3, got {n}")));
    }
    let mut chain = PruneChain::<Block>::new(n, false, rng)?;
    let e = chain.step(rng).expect("n ≥ 3 leaves");
    Ok(FirstMerger {
        merged: e.merged as usize,
        remaining: chain.tree().leaf_count(),
        tree: chain.tree().canonical_relabel(),
    })
}

/// The first two merger sizes of a run (the second is 0 when absorbed
/// after one event).
pub fn first_two_mergers<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(u32, u32)> {
    let mut chain = PruneChain::<BlockSize>::new(n, false, rng)?;
    let a = chain.step(rng).map_or(0, |e| e.merged);
    let b = chain.step(rng).map_or(0, |e| e.merged);
    Ok((a, b))
}
