//! Rooted ordered binary trees whose leaves carry disjoint blocks of labels.
//!
//! Nodes live in an arena and are never moved, so node ids stay valid
//! across pruning. Each node also stands for the edge to its parent; the
//! root's edge is the root edge. A tree with `n` leaves therefore has
//! `n − 1` internal nodes and `2n − 1` edges once vacant slots are
//! compacted away.

mod code;
mod enumerate;
mod sample;

pub use code::TreeCode;
pub use enumerate::enumerate_all;
pub use sample::{sample_shape, sample_uniform};

use std::fmt::Debug;

use crate::error::{Error, Result};

pub type NodeId = usize;

const NO_POS: usize = usize::MAX;

/// What a leaf carries.
pub trait LeafPayload: Clone + PartialEq + Debug {
    fn singleton(label: u32) -> Self;
    /// Number of labels in the block.
    fn size(&self) -> usize;
    fn merge(parts: Vec<Self>) -> Self;
}

/// A sorted, nonempty set of labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block(Vec<u32>);

impl Block {
    pub fn new(mut labels: Vec<u32>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::domain("Block::new", "blocks are nonempty"));
        }
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("Block::new", "repeated label"));
        }
        Ok(Block(labels))
    }

    pub fn labels(&self) -> &[u32] {
        &self.0
    }

    pub fn min_label(&self) -> u32 {
        self.0[0]
    }
}

impl LeafPayload for Block {
    fn singleton(label: u32) -> Self {
        Block(vec![label])
    }

    fn size(&self) -> usize {
        self.0.len()
    }

    fn merge(parts: Vec<Self>) -> Self {
        let mut all: Vec<u32> = parts.into_iter().flat_map(|b| b.0).collect();
        // concatenated sorted runs; the stable sort merges runs in linear passes
        all.sort();
        Block(all)
    }
}

/// Only the block size is kept. Used where labels are never inspected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockSize(pub u32);

impl LeafPayload for BlockSize {
    fn singleton(_label: u32) -> Self {
        BlockSize(1)
    }

    fn size(&self) -> usize {
        self.0 as usize
    }

    fn merge(parts: Vec<Self>) -> Self {
        BlockSize(parts.iter().map(|p| p.0).sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node<P> {
    Leaf(P),
    Internal { left: NodeId, right: NodeId },
    /// Slot freed by pruning.
    Vacant,
}

/// Result of pruning at an internal node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneOutcome {
    /// The node that now holds the merged block.
    pub leaf: NodeId,
    /// Number of blocks merged.
    pub merged: usize,
    /// How many of those were singletons.
    pub singletons: usize,
}

#[derive(Debug, Clone)]
pub struct BinaryTree<P> {
    nodes: Vec<Node<P>>,
    parent: Vec<Option<NodeId>>,
    root: NodeId,
    leaf_count: usize,
    live_internal: Vec<NodeId>,
    internal_pos: Vec<usize>,
}

/// The tree of the pruning construction: leaves hold label blocks.
pub type LabelledBinaryTree = BinaryTree<Block>;

impl<P: LeafPayload> BinaryTree<P> {
    /// A single leaf.
    pub fn leaf(payload: P) -> Self {
        BinaryTree {
            nodes: vec![Node::Leaf(payload)],
            parent: vec![None],
            root: 0,
            leaf_count: 1,
            live_internal: Vec::new(),
            internal_pos: vec![NO_POS],
        }
    }

    /// The tree with `left` and `right` as the two subtrees of a new root.
    pub fn join(left: &Self, right: &Self) -> Self {
        let mut t = BinaryTree {
            nodes: Vec::with_capacity(1 + left.nodes.len() + right.nodes.len()),
            parent: Vec::new(),
            root: 0,
            leaf_count: 0,
            live_internal: Vec::new(),
            internal_pos: Vec::new(),
        };
        t.push(Node::Vacant, None);
        let l = t.copy_subtree(left, left.root, Some(0));
        let r = t.copy_subtree(right, right.root, Some(0));
        t.nodes[0] = Node::Internal { left: l, right: r };
        t.register_internal(0);
        t
    }

    fn push(&mut self, node: Node<P>, parent: Option<NodeId>) -> NodeId {
        if matches!(node, Node::Leaf(_)) {
            self.leaf_count += 1;
        }
        self.nodes.push(node);
        self.parent.push(parent);
        self.internal_pos.push(NO_POS);
        self.nodes.len() - 1
    }

    fn register_internal(&mut self, v: NodeId) {
        self.internal_pos[v] = self.live_internal.len();
        self.live_internal.push(v);
    }

    fn unregister_internal(&mut self, v: NodeId) {
        let pos = self.internal_pos[v];
        debug_assert_ne!(pos, NO_POS);
        let last = *self.live_internal.last().expect("nonempty");
        self.live_internal.swap_remove(pos);
        if last != v {
            self.internal_pos[last] = pos;
        }
        self.internal_pos[v] = NO_POS;
    }

    /// Copy `src`'s subtree at `v` in preorder; returns the new id of `v`.
    fn copy_subtree(&mut self, src: &Self, v: NodeId, parent: Option<NodeId>) -> NodeId {
        match &src.nodes[v] {
            Node::Leaf(p) => self.push(Node::Leaf(p.clone()), parent),
            Node::Internal { left, right } => {
                let id = self.push(Node::Vacant, parent);
                let l = self.copy_subtree(src, *left, Some(id));
                let r = self.copy_subtree(src, *right, Some(id));
                self.nodes[id] = Node::Internal { left: l, right: r };
                self.register_internal(id);
                id
            }
            Node::Vacant => unreachable!("vacant node reachable from root"),
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, v: NodeId) -> &Node<P> {
        &self.nodes[v]
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    /// Children of an internal node.
    pub fn children(&self, v: NodeId) -> Option<(NodeId, NodeId)> {
        match self.nodes[v] {
            Node::Internal { left, right } => Some((left, right)),
            _ => None,
        }
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        matches!(self.nodes[v], Node::Leaf(_))
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    /// Live internal nodes, in no particular order.
    pub fn live_internal(&self) -> &[NodeId] {
        &self.live_internal
    }

    /// Arena size including vacant slots.
    pub fn arena_len(&self) -> usize {
        self.nodes.len()
    }

    /// Node ids reachable from the root, in preorder.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(2 * self.leaf_count);
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            out.push(v);
            if let Node::Internal { left, right } = self.nodes[v] {
                stack.push(right);
                stack.push(left);
            }
        }
        out
    }

    /// Leaves in left-to-right order with their payloads.
    pub fn leaves(&self) -> Vec<(NodeId, &P)> {
        self.preorder()
            .into_iter()
            .filter_map(|v| match &self.nodes[v] {
                Node::Leaf(p) => Some((v, p)),
                _ => None,
            })
            .collect()
    }

    /// Leaf ids below `v` (inclusive), left to right.
    pub fn leaves_below(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            match self.nodes[u] {
                Node::Leaf(_) => out.push(u),
                Node::Internal { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
                Node::Vacant => unreachable!("vacant node reachable from root"),
            }
        }
        out
    }

    /// Merge every leaf below the internal node `v` into one leaf at `v`.
    pub fn prune_in_place(&mut self, v: NodeId) -> Result<PruneOutcome> {
        if !matches!(self.nodes.get(v), Some(Node::Internal { .. })) {
            return Err(Error::domain("prune_at", format!("node {v} is not internal")));
        }
        let mut parts = Vec::new();
        let mut singletons = 0;
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            match std::mem::replace(&mut self.nodes[u], Node::Vacant) {
                Node::Leaf(p) => {
                    if p.size() == 1 {
                        singletons += 1;
                    }
                    parts.push(p);
                }
                Node::Internal { left, right } => {
                    self.unregister_internal(u);
                    stack.push(right);
                    stack.push(left);
                }
                Node::Vacant => unreachable!("vacant node reachable from root"),
            }
        }
        let merged = parts.len();
        self.nodes[v] = Node::Leaf(P::merge(parts));
        self.leaf_count = self.leaf_count + 1 - merged;
        Ok(PruneOutcome {
            leaf: v,
            merged,
            singletons,
        })
    }

    /// [`prune_in_place`](Self::prune_in_place) on a copy, compacted.
    pub fn prune_at(&self, v: NodeId) -> Result<Self> {
        let mut t = self.clone();
        t.prune_in_place(v)?;
        Ok(t.compact())
    }

    /// Same tree with vacant slots dropped and ids renumbered in preorder.
    pub fn compact(&self) -> Self {
        let mut t = BinaryTree {
            nodes: Vec::with_capacity(2 * self.leaf_count),
            parent: Vec::with_capacity(2 * self.leaf_count),
            root: 0,
            leaf_count: 0,
            live_internal: Vec::with_capacity(self.leaf_count),
            internal_pos: Vec::with_capacity(2 * self.leaf_count),
        };
        t.copy_subtree(self, self.root, None);
        t
    }

    /// Replace every leaf payload through `f`, keeping the shape.
    pub fn map_leaves<Q: LeafPayload>(&self, mut f: impl FnMut(&P) -> Q) -> BinaryTree<Q> {
        BinaryTree {
            nodes: self
                .nodes
                .iter()
                .map(|n| match n {
                    Node::Leaf(p) => Node::Leaf(f(p)),
                    Node::Internal { left, right } => Node::Internal {
                        left: *left,
                        right: *right,
                    },
                    Node::Vacant => Node::Vacant,
                })
                .collect(),
            parent: self.parent.clone(),
            root: self.root,
            leaf_count: self.leaf_count,
            live_internal: self.live_internal.clone(),
            internal_pos: self.internal_pos.clone(),
        }
    }

    /// Structural equality that ignores arena layout.
    pub fn same_tree(&self, other: &Self) -> bool {
        let (a, b) = (self.preorder(), other.preorder());
        a.len() == b.len()
            && a.iter().zip(&b).all(|(&x, &y)| match (&self.nodes[x], &other.nodes[y]) {
                (Node::Leaf(p), Node::Leaf(q)) => p == q,
                (Node::Internal { .. }, Node::Internal { .. }) => true,
                _ => false,
            })
    }

    /// Check every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invariant(m));
        if self.parent[self.root].is_some() {
            return bad("root has a parent".into());
        }
        let order = self.preorder();
        let mut leaves = 0;
        let mut internal = 0;
        for &v in &order {
            match &self.nodes[v] {
                Node::Leaf(p) => {
                    leaves += 1;
                    if p.size() == 0 {
                        return bad(format!("empty block at {v}"));
                    }
                }
                Node::Internal { left, right } => {
                    internal += 1;
                    if self.parent[*left] != Some(v) || self.parent[*right] != Some(v) {
                        return bad(format!("parent links broken below {v}"));
                    }
                    if self.internal_pos[v] == NO_POS || self.live_internal[self.internal_pos[v]] != v {
                        return bad(format!("internal node {v} not indexed"));
                    }
                }
                Node::Vacant => return bad(format!("vacant node {v} reachable")),
            }
        }
        if leaves != self.leaf_count || internal + 1 != leaves || internal != self.live_internal.len() {
            return bad(format!(
                "counts: {leaves} leaves (recorded {}), {internal} internal, {} indexed",
                self.leaf_count,
                self.live_internal.len()
            ));
        }
        Ok(())
    }
}

impl LabelledBinaryTree {
    /// Blocks of the leaves below the internal node `v`, ordered by their
    /// smallest label.
    pub fn subtree_leaves(&self, v: NodeId) -> Result<Vec<Block>> {
        if !matches!(self.nodes.get(v), Some(Node::Internal { .. })) {
            return Err(Error::domain("subtree_leaves", format!("node {v} is not internal")));
        }
        let mut blocks: Vec<Block> = self
            .leaves_below(v)
            .into_iter()
            .map(|u| match &self.nodes[u] {
                Node::Leaf(b) => b.clone(),
                _ => unreachable!(),
            })
            .collect();
        blocks.sort();
        Ok(blocks)
    }

    /// Current partition, blocks ordered by smallest label.
    pub fn blocks(&self) -> Vec<Block> {
        let mut b: Vec<Block> = self.leaves().into_iter().map(|(_, b)| b.clone()).collect();
        b.sort();
        b
    }

    /// Rename each block to its smallest label, then rank those to 1..=k.
    /// Trees with `k` leaves then fall into exactly `C_k` classes.
    pub fn canonical_relabel(&self) -> LabelledBinaryTree {
        let mut mins: Vec<u32> = self.leaves().iter().map(|(_, b)| b.min_label()).collect();
        mins.sort_unstable();
        self.compact().map_leaves(|b| {
            let rank = mins.binary_search(&b.min_label()).expect("minimum present");
            Block::singleton(rank as u32 + 1)
        })
    }

    /// Check the label blocks are disjoint and cover `1..=n`.
    pub fn validate_cover(&self, n: u32) -> Result<()> {
        self.validate()?;
        let mut seen = vec![false; n as usize + 1];
        for (_, b) in self.leaves() {
            for &l in b.labels() {
                if l == 0 || l > n || std::mem::replace(&mut seen[l as usize], true) {
                    return Err(Error::Invariant(format!("label {l} repeated or out of range")));
                }
            }
        }
        if seen.iter().skip(1).any(|s| !s) {
            return Err(Error::Invariant("labels do not cover 1..=n".into()));
        }
        Ok(())
    }
}

impl<P: LeafPayload> PartialEq for BinaryTree<P> {
    fn eq(&self, other: &Self) -> bool {
        self.same_tree(other)
    }
}
