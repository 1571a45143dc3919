//! Uniform sampling by leaf insertion.
//!
//! With `k` leaves there are `2k − 1` nodes. Choosing one uniformly,
//! subdividing the edge above it and hanging leaf `k+1` on a uniform side
//! reaches every tree with `k+1` leaves from exactly one predecessor, and
//! `C_k · 2(2k − 1) = C_{k+1}`, so the law stays uniform at every step.

use rand::Rng;

use super::{BinaryTree, Block, LabelledBinaryTree, LeafPayload, Node, NO_POS};
use crate::error::{Error, Result};

/// Uniform ordered binary tree with leaves labelled `1..=n`.
pub fn sample_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<LabelledBinaryTree> {
    sample_shape::<Block, R>(n, rng)
}

/// As [`sample_uniform`] with any payload built from the labels.
pub fn sample_shape<P: LeafPayload, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BinaryTree<P>> {
    if n == 0 {
        return Err(Error::domain("sample_uniform", "need n ≥ 1"));
    }
    let cap = 2 * n - 1;
    let mut nodes: Vec<Node<P>> = Vec::with_capacity(cap);
    let mut parent: Vec<Option<usize>> = Vec::with_capacity(cap);
    nodes.push(Node::Leaf(P::singleton(1)));
    parent.push(None);
    let mut root = 0;
    for label in 2..=n as u32 {
        let live = nodes.len();
        // one draw covers both the node and the side
        let draw = rng.random_range(0..2 * live);
        let (x, new_on_left) = (draw >> 1, draw & 1 == 1);
        let p = live;
        let leaf = live + 1;
        let up = parent[x];
        let (l, r) = if new_on_left { (leaf, x) } else { (x, leaf) };
        nodes.push(Node::Internal { left: l, right: r });
        parent.push(up);
        nodes.push(Node::Leaf(P::singleton(label)));
        parent.push(Some(p));
        parent[x] = Some(p);
        match up {
            None => root = p,
            Some(g) => {
                if let Node::Internal { left, right } = &mut nodes[g] {
                    if *left == x {
                        *left = p;
                    } else {
                        *right = p;
                    }
                }
            }
        }
    }
    let mut live_internal = Vec::with_capacity(n - 1);
    let mut internal_pos = vec![NO_POS; nodes.len()];
    for (v, node) in nodes.iter().enumerate() {
        if matches!(node, Node::Internal { .. }) {
            internal_pos[v] = live_internal.len();
            live_internal.push(v);
        }
    }
    Ok(BinaryTree {
        nodes,
        parent,
        root,
        leaf_count: n,
        live_internal,
        internal_pos,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treecore::{BlockSize, TreeCode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = sample_uniform(1, &mut rng).unwrap();
        assert_eq!(TreeCode::encode(&t).as_str(), "1");
        assert!(sample_uniform(0, &mut rng).is_err());
    }

    #[test]
    fn valid_for_many_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..60 {
            let t = sample_uniform(n, &mut rng).unwrap();
            t.validate_cover(n as u32).unwrap();
            assert_eq!(t.arena_len(), 2 * n - 1);
            let s: BinaryTree<BlockSize> = sample_shape(n, &mut rng).unwrap();
            s.validate().unwrap();
        }
    }

    #[test]
    fn two_leaf_orders_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let left_one = (0..draws)
            .filter(|_| TreeCode::encode(&sample_uniform(2, &mut rng).unwrap()).as_str() == "(1,2)")
            .count();
        assert!((left_one as f64 / draws as f64 - 0.5).abs() < 0.005);
    }
}
