use super::{Block, LabelledBinaryTree, LeafPayload};
use crate::error::{Error, Result};

pub const MAX_ENUMERATE: usize = 6;

/// Every ordered binary tree with leaves labelled `1..=n`, `n ≤ 6`.
pub fn enumerate_all(n: usize) -> Result<Vec<LabelledBinaryTree>> {
    if n == 0 {
        return Err(Error::domain("enumerate_all", "need n ≥ 1"));
    }
    if n > MAX_ENUMERATE {
        return Err(Error::Refused(format!(
            "enumerate_all({n}): more than {MAX_ENUMERATE} leaves blows up combinatorially"
        )));
    }
    let labels: Vec<u32> = (1..=n as u32).collect();
    Ok(trees_on(&labels))
}

fn trees_on(labels: &[u32]) -> Vec<LabelledBinaryTree> {
    if labels.len() == 1 {
        return vec![LabelledBinaryTree::leaf(Block::singleton(labels[0]))];
    }
    let m = labels.len();
    let mut out = Vec::new();
    // each nonempty proper subset goes left, its complement right
    for mask in 1..(1u32 << m) - 1 {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            if mask >> i & 1 == 1 {
                left.push(l);
            } else {
                right.push(l);
            }
        }
        let ls = trees_on(&left);
        let rs = trees_on(&right);
        for l in &ls {
            for r in &rs {
                out.push(LabelledBinaryTree::join(l, r));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::catalan_trees;
    use crate::treecore::TreeCode;
    use std::collections::HashSet;

    #[test]
    fn counts_match_closed_form() {
        for n in 1..=6 {
            let all = enumerate_all(n).unwrap();
            assert_eq!(num_bigint::BigUint::from(all.len()), catalan_trees(n as u32).unwrap());
            let codes: HashSet<TreeCode> = all.iter().map(TreeCode::encode).collect();
            assert_eq!(codes.len(), all.len());
        }
        assert_eq!(enumerate_all(2).unwrap().len(), 2);
        assert_eq!(enumerate_all(3).unwrap().len(), 12);
        assert!(matches!(enumerate_all(7), Err(Error::Refused(_))));
        assert!(enumerate_all(0).is_err());
    }
}
