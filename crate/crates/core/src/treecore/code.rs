//! Canonical string form of a labelled tree.
//!
//! Grammar: `tree := block | '(' tree ',' tree ')'`, `block := label ('+' label)*`
//! with labels in increasing order, e.g. `((1,2),3)` or `(1+2,3)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Block, LabelledBinaryTree, Node};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TreeCode(String);

impl TreeCode {
    pub fn encode(tree: &LabelledBinaryTree) -> TreeCode {
        let mut out = String::with_capacity(4 * tree.leaf_count());
        write_node(tree, tree.root(), &mut out);
        TreeCode(out)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn decode(&self) -> Result<LabelledBinaryTree> {
        let bytes = self.0.as_bytes();
        let mut pos = 0;
        let t = parse_tree(bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(Error::Parse(format!("trailing input at byte {pos} in `{}`", self.0)));
        }
        t.validate()?;
        let mut labels: Vec<u32> = t.leaves().iter().flat_map(|(_, b)| b.labels().to_vec()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse(format!("label repeated in `{}`", self.0)));
        }
        Ok(t)
    }
}

fn write_node(tree: &LabelledBinaryTree, v: usize, out: &mut String) {
    use std::fmt::Write;
    match tree.node(v) {
        Node::Leaf(b) => {
            for (i, l) in b.labels().iter().enumerate() {
                if i > 0 {
                    out.push('+');
                }
                write!(out, "{l}").expect("writing to a String");
            }
        }
        Node::Internal { left, right } => {
            out.push('(');
            write_node(tree, *left, out);
            out.push(',');
            write_node(tree, *right, out);
            out.push(')');
        }
        Node::Vacant => unreachable!("vacant node reachable from root"),
    }
}

fn expect(bytes: &[u8], pos: &mut usize, c: u8) -> Result<()> {
    if bytes.get(*pos) == Some(&c) {
        *pos += 1;
        Ok(())
    } else {
        Err(Error::Parse(format!("expected `{}` at byte {}", c as char, *pos)))
    }
}

fn parse_label(bytes: &[u8], pos: &mut usize) -> Result<u32> {
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| b.is_ascii_digit()) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .expect("ascii digits")
        .parse()
        .map_err(|_| Error::Parse(format!("expected a label at byte {start}")))
}

fn parse_tree(bytes: &[u8], pos: &mut usize) -> Result<LabelledBinaryTree> {
    if bytes.get(*pos) == Some(&b'(') {
        *pos += 1;
        let l = parse_tree(bytes, pos)?;
        expect(bytes, pos, b',')?;
        let r = parse_tree(bytes, pos)?;
        expect(bytes, pos, b')')?;
        return Ok(LabelledBinaryTree::join(&l, &r));
    }
    let mut labels = vec![parse_label(bytes, pos)?];
    while bytes.get(*pos) == Some(&b'+') {
        *pos += 1;
        labels.push(parse_label(bytes, pos)?);
    }
    if labels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse("block labels must be strictly increasing".into()));
    }
    Ok(LabelledBinaryTree::leaf(Block::new(labels)?))
}

impl FromStr for TreeCode {
    type Err = Error;

    /// Parses and re-encodes, so the stored string is canonical.
    fn from_str(s: &str) -> Result<Self> {
        let t = TreeCode(s.to_string()).decode()?;
        Ok(TreeCode::encode(&t))
    }
}

impl fmt::Display for TreeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for s in ["1", "(1,2)", "((1,2),3)", "(2,(3,1))", "(1+2,3)", "((4,1+3),(2,5))"] {
            let c: TreeCode = s.parse().unwrap();
            assert_eq!(c.as_str(), s);
            assert_eq!(TreeCode::encode(&c.decode().unwrap()), c);
        }
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "(", "(1,2", "(1,,2)", "(1,2)x", "(1,1)", "2+1", "(a,b)", "(1+1,2)"] {
            assert!(s.parse::<TreeCode>().is_err(), "{s}");
        }
    }
}
