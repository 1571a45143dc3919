//! Reduced trees of the Brownian continuum random tree and the Poisson mark
//! process on them.
//!
//! A reduced tree is a compacted [`LabelledBinaryTree`], so node ids are in
//! preorder: node 0 is the root, each node stands for the edge above it,
//! and the subtree of `v` occupies the id range `v..end[v]`.

use rand::Rng;
use rand_distr::{Distribution, Exp, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::treecore::{sample_uniform, LabelledBinaryTree, Node, NodeId};

/// Reduced tree spanned by the root and `n` sampled leaves.
#[derive(Debug, Clone)]
pub struct ReducedTree {
    pub shape: LabelledBinaryTree,
    /// Edge lengths indexed by node id; `lengths[0]` is the root edge.
    pub lengths: Vec<f64>,
    /// s_n, the sum of all lengths.
    pub total_length: f64,
    /// Sum over the `n − 1` edges whose lower endpoint is internal.
    pub internal_length: f64,
    /// One past the last id of each subtree.
    subtree_end: Vec<NodeId>,
    /// Leaf index (label − 1) per node; `usize::MAX` at internal nodes.
    leaf_index: Vec<usize>,
}

impl ReducedTree {
    /// Attach lengths to a shape. The shape is compacted first.
    pub fn new(shape: &LabelledBinaryTree, lengths: Vec<f64>) -> Result<Self> {
        let shape = shape.compact();
        let n = shape.leaf_count();
        shape.validate_cover(n as u32)?;
        if lengths.len() != 2 * n - 1 {
            return Err(Error::domain(
                "ReducedTree::new",
                format!("{} lengths for {} edges", lengths.len(), 2 * n - 1),
            ));
        }
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::domain("ReducedTree::new", "lengths must be positive and finite"));
        }
        let m = lengths.len();
        let mut subtree_end: Vec<NodeId> = (1..=m).collect();
        let mut leaf_index = vec![usize::MAX; m];
        for v in (0..m).rev() {
            match shape.node(v) {
                Node::Leaf(b) => leaf_index[v] = b.min_label() as usize - 1,
                Node::Internal { right, .. } => subtree_end[v] = subtree_end[*right],
                Node::Vacant => unreachable!("compacted trees have no vacant slots"),
            }
        }
        let total_length = lengths.iter().sum();
        let internal_length = (0..m).filter(|&v| !shape.is_leaf(v)).map(|v| lengths[v]).sum();
        Ok(ReducedTree {
            shape,
            lengths,
            total_length,
            internal_length,
            subtree_end,
            leaf_index,
        })
    }

    pub fn leaf_count(&self) -> usize {
        self.shape.leaf_count()
    }

    pub fn edge_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_external(&self, e: NodeId) -> bool {
        self.shape.is_leaf(e)
    }

    /// Leaf indices (label − 1) below edge `e`.
    pub fn leaves_below(&self, e: NodeId) -> impl Iterator<Item = usize> + '_ {
        (e..self.subtree_end[e]).filter_map(|v| (self.leaf_index[v] != usize::MAX).then_some(self.leaf_index[v]))
    }

    /// H = 2α·(internal length); 4·(internal length) at α = 2.
    pub fn h_statistic(&self, params: CrtParams) -> f64 {
        params.alpha * 2.0 * self.internal_length
    }
}

/// Uniform shape; s_n² ~ Gamma(n, rate 2) times an independent uniform point
/// of the simplex for the 2n−1 lengths.
pub fn sample_reduced_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ReducedTree> {
    if n == 0 {
        return Err(Error::domain("sample_reduced_tree", "need n ≥ 1"));
    }
    let shape = sample_uniform(n, rng)?;
    let s2: f64 = Gamma::new(n as f64, 0.5).expect("valid gamma parameters").sample(rng);
    let s = s2.sqrt();
    let mut lengths: Vec<f64> = (0..2 * n - 1).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = lengths.iter().sum();
    for l in &mut lengths {
        *l *= s / sum;
    }
    ReducedTree::new(&shape, lengths)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrtParams {
    pub alpha: f64,
}

impl Default for CrtParams {
    fn default() -> Self {
        CrtParams { alpha: 2.0 }
    }
}

impl CrtParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain("CrtParams::new", format!("need α > 0, got {alpha}")));
        }
        Ok(CrtParams { alpha })
    }

    /// Marks per unit time per unit length: 2α.
    pub fn mark_rate_per_length(&self) -> f64 {
        2.0 * self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkEvent {
    pub theta: f64,
    pub edge: NodeId,
    /// Distance from the upper end of the edge.
    pub position: f64,
}

/// Statistics of one run of the mark process, stopped at the first
/// root-edge mark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrtRun {
    pub n: u32,
    pub seed: u64,
    /// Y⁰ + number of classes among marked lineages.
    #[serde(rename = "U")]
    pub u: u32,
    /// Y⁰ + Y¹.
    #[serde(rename = "V")]
    pub v: u32,
    /// Y¹.
    #[serde(rename = "W")]
    pub w: u32,
    /// Time of the first root-edge mark.
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "H")]
    pub h: f64,
    /// Edges whose first mark precedes every first mark above them.
    #[serde(rename = "X")]
    pub x: u32,
    /// Record edges with an internal lower endpoint: the coalescence events.
    #[serde(rename = "Xp")]
    pub x_internal: u32,
    /// Edge carrying the earliest mark.
    pub first_edge: u32,
}

/// First-mark times per edge, root first; the root's is L.
fn first_marks<R: Rng + ?Sized>(tree: &ReducedTree, params: CrtParams, rng: &mut R) -> Vec<f64> {
    let rate = params.mark_rate_per_length();
    tree.lengths
        .iter()
        .map(|&len| {
            let e: f64 = Exp1.sample(rng);
            e / (rate * len)
        })
        .collect()
}

/// Everything that depends only on first-mark times.
fn summarize(tree: &ReducedTree, params: CrtParams, t: &[f64]) -> CrtRun {
    let l = t[0];
    let m = t.len();
    // earliest first mark strictly above each edge
    let mut above = vec![f64::INFINITY; m];
    let mut stack = vec![0];
    let (mut x, mut x_internal) = (0, 0);
    let (mut y0, mut y1, mut classes) = (0u32, 0u32, 0u32);
    while let Some(e) = stack.pop() {
        if t[e] < above[e] {
            x += 1;
            if !tree.is_external(e) {
                x_internal += 1;
            }
        }
        // topmost edge of its lineage marked before L
        let top_marked = e != 0 && t[e] < l && above[e] >= l;
        if top_marked {
            classes += 1;
            if tree.is_external(e) {
                y1 += 1;
            }
        }
        match tree.shape.node(e) {
            Node::Internal { left, right } => {
                let a = above[e].min(t[e]);
                above[*left] = a;
                above[*right] = a;
                stack.push(*right);
                stack.push(*left);
            }
            _ => {
                // lineage unmarked before L
                if above[e].min(t[e]) >= l {
                    y0 += 1;
                }
            }
        }
    }
    let first_edge = (0..m).min_by(|&a, &b| t[a].total_cmp(&t[b])).unwrap_or(0) as u32;
    CrtRun {
        n: tree.leaf_count() as u32,
        seed: 0,
        u: y0 + classes,
        v: y0 + y1,
        w: y1,
        l,
        h: tree.h_statistic(params),
        x,
        x_internal,
        first_edge,
    }
}

/// Fast path: only first-mark times are drawn.
pub fn run_crt_fast<R: Rng + ?Sized>(tree: &ReducedTree, params: CrtParams, rng: &mut R) -> Result<CrtRun> {
    check_run(tree)?;
    let t = first_marks(tree, params, rng);
    Ok(summarize(tree, params, &t))
}

/// Full mark process on `[0, L]` with the partition of leaves tracked event
/// by event. Returns the sorted marks (the last is the root-edge mark at L)
/// and the same statistics as [`run_crt_fast`] on the same generator state.
pub fn run_crt_pruning<R: Rng + ?Sized>(
    tree: &ReducedTree,
    params: CrtParams,
    rng: &mut R,
) -> Result<(Vec<MarkEvent>, CrtRun)> {
    check_run(tree)?;
    let t = first_marks(tree, params, rng);
    let l = t[0];
    let rate = params.mark_rate_per_length();
    let mut marks = Vec::new();
    for (e, &len) in tree.lengths.iter().enumerate() {
        let mut theta = t[e];
        while theta < l || (e == 0 && theta == l) {
            marks.push(MarkEvent {
                theta,
                edge: e,
                position: rng.random::<f64>() * len,
            });
            if e == 0 {
                break;
            }
            let gap: f64 = Exp::new(rate * len).expect("positive rate").sample(rng);
            theta += gap;
        }
    }
    marks.sort_by(|a, b| a.theta.total_cmp(&b.theta));

    let n = tree.leaf_count();
    let mut classes = Partition::new(n);
    let mut marked = vec![false; n];
    for mk in &marks[..marks.len() - 1] {
        let mut leaves = tree.leaves_below(mk.edge);
        let first = leaves.next().expect("every edge has a leaf below");
        marked[first] = true;
        for leaf in leaves {
            marked[leaf] = true;
            classes.union(first, leaf);
        }
        classes.check_coarsening()?;
    }
    let y0 = marked.iter().filter(|&&m| !m).count() as u32;
    let mut sizes = std::collections::HashMap::new();
    for leaf in (0..n).filter(|&i| marked[i]) {
        *sizes.entry(classes.find(leaf)).or_insert(0u32) += 1;
    }
    let y1 = sizes.values().filter(|&&s| s == 1).count() as u32;
    let summary = summarize(tree, params, &t);
    let run = CrtRun {
        u: y0 + sizes.len() as u32,
        v: y0 + y1,
        w: y1,
        ..summary
    };
    Ok((marks, run))
}

fn check_run(tree: &ReducedTree) -> Result<()> {
    if tree.leaf_count() < 2 {
        return Err(Error::domain("run_crt_pruning", "need n ≥ 2"));
    }
    Ok(())
}

/// Union-find over leaf indices that also counts classes, so coarsening can
/// be checked after every mark.
struct Partition {
    parent: Vec<usize>,
    count: usize,
    last_count: usize,
}

impl Partition {
    fn new(n: usize) -> Self {
        Partition {
            parent: (0..n).collect(),
            count: n,
            last_count: n,
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb.max(ra)] = ra.min(rb);
            self.count -= 1;
        }
    }

    /// Classes only merge.
    fn check_coarsening(&mut self) -> Result<()> {
        if self.count > self.last_count || self.count == 0 {
            return Err(Error::Invariant("partition of leaves refined".into()));
        }
        self.last_count = self.count;
        Ok(())
    }
}

fn nonzero_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if z != 0.0 {
            return z;
        }
    }
}

/// σ_θ = 1/(1+4τ_θ) with τ_θ = θ²/N².
pub fn sample_dust<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> Result<f64> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::domain("sample_dust", format!("need θ > 0, got {theta}")));
    }
    let z = nonzero_normal(rng);
    Ok(dust_from_tau(theta * theta / (z * z)))
}

fn dust_from_tau(tau: f64) -> f64 {
    1.0 / (1.0 + 4.0 * tau)
}

/// P(σ_θ ≤ x) = 2Φ(2θ√(x/(1−x))) − 1.
pub fn dust_cdf(theta: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    2.0 * crate::specfun::normal_cdf(2.0 * theta * (x / (1.0 - x)).sqrt()) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    /// Trapezoid sum of σ over `[0, θ_max]`.
    pub value: f64,
    /// Upper bound 1/(4θ_max) on the expected mass beyond θ_max; not added.
    pub tail_bound: f64,
}

/// Θ = ∫σ_θ dθ along one path of τ built from independent increments
/// (Δθ)²/N².
pub fn estimate_theta_integral<R: Rng + ?Sized>(rng: &mut R, grid_step: f64, theta_max: f64) -> Result<ThetaEstimate> {
    if !(grid_step > 0.0 && grid_step <= 0.01) {
        return Err(Error::domain("estimate_theta_integral", format!("grid_step {grid_step} not in (0, 0.01]")));
    }
    if !(theta_max >= 20.0 && theta_max.is_finite()) {
        return Err(Error::domain("estimate_theta_integral", format!("theta_max {theta_max} below 20")));
    }
    let steps = (theta_max / grid_step).round() as usize;
    let h = theta_max / steps as f64;
    let mut tau = 0.0;
    let mut prev = 1.0;
    let mut sum = 0.0;
    for _ in 0..steps {
        let z = nonzero_normal(rng);
        tau += h * h / (z * z);
        let s = dust_from_tau(tau);
        sum += 0.5 * h * (prev + s);
        prev = s;
    }
    Ok(ThetaEstimate {
        value: sum,
        tail_bound: 1.0 / (4.0 * theta_max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treecore::TreeCode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixed_tree(code: &str, lengths: Vec<f64>) -> ReducedTree {
        let shape = code.parse::<TreeCode>().unwrap().decode().unwrap();
        ReducedTree::new(&shape, lengths).unwrap()
    }

    #[test]
    fn reduced_tree_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..8 {
            let t = sample_reduced_tree(n, &mut rng).unwrap();
            assert_eq!(t.edge_count(), 2 * n - 1);
            let sum: f64 = t.lengths.iter().sum();
            assert!((sum - t.total_length).abs() < 1e-12);
            let internal = (0..t.edge_count()).filter(|&e| !t.is_external(e)).count();
            assert_eq!(internal, n - 1);
            let mut all: Vec<usize> = t.leaves_below(0).collect();
            all.sort_unstable();
            assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
        let one = sample_reduced_tree(1, &mut rng).unwrap();
        assert_eq!(one.internal_length, 0.0);
    }

    #[test]
    fn two_leaves_give_u_equal_v_equal_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut seen = [false; 3];
        for _ in 0..2000 {
            let t = sample_reduced_tree(2, &mut rng).unwrap();
            let r = run_crt_fast(&t, CrtParams::default(), &mut rng).unwrap();
            assert_eq!((r.u, r.v), (2, 2));
            seen[r.w as usize] = true;
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn full_and_fast_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 5, 17, 60] {
            for rep in 0..200u64 {
                let t = sample_reduced_tree(n, &mut rng).unwrap();
                let seed = rep * 31 + n as u64;
                let fast = run_crt_fast(&t, CrtParams::default(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                let (marks, full) = run_crt_pruning(&t, CrtParams::default(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                assert_eq!(fast, full);
                assert!(marks.windows(2).all(|w| w[0].theta <= w[1].theta));
                let last = marks.last().unwrap();
                assert_eq!((last.edge, last.theta), (0, full.l));
                assert!(marks.iter().all(|m| m.position > 0.0 && m.position < t.lengths[m.edge]));
            }
        }
    }

    #[test]
    fn hand_computed_marks() {
        // ((1,2),3): ids 0 root, 1 internal, 2 leaf 1, 3 leaf 2, 4 leaf 3
        let t = fixed_tree("((1,2),3)", vec![1.0; 5]);
        let p = CrtParams::default();
        // edge 1 marked first, then leaf 3; root last
        let s = summarize(&t, p, &[5.0, 1.0, 3.0, 9.0, 2.0]);
        assert_eq!((s.u, s.v, s.w), (2, 1, 1));
        // records: root, edge 1, leaf 3; edge 2 (t=3) is after its parent edge (t=1)
        assert_eq!((s.x, s.x_internal, s.first_edge), (3, 2, 1));
        // nothing marked before L
        let s = summarize(&t, p, &[0.5, 1.0, 3.0, 9.0, 2.0]);
        assert_eq!((s.u, s.v, s.w), (3, 3, 0));
        assert_eq!(s.x, 1);
    }

    #[test]
    fn h_is_four_times_internal_length() {
        let t = fixed_tree("((1,2),3)", vec![0.5, 0.25, 1.0, 1.0, 1.0]);
        assert!((t.internal_length - 0.75).abs() < 1e-15);
        assert!((t.h_statistic(CrtParams::default()) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn dust_monotone_in_theta() {
        let mut a = ChaCha8Rng::seed_from_u64(8);
        let mut b = a.clone();
        for _ in 0..100 {
            let lo = sample_dust(0.3, &mut a).unwrap();
            let hi = sample_dust(0.6, &mut b).unwrap();
            assert!(hi <= lo && lo <= 1.0 && hi > 0.0);
        }
        let near = sample_dust(1e-9, &mut a).unwrap();
        assert!(near > 0.99);
        assert!(sample_dust(0.0, &mut a).is_err());
    }

    #[test]
    fn theta_estimate_is_positive_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = estimate_theta_integral(&mut rng, 0.01, 20.0).unwrap();
        assert!(e.value > 0.0 && e.value <= 20.0);
        assert!((e.tail_bound - 0.0125).abs() < 1e-15);
        assert!(estimate_theta_integral(&mut rng, 0.02, 20.0).is_err());
        assert!(estimate_theta_integral(&mut rng, 0.01, 10.0).is_err());
    }
}
