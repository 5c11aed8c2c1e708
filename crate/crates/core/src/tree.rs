//! Weighted-CART binary classification trees.
//!
//! Split search minimizes Gini impurity over candidate features sampled with
//! probability proportional to a weight vector; trees grow to purity by
//! default. Fitted trees are immutable, expose their decision paths, and
//! serialize to a documented JSON node array in preorder.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng;

/// Per-split feature sampling weights: p nonnegative finite reals with at
/// least one strictly positive entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    values: Vec<f64>,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if values.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights("weights must be finite and nonnegative".into()));
        }
        if !values.iter().any(|w| *w > 0.0) {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        Ok(WeightVector { values })
    }

    pub fn uniform(p: usize) -> Self {
        WeightVector { values: vec![1.0 / p as f64; p] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Tree growth controls. `mtry` defaults to ⌊√p⌋ when unset; trees grow to
/// purity unless capped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub mtry: Option<usize>,
    pub min_node_size: usize,
    pub max_depth: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { mtry: None, min_node_size: 1, max_depth: None }
    }
}

impl TreeParams {
    pub fn resolve_mtry(&self, p: usize) -> Result<usize> {
        let mtry = match self.mtry {
            Some(m) => m,
            None => ((p as f64).sqrt().floor() as usize).max(1),
        };
        if mtry == 0 || mtry > p {
            return Err(Error::InvalidParameter(format!("mtry {} out of range 1..={}", mtry, p)));
        }
        if self.min_node_size == 0 {
            return Err(Error::InvalidParameter("min_node_size must be ≥ 1".into()));
        }
        Ok(mtry)
    }
}

/// A tree node. Ids index the preorder `nodes` array of [`DecisionTree`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Gini decrease achieved by this split.
        decrease: f64,
        /// Training rows reaching this node.
        n: usize,
    },
    Leaf {
        label: u8,
        /// Training rows per class reaching this leaf.
        counts: [usize; 2],
    },
}

/// A fitted classification tree. Rows route left when `value ≤ threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_features: usize,
    n_train: usize,
}

/// Gini impurity 1 − Σ p_c² of a binary class-count pair; 0 iff pure,
/// 0.5 at perfect balance.
pub fn gini(counts: [usize; 2]) -> Result<f64> {
    let total = counts[0] + counts[1];
    if total == 0 {
        return Err(Error::EmptyNode);
    }
    Ok(gini_raw(counts[0] as f64, counts[1] as f64))
}

#[inline]
fn gini_raw(c0: f64, c1: f64) -> f64 {
    let n = c0 + c1;
    let p0 = c0 / n;
    let p1 = c1 / n;
    1.0 - p0 * p0 - p1 * p1
}

/// Draws up to `mtry` distinct feature indices with probability proportional
/// to their weights, without replacement. Zero-weight features are never
/// selected; if fewer than `mtry` features have positive weight, all of them
/// are returned. The result is sorted ascending.
pub fn sample_features(weights: &WeightVector, mtry: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let w = weights.values();
    let support: Vec<usize> = (0..w.len()).filter(|&j| w[j] > 0.0).collect();
    if support.len() <= mtry {
        return support;
    }

    let mut cumulative = Vec::with_capacity(w.len());
    let mut total = 0.0;
    for &wj in w {
        total += wj;
        cumulative.push(total);
    }

    // Rejection sampling against the static cumulative distribution is
    // distributionally identical to sequential draws with renormalization.
    let mut chosen: Vec<usize> = Vec::with_capacity(mtry);
    let mut taken = vec![false; w.len()];
    let max_attempts = 64 + 16 * mtry;
    let mut attempts = 0;
    while chosen.len() < mtry && attempts < max_attempts {
        attempts += 1;
        let u = rng.random::<f64>() * total;
        let idx = upper_bound(&cumulative, u);
        if w[idx] > 0.0 && !taken[idx] {
            taken[idx] = true;
            chosen.push(idx);
        }
    }
    // Concentrated weight can starve rejection; finish with explicit
    // renormalized draws over the remaining support.
    while chosen.len() < mtry {
        let remaining: Vec<usize> = support.iter().copied().filter(|&j| !taken[j]).collect();
        let rem_total: f64 = remaining.iter().map(|&j| w[j]).sum();
        let mut u = rng.random::<f64>() * rem_total;
        let mut pick = remaining[remaining.len() - 1];
        for &j in &remaining {
            if u < w[j] {
                pick = j;
                break;
            }
            u -= w[j];
        }
        taken[pick] = true;
        chosen.push(pick);
    }
    chosen.sort_unstable();
    chosen
}

fn upper_bound(cumulative: &[f64], u: f64) -> usize {
    let mut lo = 0usize;
    let mut hi = cumulative.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if cumulative[mid] > u {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo.min(cumulative.len() - 1)
}

/// A chosen split: rows with `value ≤ threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    pub decrease: f64,
}

/// Finds the split maximizing the Gini decrease over the given candidate
/// features and all midpoint thresholds between consecutive distinct sorted
/// values. Ties break toward the lower feature index, then lower threshold.
/// Returns `None` when no candidate has two distinct values.
pub fn best_split(dataset: &Dataset, rows: &[u32], candidates: &[usize]) -> Option<SplitChoice> {
    let labels = dataset.labels();
    let mut c1_total = 0usize;
    for &r in rows {
        c1_total += labels[r as usize] as usize;
    }
    let n = rows.len();
    let c0_total = n - c1_total;
    let parent = gini_raw(c0_total as f64, c1_total as f64);

    let mut candidates: Vec<usize> = candidates.to_vec();
    candidates.sort_unstable();

    let mut best: Option<SplitChoice> = None;
    let mut sorted: Vec<(f64, u8)> = Vec::with_capacity(n);
    for &feature in &candidates {
        let col = dataset.column(feature);
        sorted.clear();
        sorted.extend(rows.iter().map(|&r| (col[r as usize], labels[r as usize])));
        sorted.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let mut left0 = 0f64;
        let mut left1 = 0f64;
        for i in 0..n - 1 {
            left0 += f64::from(sorted[i].1 == 0);
            left1 += f64::from(sorted[i].1);
            let v = sorted[i].0;
            let next = sorted[i + 1].0;
            if v == next {
                continue;
            }
            let nl = (i + 1) as f64;
            let nr = (n - i - 1) as f64;
            let right0 = c0_total as f64 - left0;
            let right1 = c1_total as f64 - left1;
            let decrease = (parent
                - (nl * gini_raw(left0, left1) + nr * gini_raw(right0, right1)) / n as f64)
                .max(0.0);
            if best.map_or(true, |b| decrease > b.decrease) {
                // Midpoint without overflow; clamp so `v ≤ threshold < next`
                // still separates adjacent floats.
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                best = Some(SplitChoice { feature, threshold, decrease });
            }
        }
    }
    best
}

/// Grows a tree on the full dataset. See [`grow_from_rows`] for semantics.
pub fn grow(
    dataset: &Dataset,
    weights: &WeightVector,
    params: &TreeParams,
    seed: u64,
) -> Result<DecisionTree> {
    let rows: Vec<u32> = (0..dataset.n_rows() as u32).collect();
    let mut rng = rng::rng_from(seed);
    grow_from_rows(dataset, rows, weights, params, &mut rng)
}

/// Grows a tree on a multiset of training rows (bootstrap draws repeat row
/// indices). Recursion stops on purity, `min_node_size`, `max_depth`, or when
/// no positive-weight feature admits a valid split. Leaf labels are the
/// majority class, ties resolving to 0.
pub fn grow_from_rows(
    dataset: &Dataset,
    rows: Vec<u32>,
    weights: &WeightVector,
    params: &TreeParams,
    rng: &mut ChaCha8Rng,
) -> Result<DecisionTree> {
    let p = dataset.n_features();
    if weights.len() != p {
        return Err(Error::DimensionMismatch { expected: p, got: weights.len() });
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset("cannot grow a tree on zero rows".into()));
    }
    let mtry = params.resolve_mtry(p)?;
    let n_train = rows.len();

    let mut builder = TreeBuilder {
        dataset,
        weights,
        params,
        mtry,
        rng,
        nodes: Vec::new(),
        positive_support: (0..p).filter(|&j| weights.values()[j] > 0.0).collect(),
    };
    builder.build(rows, 0);
    Ok(DecisionTree { nodes: builder.nodes, n_features: p, n_train })
}

struct TreeBuilder<'a> {
    dataset: &'a Dataset,
    weights: &'a WeightVector,
    params: &'a TreeParams,
    mtry: usize,
    rng: &'a mut ChaCha8Rng,
    nodes: Vec<Node>,
    positive_support: Vec<usize>,
}

impl TreeBuilder<'_> {
    fn build(&mut self, rows: Vec<u32>, depth: usize) -> usize {
        let labels = self.dataset.labels();
        let mut counts = [0usize; 2];
        for &r in &rows {
            counts[labels[r as usize] as usize] += 1;
        }
        let pure = counts[0] == 0 || counts[1] == 0;
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        let too_small = rows.len() < self.params.min_node_size;

        if pure || depth_capped || too_small {
            return self.push_leaf(counts);
        }

        let candidates = sample_features(self.weights, self.mtry, self.rng);
        let mut choice = best_split(self.dataset, &rows, &candidates);
        if choice.is_none() && candidates.len() < self.positive_support.len() {
            // The sampled candidates may all be constant within the node even
            // though another positive-weight feature still separates it.
            let rest: Vec<usize> = self
                .positive_support
                .iter()
                .copied()
                .filter(|j| !candidates.contains(j))
                .collect();
            choice = best_split(self.dataset, &rows, &rest);
        }
        let Some(choice) = choice else {
            return self.push_leaf(counts);
        };

        let col = self.dataset.column(choice.feature);
        let (left_rows, right_rows): (Vec<u32>, Vec<u32>) =
            rows.into_iter().partition(|&r| col[r as usize] <= choice.threshold);
        debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());

        let id = self.nodes.len();
        self.nodes.push(Node::Split {
            feature: choice.feature,
            threshold: choice.threshold,
            left: 0,
            right: 0,
            decrease: choice.decrease,
            n: counts[0] + counts[1],
        });
        let left = self.build(left_rows, depth + 1);
        let right = self.build(right_rows, depth + 1);
        if let Node::Split { left: l, right: r, .. } = &mut self.nodes[id] {
            *l = left;
            *r = right;
        }
        id
    }

    fn push_leaf(&mut self, counts: [usize; 2]) -> usize {
        let label = u8::from(counts[1] > counts[0]);
        self.nodes.push(Node::Leaf { label, counts });
        self.nodes.len() - 1
    }
}

impl DecisionTree {
    /// Assembles a tree from an explicit preorder node array, checking that
    /// child ids form a well-formed binary tree with every node reachable
    /// exactly once.
    pub fn from_nodes(nodes: Vec<Node>, n_features: usize, n_train: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("tree needs at least one node".into()));
        }
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if id >= nodes.len() || seen[id] {
                return Err(Error::InvalidParameter(format!("malformed tree at node {id}")));
            }
            seen[id] = true;
            if let Node::Split { feature, left, right, decrease, .. } = &nodes[id] {
                if *feature >= n_features || *decrease < 0.0 {
                    return Err(Error::InvalidParameter(format!("malformed split node {id}")));
                }
                stack.push(*left);
                stack.push(*right);
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter("unreachable nodes in tree".into()));
        }
        Ok(DecisionTree { nodes, n_features, n_train })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        matches!(self.nodes.get(id), Some(Node::Leaf { .. }))
    }

    /// Routes a row (feature accessor) to its leaf id.
    pub fn leaf_of(&self, value_at: impl Fn(usize) -> f64) -> usize {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { .. } => return id,
                Node::Split { feature, threshold, left, right, .. } => {
                    id = if value_at(*feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict_row(&self, value_at: impl Fn(usize) -> f64) -> u8 {
        match &self.nodes[self.leaf_of(value_at)] {
            Node::Leaf { label, .. } => *label,
            Node::Split { .. } => unreachable!(),
        }
    }

    /// The set of unique feature indices on the root→leaf path. Empty for a
    /// root-only tree.
    pub fn decision_path(&self, leaf_id: usize) -> Result<Vec<usize>> {
        if !self.is_leaf(leaf_id) {
            return Err(Error::NotALeaf(leaf_id));
        }
        let mut features = Vec::new();
        let mut found = false;
        self.walk_to(0, leaf_id, &mut Vec::new(), &mut features, &mut found);
        if !found {
            return Err(Error::NotALeaf(leaf_id));
        }
        features.sort_unstable();
        features.dedup();
        Ok(features)
    }

    fn walk_to(
        &self,
        id: usize,
        target: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<usize>,
        found: &mut bool,
    ) {
        if *found {
            return;
        }
        match &self.nodes[id] {
            Node::Leaf { .. } => {
                if id == target {
                    *out = stack.clone();
                    *found = true;
                }
            }
            Node::Split { feature, left, right, .. } => {
                stack.push(*feature);
                self.walk_to(*left, target, stack, out, found);
                self.walk_to(*right, target, stack, out, found);
                stack.pop();
            }
        }
    }

    /// Every leaf with its unique-feature path set, in preorder:
    /// `(leaf id, sorted unique path features, label, training count)`.
    pub fn leaf_paths(&self) -> Vec<LeafPath> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.collect_paths(0, &mut stack, &mut out);
        out
    }

    fn collect_paths(&self, id: usize, stack: &mut Vec<usize>, out: &mut Vec<LeafPath>) {
        match &self.nodes[id] {
            Node::Leaf { label, counts } => {
                let mut features = stack.clone();
                features.sort_unstable();
                features.dedup();
                out.push(LeafPath {
                    leaf_id: id,
                    features,
                    label: *label,
                    count: counts[0] + counts[1],
                });
            }
            Node::Split { feature, left, right, .. } => {
                stack.push(*feature);
                self.collect_paths(*left, stack, out);
                self.collect_paths(*right, stack, out);
                stack.pop();
            }
        }
    }

    /// Per-feature Gini importance: the sum over splits of the node's
    /// impurity decrease weighted by the fraction of training rows reaching
    /// it. Zero for features never split on.
    pub fn importance(&self) -> Vec<f64> {
        let mut imp = vec![0.0; self.n_features];
        for node in &self.nodes {
            if let Node::Split { feature, decrease, n, .. } = node {
                imp[*feature] += (*n as f64 / self.n_train as f64) * decrease;
            }
        }
        imp
    }
}

/// A leaf's decision path with its label and training count.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafPath {
    pub leaf_id: usize,
    pub features: Vec<usize>,
    pub label: u8,
    pub count: usize,
}
