//! Prediction metrics (AUC-PR, AUC-ROC, MCC/PPV at a train-optimized
//! threshold) and interaction evaluation: conditional prediction, permutation
//! importance, interaction AUC, recovery rate, and false-positive weight.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureGrouping};
use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::rit::Interaction;
use crate::rng;

/// Scores paired with binary labels. Higher scores must indicate the
/// positive class; `positive_class` selects which label counts as positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredLabels {
    scores: Vec<f64>,
    labels: Vec<u8>,
    positive_class: u8,
}

impl ScoredLabels {
    pub fn new(scores: Vec<f64>, labels: Vec<u8>, positive_class: u8) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} scores for {} labels",
                scores.len(),
                labels.len()
            )));
        }
        if scores.is_empty() {
            return Err(Error::InvalidParameter("empty score vector".into()));
        }
        if positive_class > 1 {
            return Err(Error::InvalidParameter("positive_class must be 0 or 1".into()));
        }
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::InvalidParameter("scores contain NaN".into()));
        }
        Ok(ScoredLabels { scores, labels, positive_class })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn positive_class(&self) -> u8 {
        self.positive_class
    }

    fn is_positive(&self, i: usize) -> bool {
        self.labels[i] == self.positive_class
    }

    fn positives(&self) -> usize {
        (0..self.labels.len()).filter(|&i| self.is_positive(i)).count()
    }

    /// Indices sorted by score descending; equal scores adjacent.
    fn order_desc(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].partial_cmp(&self.scores[a]).unwrap());
        idx
    }
}

/// Area under the precision-recall curve in step-wise average-precision form:
/// Σ over recall increments of the precision at that cut, with equal scores
/// processed as one block. Requires at least one positive example.
pub fn auc_pr(data: &ScoredLabels) -> Result<f64> {
    let total_pos = data.positives();
    if total_pos == 0 {
        return Err(Error::UndefinedMetric("auc_pr needs at least one positive example".into()));
    }
    let order = data.order_desc();
    let mut ap = 0.0;
    let mut tp = 0usize;
    let mut seen = 0usize;
    let mut i = 0usize;
    while i < order.len() {
        let mut j = i;
        // one block per unique score
        while j < order.len() && data.scores[order[j]] == data.scores[order[i]] {
            seen += 1;
            tp += usize::from(data.is_positive(order[j]));
            j += 1;
        }
        let recall = tp as f64 / total_pos as f64;
        let prev_recall = (tp - block_tp(data, &order[i..j])) as f64 / total_pos as f64;
        let precision = tp as f64 / seen as f64;
        ap += (recall - prev_recall) * precision;
        i = j;
    }
    Ok(ap)
}

fn block_tp(data: &ScoredLabels, block: &[usize]) -> usize {
    block.iter().filter(|&&i| data.is_positive(i)).count()
}

/// Area under the ROC curve: P(score⁺ > score⁻) + ½·P(tie), computed from
/// midranks. Requires both classes.
pub fn auc_roc(data: &ScoredLabels) -> Result<f64> {
    let pos = data.positives();
    let neg = data.labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedMetric("auc_roc needs both classes".into()));
    }
    let mut idx: Vec<usize> = (0..data.scores.len()).collect();
    idx.sort_by(|&a, &b| data.scores[a].partial_cmp(&data.scores[b]).unwrap());
    let mut rank_sum_pos = 0.0;
    let mut i = 0usize;
    while i < idx.len() {
        let mut j = i;
        while j < idx.len() && data.scores[idx[j]] == data.scores[idx[i]] {
            j += 1;
        }
        // ranks are 1-based; ties share the midrank
        let midrank = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            if data.is_positive(k) {
                rank_sum_pos += midrank;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

/// Matthews correlation coefficient from confusion counts, with the value 0
/// whenever a denominator factor vanishes.
pub fn mcc_from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> f64 {
    let tp = tp as f64;
    let fp = fp as f64;
    let tn = tn as f64;
    let fn_ = fn_ as f64;
    let denom = ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (tp * tn - fp * fn_) / denom
}

/// Threshold chosen on training scores and the resulting evaluation metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub threshold: f64,
    pub mcc: f64,
    pub ppv: f64,
}

/// Scans thresholds over the unique training scores (plus ±∞ endpoints) for
/// the one maximizing MCC on the training data, then reports MCC and PPV on
/// the evaluation data at that threshold. Prediction rule: score ≥ threshold.
pub fn best_mcc(train: &ScoredLabels, eval: &ScoredLabels) -> Result<ThresholdReport> {
    let pos = train.positives();
    if pos == 0 || pos == train.labels.len() {
        return Err(Error::UndefinedMetric("best_mcc needs both classes in training".into()));
    }

    let mut thresholds: Vec<f64> = train.scores.clone();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();
    thresholds.insert(0, f64::NEG_INFINITY);
    thresholds.push(f64::INFINITY);

    let mut best_threshold = f64::NEG_INFINITY;
    let mut best = f64::NEG_INFINITY;
    for &t in &thresholds {
        let (tp, fp, tn, fn_) = confusion(train, t);
        let m = mcc_from_counts(tp, fp, tn, fn_);
        if m > best {
            best = m;
            best_threshold = t;
        }
    }

    let (tp, fp, tn, fn_) = confusion(eval, best_threshold);
    let ppv = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    Ok(ThresholdReport { threshold: best_threshold, mcc: mcc_from_counts(tp, fp, tn, fn_), ppv })
}

fn confusion(data: &ScoredLabels, threshold: f64) -> (usize, usize, usize, usize) {
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..data.scores.len() {
        let predicted_pos = data.scores[i] >= threshold;
        match (predicted_pos, data.is_positive(i)) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    (tp, fp, tn, fn_)
}

/// Per-row forest prediction restricted to leaves whose decision path
/// contains `s`; trees whose leaf path misses `s` contribute the class-1
/// training prevalence instead. Interaction items are group indices under
/// `grouping` (identity when `None`).
pub fn conditional_prediction(
    forest: &Forest,
    data: &Dataset,
    s: &Interaction,
    train_prevalence: f64,
    grouping: Option<&FeatureGrouping>,
) -> Result<Vec<f64>> {
    if data.n_features() != forest.n_features() {
        return Err(Error::DimensionMismatch {
            expected: forest.n_features(),
            got: data.n_features(),
        });
    }
    let identity;
    let grouping = match grouping {
        Some(g) => g,
        None => {
            identity = FeatureGrouping::identity(forest.feature_names());
            &identity
        }
    };

    // Precompute each leaf's grouped path set per tree.
    let per_tree: Vec<BTreeMap<usize, (Vec<u32>, u8)>> = forest
        .trees()
        .iter()
        .map(|tree| {
            tree.leaf_paths()
                .into_iter()
                .map(|lp| {
                    let mut items: Vec<u32> =
                        lp.features.iter().map(|&f| grouping.group_of(f) as u32).collect();
                    items.sort_unstable();
                    items.dedup();
                    (lp.leaf_id, (items, lp.label))
                })
                .collect()
        })
        .collect();

    let t = forest.ntree() as f64;
    Ok((0..data.n_rows())
        .map(|i| {
            let mut sum = 0.0;
            for (tree, leaf_map) in forest.trees().iter().zip(&per_tree) {
                let leaf = tree.leaf_of(|j| data.value(i, j));
                let (items, label) = &leaf_map[&leaf];
                sum += if s.is_subset_of(items) { *label as f64 } else { train_prevalence };
            }
            sum / t
        })
        .collect())
}

/// Which score a metric reduces predictions to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    AucPr,
    AucRoc,
}

impl MetricKind {
    pub fn compute(self, data: &ScoredLabels) -> Result<f64> {
        match self {
            MetricKind::AucPr => auc_pr(data),
            MetricKind::AucRoc => auc_roc(data),
        }
    }
}

/// Returns the dataset with every feature column outside `s` independently
/// permuted (repeat `repeat`, deterministic per seed). Exposed so oracle
/// tests can recompute the downstream metric on the identical permutation.
pub fn permute_complement(
    data: &Dataset,
    s: &Interaction,
    grouping: Option<&FeatureGrouping>,
    seed: u64,
    repeat: u64,
) -> Result<Dataset> {
    let identity;
    let grouping = match grouping {
        Some(g) => g,
        None => {
            identity = FeatureGrouping::identity(data.feature_names());
            &identity
        }
    };
    if grouping.n_features() != data.n_features() {
        return Err(Error::Grouping(format!(
            "grouping covers {} features, dataset has {}",
            grouping.n_features(),
            data.n_features()
        )));
    }
    let p = data.n_features();
    let keep: Vec<bool> =
        (0..p).map(|j| s.items().contains(&(grouping.group_of(j) as u32))).collect();
    let columns: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            let mut col = data.column(j).to_vec();
            if !keep[j] {
                let mut rng =
                    rng::rng_for(seed, rng::stream::PERMUTATION, repeat * p as u64 + j as u64);
                use rand::seq::SliceRandom;
                col.shuffle(&mut rng);
            }
            col
        })
        .collect();
    Dataset::new(columns, data.feature_names().to_vec(), data.labels().to_vec())
}

/// Metric of forest predictions on data whose columns outside `s` are
/// permuted, averaged over `repeats` independent permutations. With `s`
/// covering every feature this equals the plain metric exactly.
#[allow(clippy::too_many_arguments)]
pub fn permutation_importance(
    forest: &Forest,
    data: &Dataset,
    s: &Interaction,
    metric: MetricKind,
    positive_class: u8,
    seed: u64,
    repeats: usize,
    grouping: Option<&FeatureGrouping>,
) -> Result<f64> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be ≥ 1".into()));
    }
    let mut total = 0.0;
    for r in 0..repeats {
        let permuted = permute_complement(data, s, grouping, seed, r as u64)?;
        let proba = forest.predict_proba(&permuted)?;
        let oriented: Vec<f64> = if positive_class == 1 {
            proba
        } else {
            proba.iter().map(|p| 1.0 - p).collect()
        };
        let scored = ScoredLabels::new(oriented, data.labels().to_vec(), positive_class)?;
        total += metric.compute(&scored)?;
    }
    Ok(total / repeats as f64)
}

/// The ground-truth active feature set of a simulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthSet {
    active: BTreeSet<u32>,
}

impl TruthSet {
    pub fn new(active: impl IntoIterator<Item = u32>) -> Result<Self> {
        let active: BTreeSet<u32> = active.into_iter().collect();
        if active.is_empty() {
            return Err(Error::InvalidParameter("truth set must be nonempty".into()));
        }
        Ok(TruthSet { active })
    }

    pub fn active(&self) -> &BTreeSet<u32> {
        &self.active
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// True positives are interactions between active features only; any
    /// interaction touching a non-active feature is a false positive.
    pub fn is_true_positive(&self, s: &Interaction) -> bool {
        s.items().iter().all(|i| self.active.contains(i))
    }
}

/// ROC AUC of recovered interactions scored by stability and labelled by
/// truth-subset membership. `None` when every recovered interaction carries
/// the same truth label (the AUC is undefined).
pub fn interaction_auc(
    recovered: &BTreeMap<Interaction, f64>,
    truth: &TruthSet,
) -> Option<f64> {
    if recovered.is_empty() {
        return None;
    }
    let scores: Vec<f64> = recovered.values().copied().collect();
    let labels: Vec<u8> =
        recovered.keys().map(|s| u8::from(truth.is_true_positive(s))).collect();
    if labels.iter().all(|&l| l == 1) || labels.iter().all(|&l| l == 0) {
        return None;
    }
    let scored = ScoredLabels::new(scores, labels, 1).ok()?;
    auc_roc(&scored).ok()
}

/// Fraction of the C(|S*|, s) true order-s subsets that appear in the
/// recovered set directly or inside a recovered superset.
pub fn recovery_rate(
    recovered: &BTreeMap<Interaction, f64>,
    truth: &TruthSet,
    order: usize,
) -> Result<f64> {
    if order < 2 || order > truth.len() {
        return Err(Error::InvalidParameter(format!(
            "order {} out of range 2..={}",
            order,
            truth.len()
        )));
    }
    let active: Vec<u32> = truth.active().iter().copied().collect();
    let mut hit = 0usize;
    let mut total = 0usize;
    for combo in active.iter().copied().combinations(order) {
        total += 1;
        if recovered.keys().any(|r| crate::rit::is_subset(&combo, r.items())) {
            hit += 1;
        }
    }
    Ok(hit as f64 / total as f64)
}

/// Stability-mass fraction of order-s false positives among all recovered
/// order-s interactions. `None` when nothing of order s was recovered.
pub fn false_positive_weight(
    recovered: &BTreeMap<Interaction, f64>,
    truth: &TruthSet,
    order: usize,
) -> Option<f64> {
    let mut total = 0.0;
    let mut false_mass = 0.0;
    for (s, &sta) in recovered {
        if s.order() != order {
            continue;
        }
        total += sta;
        if !truth.is_true_positive(s) {
            false_mass += sta;
        }
    }
    (total > 0.0).then(|| false_mass / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::forest::{self, ForestParams};
    use crate::tree::WeightVector;
    use approx::assert_abs_diff_eq;

    fn scored(scores: &[f64], labels: &[u8]) -> ScoredLabels {
        ScoredLabels::new(scores.to_vec(), labels.to_vec(), 1).unwrap()
    }

    #[test]
    fn auc_pr_perfect_separation() {
        let s = scored(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0]);
        assert_eq!(auc_pr(&s).unwrap(), 1.0);
    }

    #[test]
    fn auc_pr_constant_scores_equal_prevalence() {
        let s = scored(&[0.5; 10], &[1, 0, 0, 0, 1, 0, 0, 0, 0, 0]);
        assert_abs_diff_eq!(auc_pr(&s).unwrap(), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn auc_pr_hand_enumerated_steps() {
        let s = scored(&[0.9, 0.8, 0.7, 0.6], &[1, 0, 1, 0]);
        assert_abs_diff_eq!(auc_pr(&s).unwrap(), 0.5 * (1.0 + 2.0 / 3.0), epsilon = 1e-12);
    }

    #[test]
    fn auc_pr_requires_positives() {
        let s = scored(&[0.1, 0.2], &[0, 0]);
        assert!(auc_pr(&s).is_err());
    }

    #[test]
    fn auc_pr_positive_class_zero_orientation() {
        // positives = labels 0 at scores 0.4 and 0.2; descending blocks give
        // AP = 1/2·1 + 1/2·(2/3), same shape as the class-1 hand case.
        let flipped =
            ScoredLabels::new(vec![0.1, 0.2, 0.3, 0.4], vec![1, 0, 1, 0], 0).unwrap();
        assert_abs_diff_eq!(auc_pr(&flipped).unwrap(), 0.5 * (1.0 + 2.0 / 3.0), epsilon = 1e-12);
    }

    #[test]
    fn auc_roc_perfect_and_constant() {
        assert_eq!(auc_roc(&scored(&[0.9, 0.8, 0.2], &[1, 1, 0])).unwrap(), 1.0);
        assert_eq!(auc_roc(&scored(&[0.5, 0.5, 0.5, 0.5], &[1, 0, 1, 0])).unwrap(), 0.5);
    }

    #[test]
    fn auc_roc_four_point_pair_count() {
        // pairs: (0.9,0.8):concordant, (0.9,0.6):concordant,
        //        (0.7,0.8):discordant, (0.7,0.6):concordant → 3/4
        let s = scored(&[0.9, 0.8, 0.7, 0.6], &[1, 0, 1, 0]);
        assert_abs_diff_eq!(auc_roc(&s).unwrap(), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn auc_roc_single_class_errors() {
        assert!(auc_roc(&scored(&[0.5, 0.4], &[1, 1])).is_err());
    }

    #[test]
    fn best_mcc_perfectly_separable() {
        let train = scored(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0]);
        let eval = scored(&[0.95, 0.85, 0.15, 0.05], &[1, 1, 0, 0]);
        let report = best_mcc(&train, &eval).unwrap();
        assert_abs_diff_eq!(report.mcc, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.ppv, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn best_mcc_tie_takes_lower_threshold() {
        // Thresholds 0.3 and 0.7 give identical confusion tables here; the
        // scan must settle on the lower one.
        let train = scored(&[0.7, 0.3, 0.3, 0.7], &[1, 0, 0, 1]);
        let report = best_mcc(&train, &train).unwrap();
        assert_eq!(report.threshold, 0.7);
        let train2 = scored(&[0.9, 0.1], &[1, 0]);
        let r2 = best_mcc(&train2, &train2).unwrap();
        assert!(r2.threshold <= 0.9);
        assert_eq!(r2.mcc, 1.0);
    }

    #[test]
    fn mcc_zero_denominator_convention() {
        assert_eq!(mcc_from_counts(0, 0, 5, 5), 0.0);
    }

    fn toy_forest(seed: u64) -> (Forest, Dataset) {
        let mut rng = rng::rng_from(seed);
        let n = 120;
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..n).map(|_| rand::Rng::random::<f64>(&mut rng) * 2.0 - 1.0).collect())
            .collect();
        let labels: Vec<u8> =
            (0..n).map(|i| u8::from(cols[0][i] > 0.0 && cols[1][i] > 0.0)).collect();
        let names = (0..3).map(|j| format!("x{}", j + 1)).collect();
        let d = Dataset::new(cols, names, labels).unwrap();
        let params = ForestParams { ntree: 20, seed: 5, ..Default::default() };
        let f = forest::fit(&d, &WeightVector::uniform(3), &params).unwrap();
        (f, d)
    }

    #[test]
    fn conditional_prediction_absent_interaction_is_prevalence() {
        let (f, d) = toy_forest(40);
        // Group index 99 can never lie on a path.
        let s = Interaction::new(vec![99]).unwrap();
        let got = conditional_prediction(&f, &d, &s, 0.25, None).unwrap();
        for v in got {
            assert_abs_diff_eq!(v, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn conditional_prediction_single_tree_all_paths_contain_s() {
        // A stump on feature 0: every path set is {0}.
        let n = 100;
        let col: Vec<f64> = (0..n).map(|i| i as f64 - 49.5).collect();
        let labels: Vec<u8> = col.iter().map(|&v| u8::from(v > 0.0)).collect();
        let d = Dataset::new(vec![col], vec!["x1".into()], labels.clone()).unwrap();
        let params = ForestParams { ntree: 1, seed: 2, ..Default::default() };
        let f = forest::fit(&d, &WeightVector::uniform(1), &params).unwrap();
        let s = Interaction::new(vec![0]).unwrap();
        let got = conditional_prediction(&f, &d, &s, 0.5, None).unwrap();
        let leaf_labels: Vec<f64> = (0..n)
            .map(|i| f.trees()[0].predict_row(|j| d.value(i, j)) as f64)
            .collect();
        assert_eq!(got, leaf_labels);
    }

    #[test]
    fn conditional_prediction_mixes_label_and_prevalence() {
        // Two hand-built stumps; S on tree 0's paths only → mean of its leaf
        // label and the prevalence constant.
        use crate::tree::{DecisionTree, Node};
        let t0 = DecisionTree::from_nodes(
            vec![
                Node::Split { feature: 0, threshold: 0.0, left: 1, right: 2, decrease: 0.5, n: 2 },
                Node::Leaf { label: 0, counts: [1, 0] },
                Node::Leaf { label: 1, counts: [0, 1] },
            ],
            2,
            2,
        )
        .unwrap();
        let t1 = DecisionTree::from_nodes(
            vec![
                Node::Split { feature: 1, threshold: 0.0, left: 1, right: 2, decrease: 0.5, n: 2 },
                Node::Leaf { label: 0, counts: [1, 0] },
                Node::Leaf { label: 1, counts: [0, 1] },
            ],
            2,
            2,
        )
        .unwrap();
        let forest = Forest::from_json(
            &serde_json::to_string(&serde_json::json!({
                "version": 1,
                "params": {"ntree": 2, "tree": {"mtry": null, "min_node_size": 1, "max_depth": null}, "seed": 0},
                "feature_names": ["a", "b"],
                "n_train": 2,
                "trees": [serde_json::to_value(&t0).unwrap(), serde_json::to_value(&t1).unwrap()],
                "multiplicities": [[1, 1], [1, 1]],
            }))
            .unwrap(),
        )
        .unwrap();
        let d = Dataset::new(
            vec![vec![1.0, -1.0], vec![1.0, -1.0]],
            vec!["a".into(), "b".into()],
            vec![1, 0],
        )
        .unwrap();
        let s = Interaction::new(vec![0]).unwrap();
        let got = conditional_prediction(&forest, &d, &s, 0.3, None).unwrap();
        // Row 0: tree0 leaf label 1 (path {0} ⊇ {0}); tree1 path {1} → 0.3.
        assert_abs_diff_eq!(got[0], (1.0 + 0.3) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(got[1], (0.0 + 0.3) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn conditional_prediction_smaller_s_uses_superset_of_leaves() {
        let (f, d) = toy_forest(41);
        let s_small = Interaction::new(vec![0]).unwrap();
        let s_big = Interaction::new(vec![0, 1]).unwrap();
        // Count leaf contributions directly: every leaf containing {0,1}
        // also contains {0}.
        for tree in f.trees() {
            for lp in tree.leaf_paths() {
                let items: Vec<u32> = lp.features.iter().map(|&x| x as u32).collect();
                if s_big.is_subset_of(&items) {
                    assert!(s_small.is_subset_of(&items));
                }
            }
        }
        let _ = d;
    }

    #[test]
    fn permutation_importance_full_set_is_exact_metric() {
        let (f, d) = toy_forest(42);
        let s = Interaction::new(vec![0, 1, 2]).unwrap();
        let proba = f.predict_proba(&d).unwrap();
        let plain =
            auc_pr(&ScoredLabels::new(proba, d.labels().to_vec(), 1).unwrap()).unwrap();
        for seed in [1u64, 7, 13] {
            let pi = permutation_importance(&f, &d, &s, MetricKind::AucPr, 1, seed, 5, None)
                .unwrap();
            assert_eq!(pi, plain);
        }
    }

    #[test]
    fn permutation_importance_no_signal_near_prevalence() {
        // Labels independent of features: permuting the complement leaves a
        // forest with nothing to exploit.
        let mut rng = rng::rng_from(50);
        let n = 200;
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..n).map(|_| rand::Rng::random::<f64>(&mut rng) * 2.0 - 1.0).collect())
            .collect();
        let labels: Vec<u8> = (0..n).map(|i| u8::from(i % 5 == 0)).collect();
        let prevalence = labels.iter().filter(|&&y| y == 1).count() as f64 / n as f64;
        let names = (0..4).map(|j| format!("x{}", j + 1)).collect();
        let d = Dataset::new(cols, names, labels).unwrap();
        let params = ForestParams { ntree: 30, seed: 9, ..Default::default() };
        let f = forest::fit(&d, &WeightVector::uniform(4), &params).unwrap();
        let s = Interaction::new(vec![0]).unwrap();
        let pi =
            permutation_importance(&f, &d, &s, MetricKind::AucPr, 1, 3, 5, None).unwrap();
        assert!((pi - prevalence).abs() < 0.15, "pi {pi} vs prevalence {prevalence}");
    }

    fn stability_map(entries: &[(&[u32], f64)]) -> BTreeMap<Interaction, f64> {
        entries
            .iter()
            .map(|(items, sta)| (Interaction::new(items.to_vec()).unwrap(), *sta))
            .collect()
    }

    #[test]
    fn interaction_auc_only_true_subsets() {
        let truth = TruthSet::new([1, 2, 3, 4]).unwrap();
        let recovered = stability_map(&[(&[1, 2], 0.9), (&[1, 5], 0.3)]);
        assert_eq!(interaction_auc(&recovered, &truth), Some(1.0));
    }

    #[test]
    fn interaction_auc_interleaved_pair_count() {
        let truth = TruthSet::new([1, 2]).unwrap();
        // true @0.9, false @0.7, true @0.5, false @0.3:
        // pairs (t,f): (0.9,0.7)+, (0.9,0.3)+, (0.5,0.7)-, (0.5,0.3)+ → 0.75
        let recovered =
            stability_map(&[(&[1], 0.9), (&[3], 0.7), (&[2], 0.5), (&[4], 0.3)]);
        assert_eq!(interaction_auc(&recovered, &truth), Some(0.75));
    }

    #[test]
    fn interaction_auc_undefined_when_single_label() {
        let truth = TruthSet::new([1, 2]).unwrap();
        let recovered = stability_map(&[(&[1], 0.9), (&[2], 0.5)]);
        assert_eq!(interaction_auc(&recovered, &truth), None);
    }

    #[test]
    fn recovery_rate_superset_rule() {
        let truth = TruthSet::new([1, 2, 3, 4]).unwrap();
        let recovered = stability_map(&[(&[1, 2, 3, 4], 0.4)]);
        for s in 2..=4 {
            assert_eq!(recovery_rate(&recovered, &truth, s).unwrap(), 1.0);
        }
    }

    #[test]
    fn recovery_rate_nothing_recovered() {
        let truth = TruthSet::new([1, 2, 3, 4]).unwrap();
        let recovered = BTreeMap::new();
        assert_eq!(recovery_rate(&recovered, &truth, 2).unwrap(), 0.0);
    }

    #[test]
    fn recovery_rate_enumerated_fractions() {
        let truth = TruthSet::new([1, 2, 3, 4]).unwrap();
        let recovered = stability_map(&[(&[1, 2, 3], 0.4)]);
        assert_abs_diff_eq!(recovery_rate(&recovered, &truth, 2).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(recovery_rate(&recovered, &truth, 3).unwrap(), 0.25, epsilon = 1e-12);
        assert_eq!(recovery_rate(&recovered, &truth, 4).unwrap(), 0.0);
        assert!(recovery_rate(&recovered, &truth, 1).is_err());
        assert!(recovery_rate(&recovered, &truth, 5).is_err());
    }

    #[test]
    fn false_positive_weight_extremes_and_ratio() {
        let truth = TruthSet::new([1, 2, 3, 4]).unwrap();
        let all_true = stability_map(&[(&[1, 2], 0.6), (&[3, 4], 0.2)]);
        assert_eq!(false_positive_weight(&all_true, &truth, 2), Some(0.0));
        let all_false = stability_map(&[(&[1, 9], 0.6)]);
        assert_eq!(false_positive_weight(&all_false, &truth, 2), Some(1.0));
        let mixed = stability_map(&[(&[1, 2], 0.6), (&[1, 9], 0.2)]);
        assert_abs_diff_eq!(
            false_positive_weight(&mixed, &truth, 2).unwrap(),
            0.25,
            epsilon = 1e-12
        );
        assert_eq!(false_positive_weight(&mixed, &truth, 3), None);
    }
}
