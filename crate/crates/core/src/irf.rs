//! The full iterative pipeline: K-step feature re-weighting, generalized RIT
//! over forest decision paths, B outer bootstraps, and stability scores.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{self, Dataset, FeatureGrouping};
use crate::error::{Error, Result};
use crate::forest::{self, Forest, ForestParams};
use crate::metrics::{self, ScoredLabels};
use crate::rit::{self, Interaction, RitParams, Transaction};
use crate::rng;
use crate::tree::WeightVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfParams {
    /// Re-weighting iterations K ≥ 1.
    pub k: usize,
    /// Outer bootstrap replicates B ≥ 1.
    pub b: usize,
    pub forest: ForestParams,
    pub rit: RitParams,
    /// Class whose leaves feed RIT.
    pub class_of_interest: u8,
    /// Feature grouping applied before intersection; identity when absent.
    pub grouping: Option<FeatureGrouping>,
    pub seed: u64,
    /// Additive smoothing for re-weighting; 0 keeps zero-importance features
    /// excluded from later iterations.
    pub weight_epsilon: f64,
}

impl Default for IrfParams {
    fn default() -> Self {
        IrfParams {
            k: 5,
            b: 30,
            forest: ForestParams::default(),
            rit: RitParams::default(),
            class_of_interest: 1,
            grouping: None,
            seed: 0,
            weight_epsilon: 0.0,
        }
    }
}

impl IrfParams {
    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be ≥ 1".into()));
        }
        if self.b == 0 {
            return Err(Error::InvalidParameter("b must be ≥ 1".into()));
        }
        if self.class_of_interest > 1 {
            return Err(Error::InvalidParameter("class_of_interest must be 0 or 1".into()));
        }
        if !(self.weight_epsilon >= 0.0 && self.weight_epsilon.is_finite()) {
            return Err(Error::InvalidParameter("weight_epsilon must be finite and ≥ 0".into()));
        }
        Ok(())
    }
}

/// Everything a fit produces: the weight trajectory, the final full-data
/// forest, per-bootstrap interaction sets, and the stability map.
#[derive(Debug, Clone)]
pub struct IrfResult {
    /// w^(1)…w^(K+1): the uniform start plus each iteration's importance.
    pub weights_per_iteration: Vec<Vec<f64>>,
    /// The iteration-K forest fitted on the full training data.
    pub final_forest: Forest,
    pub per_bootstrap_interactions: Vec<BTreeSet<Interaction>>,
    /// Interaction → fraction of bootstraps returning it.
    pub stability: BTreeMap<Interaction, f64>,
    /// Final-forest scores on the held-out data, when provided.
    pub test_scores: Option<Vec<f64>>,
}

/// One transaction per (training row, tree) pair: each leaf's path set is
/// emitted with multiplicity equal to the leaf's training count, items mapped
/// through the grouping, labelled with the leaf's predicted label.
pub fn extract_transactions(forest: &Forest, grouping: &FeatureGrouping) -> Vec<Transaction> {
    let mut out = Vec::with_capacity(forest.n_train() * forest.ntree());
    for tree in forest.trees() {
        for leaf in tree.leaf_paths() {
            let mut items: Vec<u32> =
                leaf.features.iter().map(|&f| grouping.group_of(f) as u32).collect();
            items.sort_unstable();
            items.dedup();
            let tx = Transaction::new(items, leaf.label);
            for _ in 0..leaf.count {
                out.push(tx.clone());
            }
        }
    }
    out
}

fn weights_from_importance(importance: &[f64], epsilon: f64, iteration: usize) -> Result<WeightVector> {
    let values: Vec<f64> = importance.iter().map(|v| v + epsilon).collect();
    WeightVector::new(values).map_err(|_| Error::DegenerateImportance { iteration })
}

fn check_two_classes(dataset: &Dataset) -> Result<()> {
    let ones = dataset.labels().iter().filter(|&&y| y == 1).count();
    if ones == 0 || ones == dataset.n_rows() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Runs the full pipeline on the training data. See [`fit_with_test`] to also
/// score a held-out set with the final forest.
pub fn fit(train: &Dataset, params: &IrfParams) -> Result<IrfResult> {
    fit_with_test(train, None, params)
}

pub fn fit_with_test(
    train: &Dataset,
    test: Option<&Dataset>,
    params: &IrfParams,
) -> Result<IrfResult> {
    params.validate()?;
    check_two_classes(train)?;
    let p = train.n_features();
    let grouping = params
        .grouping
        .clone()
        .unwrap_or_else(|| FeatureGrouping::identity(train.feature_names()));
    if grouping.n_features() != p {
        return Err(Error::Grouping(format!(
            "grouping covers {} features, dataset has {}",
            grouping.n_features(),
            p
        )));
    }

    // Step 1: iterate K feature-weighted forests on the full data, feeding
    // each iteration's Gini importance forward as the next weight vector.
    let mut weights_per_iteration: Vec<Vec<f64>> = Vec::with_capacity(params.k + 1);
    let mut w = WeightVector::uniform(p);
    weights_per_iteration.push(w.values().to_vec());
    let mut final_forest: Option<Forest> = None;
    for k in 1..=params.k {
        let forest_params = ForestParams {
            seed: rng::derive_seed(params.seed, rng::stream::ITERATION, k as u64),
            ..params.forest
        };
        let forest = forest::fit(train, &w, &forest_params)?;
        let importance = forest.importance();
        if k == params.k {
            final_forest = Some(forest);
        }
        let next = weights_from_importance(&importance, params.weight_epsilon, k)?;
        weights_per_iteration.push(next.values().to_vec());
        if k < params.k {
            w = next;
        }
    }
    let final_forest = final_forest.expect("k ≥ 1 fits at least one forest");
    // Bootstraps re-use w^(K), the weight vector the final iteration was
    // fitted with (the trajectory's second-to-last entry).
    let boot_weights = WeightVector::new(weights_per_iteration[params.k - 1].clone())
        .map_err(|_| Error::DegenerateImportance { iteration: params.k - 1 })?;

    // Step 2: B outer bootstraps, each refitting at w^(K) and running RIT on
    // the class-of-interest decision paths.
    let per_bootstrap: Result<Vec<BTreeSet<Interaction>>> = (0..params.b)
        .into_par_iter()
        .map(|b| {
            let boot_seed = rng::derive_seed(params.seed, rng::stream::BOOTSTRAP_ROWS, b as u64);
            let boot = data::bootstrap(train, boot_seed)?;
            let forest_params = ForestParams {
                seed: rng::derive_seed(params.seed, rng::stream::BOOTSTRAP_FOREST, b as u64),
                ..params.forest
            };
            let forest = forest::fit(&boot, &boot_weights, &forest_params)?;
            let transactions = extract_transactions(&forest, &grouping);
            let rit_params = RitParams {
                seed: rng::derive_seed(params.seed, rng::stream::RIT_RUN, b as u64),
                ..params.rit
            };
            match rit::run(&transactions, params.class_of_interest, &rit_params) {
                Ok(set) => Ok(set),
                // A bootstrap whose forest has no leaves of the target class
                // contributes an empty interaction set.
                Err(Error::EmptyClass(_)) => Ok(BTreeSet::new()),
                Err(e) => Err(e),
            }
        })
        .collect();
    let per_bootstrap = per_bootstrap?;

    // Step 3: stability = fraction of bootstraps returning each interaction.
    let mut stability: BTreeMap<Interaction, f64> = BTreeMap::new();
    for set in &per_bootstrap {
        for s in set {
            *stability.entry(s.clone()).or_insert(0.0) += 1.0;
        }
    }
    for v in stability.values_mut() {
        *v /= params.b as f64;
    }

    let test_scores = match test {
        Some(t) => Some(final_forest.predict_proba(t)?),
        None => None,
    };

    Ok(IrfResult {
        weights_per_iteration,
        final_forest,
        per_bootstrap_interactions: per_bootstrap,
        stability,
        test_scores,
    })
}

/// Chooses K ∈ 1..=k_max by cross-validated AUC-PR of the iteration-K forest,
/// breaking ties toward smaller K. One weight trajectory is fitted per fold;
/// iteration k's forest scores the held-out fold for candidate K=k.
pub fn select_k(
    train: &Dataset,
    k_max: usize,
    folds: usize,
    params: &IrfParams,
) -> Result<SelectKReport> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be ≥ 1".into()));
    }
    if folds < 2 {
        return Err(Error::InvalidParameter("cross-validation needs ≥ 2 folds".into()));
    }
    check_two_classes(train)?;
    let n = train.n_rows();
    if folds > n {
        return Err(Error::InvalidParameter(format!("{folds} folds for {n} rows")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    {
        use rand::seq::SliceRandom;
        let mut rng = rng::rng_for(params.seed, rng::stream::CV, 0);
        order.shuffle(&mut rng);
    }
    let assignments: Vec<usize> = {
        let mut a = vec![0usize; n];
        for (pos, &row) in order.iter().enumerate() {
            a[row] = pos % folds;
        }
        a
    };

    let fold_scores: Result<Vec<Vec<f64>>> = (0..folds)
        .into_par_iter()
        .map(|fold| {
            let train_rows: Vec<usize> =
                (0..n).filter(|&i| assignments[i] != fold).collect();
            let eval_rows: Vec<usize> = (0..n).filter(|&i| assignments[i] == fold).collect();
            let fold_train = train.subset(&train_rows)?;
            let fold_eval = train.subset(&eval_rows)?;
            let two = |d: &Dataset| {
                let ones = d.labels().iter().filter(|&&y| y == 1).count();
                ones > 0 && ones < d.n_rows()
            };
            if !two(&fold_train) || !fold_eval.labels().iter().any(|&y| y == params.class_of_interest)
            {
                return Err(Error::SingleClassFold(fold));
            }

            let mut w = WeightVector::uniform(train.n_features());
            let mut scores = Vec::with_capacity(k_max);
            for k in 1..=k_max {
                let forest_params = ForestParams {
                    seed: rng::derive_seed(
                        params.seed,
                        rng::stream::CV,
                        (1 + fold * k_max + k) as u64,
                    ),
                    ..params.forest
                };
                let forest = forest::fit(&fold_train, &w, &forest_params)?;
                let proba = forest.predict_proba(&fold_eval)?;
                let oriented: Vec<f64> = if params.class_of_interest == 1 {
                    proba
                } else {
                    proba.iter().map(|p| 1.0 - p).collect()
                };
                let scored = ScoredLabels::new(
                    oriented,
                    fold_eval.labels().to_vec(),
                    params.class_of_interest,
                )?;
                scores.push(metrics::auc_pr(&scored)?);
                if k < k_max {
                    w = weights_from_importance(&forest.importance(), params.weight_epsilon, k)?;
                }
            }
            Ok(scores)
        })
        .collect();
    let fold_scores = fold_scores?;

    let mean_by_k: Vec<f64> = (0..k_max)
        .map(|ki| fold_scores.iter().map(|f| f[ki]).sum::<f64>() / folds as f64)
        .collect();
    let mut chosen = 1usize;
    for k in 2..=k_max {
        if mean_by_k[k - 1] > mean_by_k[chosen - 1] {
            chosen = k;
        }
    }
    Ok(SelectKReport { chosen_k: chosen, mean_auc_pr_by_k: mean_by_k, fold_auc_pr: fold_scores })
}

/// Cross-validation outcome for K selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectKReport {
    pub chosen_k: usize,
    pub mean_auc_pr_by_k: Vec<f64>,
    /// Row per fold, column per k.
    pub fold_auc_pr: Vec<Vec<f64>>,
}

/// Drops interactions that are a strict subset of another interaction whose
/// stability is at least `min_superset_stability` (display pruning only).
pub fn prune_subsets(
    stability: &BTreeMap<Interaction, f64>,
    min_superset_stability: f64,
) -> BTreeMap<Interaction, f64> {
    stability
        .iter()
        .filter(|(s, _)| {
            !stability.iter().any(|(other, &sta)| {
                sta >= min_superset_stability
                    && other.order() > s.order()
                    && s.is_subset_of(other.items())
            })
        })
        .map(|(s, &v)| (s.clone(), v))
        .collect()
}
