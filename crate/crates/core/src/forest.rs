//! Feature-weighted random forests: bagged ensembles of weighted trees with
//! vote-averaged probability prediction and aggregated Gini importance.
//!
//! Per-tree RNG streams are derived from the master seed and the tree index,
//! so fitting is deterministic under any thread scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng;
use crate::tree::{self, DecisionTree, TreeParams, WeightVector};

pub const FOREST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub ntree: usize,
    pub tree: TreeParams,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { ntree: 500, tree: TreeParams::default(), seed: 0 }
    }
}

/// A fitted ensemble. Immutable; trees may be queried concurrently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    version: u32,
    params: ForestParams,
    feature_names: Vec<String>,
    n_train: usize,
    trees: Vec<DecisionTree>,
    /// Per tree, how many times each training row entered its bootstrap.
    multiplicities: Vec<Vec<u32>>,
}

/// Fits `ntree` weighted trees, each on an independent bootstrap of the data.
pub fn fit(dataset: &Dataset, weights: &WeightVector, params: &ForestParams) -> Result<Forest> {
    if params.ntree == 0 {
        return Err(Error::InvalidParameter("ntree must be ≥ 1".into()));
    }
    if dataset.n_rows() < 2 {
        return Err(Error::EmptyDataset("forest fitting needs at least 2 rows".into()));
    }
    if weights.len() != dataset.n_features() {
        return Err(Error::DimensionMismatch {
            expected: dataset.n_features(),
            got: weights.len(),
        });
    }
    params.tree.resolve_mtry(dataset.n_features())?;

    let n = dataset.n_rows();
    let fitted: Result<Vec<(DecisionTree, Vec<u32>)>> = (0..params.ntree)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::rng_for(params.seed, rng::stream::TREE, i as u64);
            let mut mult = vec![0u32; n];
            let mut rows = Vec::with_capacity(n);
            for _ in 0..n {
                let r = rand::Rng::random_range(&mut rng, 0..n);
                mult[r] += 1;
                rows.push(r as u32);
            }
            let tree = tree::grow_from_rows(dataset, rows, weights, &params.tree, &mut rng)?;
            Ok((tree, mult))
        })
        .collect();

    let (trees, multiplicities): (Vec<_>, Vec<_>) = fitted?.into_iter().unzip();
    Ok(Forest {
        version: FOREST_FORMAT_VERSION,
        params: *params,
        feature_names: dataset.feature_names().to_vec(),
        n_train: n,
        trees,
        multiplicities,
    })
}

impl Forest {
    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn ntree(&self) -> usize {
        self.trees.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn multiplicities(&self) -> &[Vec<u32>] {
        &self.multiplicities
    }

    /// Per-row fraction of trees voting label 1. Values are multiples of
    /// 1/ntree.
    pub fn predict_proba(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                got: data.n_features(),
            });
        }
        let t = self.trees.len() as f64;
        Ok((0..data.n_rows())
            .map(|i| {
                let votes: u32 =
                    self.trees.iter().map(|tr| u32::from(tr.predict_row(|j| data.value(i, j)))).sum();
                votes as f64 / t
            })
            .collect())
    }

    /// Mean over trees of per-tree Gini importance. May be all-zero when every
    /// tree is a single leaf; validate before reuse as sampling weights.
    pub fn importance(&self) -> Vec<f64> {
        let p = self.n_features();
        let mut total = vec![0.0; p];
        for tree in &self.trees {
            for (j, v) in tree.importance().into_iter().enumerate() {
                total[j] += v;
            }
        }
        let t = self.trees.len() as f64;
        for v in &mut total {
            *v /= t;
        }
        total
    }

    /// Out-of-bag misclassification rate: each row is voted on only by trees
    /// whose bootstrap excluded it. `None` when no row has an OOB vote.
    pub fn oob_error(&self, dataset: &Dataset) -> Result<Option<f64>> {
        if dataset.n_rows() != self.n_train {
            return Err(Error::InvalidParameter(
                "oob_error expects the training dataset".into(),
            ));
        }
        let mut wrong = 0usize;
        let mut scored = 0usize;
        for i in 0..dataset.n_rows() {
            let mut votes = [0u32; 2];
            for (t, tree) in self.trees.iter().enumerate() {
                if self.multiplicities[t][i] == 0 {
                    votes[tree.predict_row(|j| dataset.value(i, j)) as usize] += 1;
                }
            }
            if votes[0] + votes[1] == 0 {
                continue;
            }
            scored += 1;
            let pred = u8::from(votes[1] > votes[0]);
            if pred != dataset.labels()[i] {
                wrong += 1;
            }
        }
        Ok((scored > 0).then(|| wrong as f64 / scored as f64))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("forest serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Forest> {
        let forest: Forest =
            serde_json::from_str(json).map_err(|e| Error::Schema(format!("forest json: {e}")))?;
        if forest.version != FOREST_FORMAT_VERSION {
            return Err(Error::Schema(format!(
                "forest format version {} unsupported (expected {})",
                forest.version, FOREST_FORMAT_VERSION
            )));
        }
        Ok(forest)
    }
}
