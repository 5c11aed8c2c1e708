//! Iterative random forests for stable high-order interaction discovery.
//!
//! The crate fits feature-weighted random forests on binary-classification
//! data, re-weights features over several iterations by Gini importance,
//! decodes the final ensemble's decision paths with random intersection
//! trees, and scores the surviving feature sets for stability across outer
//! bootstrap replicates. Companion modules provide the prediction and
//! interaction-evaluation metrics and the simulation generators used to
//! validate recovery behaviour.

pub mod data;
pub mod error;
pub mod forest;
pub mod irf;
pub mod metrics;
pub mod rit;
pub mod rng;
pub mod simgen;
pub mod tree;

pub use data::{Dataset, FeatureGrouping, SplitSpec};
pub use error::{Error, Result};
pub use forest::{Forest, ForestParams};
pub use irf::{IrfParams, IrfResult};
pub use metrics::{ScoredLabels, TruthSet};
pub use rit::{Interaction, RitParams, Transaction};
pub use tree::{DecisionTree, TreeParams, WeightVector};
