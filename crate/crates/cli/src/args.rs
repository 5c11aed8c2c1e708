use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Stable, high-order interaction discovery with iterative random forests.
#[derive(Debug, Parser)]
#[command(name = "irf", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the pipeline on a training CSV and write interaction artifacts.
    Fit(FitArgs),
    /// Run a named simulation over replicates and tabulate recovery metrics.
    Simulate(SimulateArgs),
    /// Score saved interactions against a saved forest on a dataset.
    Evaluate(EvaluateArgs),
    /// Choose the iteration count by cross-validated AUC-PR.
    SelectK(SelectKArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ForestFlags {
    /// Trees per forest.
    #[arg(long, default_value_t = 500)]
    pub ntree: usize,
    /// Features sampled per split; defaults to ⌊√p⌋.
    #[arg(long)]
    pub mtry: Option<usize>,
    /// Smallest node the growth recursion still splits.
    #[arg(long, default_value_t = 1)]
    pub min_node_size: usize,
    /// Depth cap; unlimited when unset (trees grow to purity).
    #[arg(long)]
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RitFlags {
    /// Number of intersection trees.
    #[arg(long = "rit-m", default_value_t = 500)]
    pub rit_m: usize,
    /// Intersection tree depth.
    #[arg(long = "rit-d", default_value_t = 5)]
    pub rit_d: usize,
    /// Children per non-leaf intersection node.
    #[arg(long = "rit-nchild", default_value_t = 2)]
    pub rit_nchild: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Training CSV (header row; one column is the response).
    #[arg(long)]
    pub train: PathBuf,
    /// Response column name.
    #[arg(long)]
    pub response: String,
    /// Held-out CSV scored with the final forest.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Two-column feature,group CSV collapsing replicate assays.
    #[arg(long)]
    pub grouping: Option<PathBuf>,
    /// Ignore the first CSV column (a row identifier).
    #[arg(long = "id-col", default_value_t = false)]
    pub id_col: bool,
    /// Binarize the response: value ≤ LOW → 0 (requires --binarize-high).
    #[arg(long, requires = "binarize_high")]
    pub binarize_low: Option<f64>,
    /// Binarize the response: value ≥ HIGH → 1; interior rows dropped.
    #[arg(long, requires = "binarize_low")]
    pub binarize_high: Option<f64>,
    /// Re-weighting iterations.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Outer bootstrap replicates.
    #[arg(long, default_value_t = 30)]
    pub b: usize,
    #[command(flatten)]
    pub forest: ForestFlags,
    #[command(flatten)]
    pub rit: RitFlags,
    /// Class whose decision paths feed the intersection search.
    #[arg(long = "class", default_value_t = 1)]
    pub class_of_interest: u8,
    /// Additive weight smoothing for degenerate small-data cases.
    #[arg(long, default_value_t = 0.0)]
    pub weight_epsilon: f64,
    /// Use a stratified train/test split when splitting internally (reserved
    /// for parity with `split`-based workflows; fit itself never splits).
    #[arg(long, hide = true, default_value_t = false)]
    pub stratified: bool,
    /// Master seed; every random draw derives from it.
    #[arg(long)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario name, e.g. sim1-and-n500, sim2-xor8-noise15,
    /// sim3-bigp-p1000-noise20.
    #[arg(long)]
    pub scenario: String,
    /// Independent replicates to average over.
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    /// Sweep iterations k = 1..=k_max.
    #[arg(long = "k-max", default_value_t = 5)]
    pub k_max: usize,
    /// Override the scenario's bootstrap count.
    #[arg(long)]
    pub b: Option<usize>,
    /// Override the scenario's trees per forest.
    #[arg(long)]
    pub ntree: Option<usize>,
    /// Override the scenario's intersection tree count.
    #[arg(long = "rit-m")]
    pub rit_m: Option<usize>,
    /// Override the scenario's intersection tree depth.
    #[arg(long = "rit-d")]
    pub rit_d: Option<usize>,
    /// Override the scenario's children per intersection node.
    #[arg(long = "rit-nchild")]
    pub rit_nchild: Option<usize>,
    /// Write each replicate's train/test CSVs next to the metric tables.
    #[arg(long, default_value_t = false)]
    pub export_data: bool,
    /// Master seed; replicate r derives its own stream.
    #[arg(long)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricFlag {
    AucPr,
    AucRoc,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// forest.json written by `fit`.
    #[arg(long)]
    pub forest: PathBuf,
    /// interactions.json written by `fit`.
    #[arg(long)]
    pub interactions: PathBuf,
    /// Dataset CSV to evaluate on.
    #[arg(long)]
    pub data: PathBuf,
    /// Response column name.
    #[arg(long)]
    pub response: String,
    /// Grouping CSV matching the one used at fit time.
    #[arg(long)]
    pub grouping: Option<PathBuf>,
    /// Ignore the first CSV column (a row identifier).
    #[arg(long = "id-col", default_value_t = false)]
    pub id_col: bool,
    /// Metric both evaluations reduce to.
    #[arg(long, value_enum, default_value_t = MetricFlag::AucPr)]
    pub metric: MetricFlag,
    /// Positive class for the metric.
    #[arg(long = "class", default_value_t = 1)]
    pub class_of_interest: u8,
    /// Permutation repeats averaged per interaction.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelectKArgs {
    /// Training CSV.
    #[arg(long)]
    pub train: PathBuf,
    /// Response column name.
    #[arg(long)]
    pub response: String,
    /// Ignore the first CSV column (a row identifier).
    #[arg(long = "id-col", default_value_t = false)]
    pub id_col: bool,
    /// Largest iteration count considered.
    #[arg(long = "k-max", default_value_t = 5)]
    pub k_max: usize,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[command(flatten)]
    pub forest: ForestFlags,
    /// Class scored by AUC-PR.
    #[arg(long = "class", default_value_t = 1)]
    pub class_of_interest: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Optional output directory for the per-fold score table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
