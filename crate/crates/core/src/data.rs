//! Dataset representation, CSV ingestion, response binarization, splitting,
//! bootstrap resampling, and feature grouping.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// A binary-classification dataset: an n×p matrix of finite reals with named
/// columns and a 0/1 label per row. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    feature_names: Vec<String>,
    labels: Vec<u8>,
}

impl Dataset {
    /// Builds a dataset from column-major features, validating the invariants:
    /// n ≥ 1, p ≥ 1, finite entries, labels in {0,1}, distinct names.
    pub fn new(columns: Vec<Vec<f64>>, feature_names: Vec<String>, labels: Vec<u8>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyDataset("no feature columns".into()));
        }
        if labels.is_empty() {
            return Err(Error::EmptyDataset("no rows".into()));
        }
        if feature_names.len() != columns.len() {
            return Err(Error::InvalidParameter(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                columns.len()
            )));
        }
        let n = labels.len();
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "column {} has {} rows, labels have {}",
                    j,
                    col.len(),
                    n
                )));
            }
            for (i, v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteCell { row: i, col: j });
                }
            }
        }
        let mut seen = HashMap::new();
        for name in &feature_names {
            if seen.insert(name.clone(), ()).is_some() {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        for (i, &y) in labels.iter().enumerate() {
            if y > 1 {
                return Err(Error::NonBinaryResponse { row: i, value: y as f64 });
            }
        }
        Ok(Dataset { columns, feature_names, labels })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    pub fn column(&self, col: usize) -> &[f64] {
        &self.columns[col]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// Fraction of rows with label 1.
    pub fn class1_prevalence(&self) -> f64 {
        let ones = self.labels.iter().filter(|&&y| y == 1).count();
        ones as f64 / self.labels.len() as f64
    }

    /// Gathers the given rows (repeats allowed) into a new dataset.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset("row subset is empty".into()));
        }
        let columns = self
            .columns
            .iter()
            .map(|col| rows.iter().map(|&r| col[r]).collect())
            .collect();
        let labels = rows.iter().map(|&r| self.labels[r]).collect();
        Dataset::new(columns, self.feature_names.clone(), labels)
    }

    /// Returns a copy with the label vector replaced.
    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Self> {
        Dataset::new(self.columns.clone(), self.feature_names.clone(), labels)
    }
}

/// Maps each feature to a group ("super feature") collapsed before taking
/// random intersections. Identity when no grouping file is supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureGrouping {
    group_of: Vec<usize>,
    group_names: Vec<String>,
}

impl FeatureGrouping {
    pub fn new(group_of: Vec<usize>, group_names: Vec<String>) -> Result<Self> {
        let g = group_names.len();
        if g == 0 {
            return Err(Error::Grouping("no groups".into()));
        }
        let mut used = vec![false; g];
        for &idx in &group_of {
            if idx >= g {
                return Err(Error::Grouping(format!("group index {} out of range", idx)));
            }
            used[idx] = true;
        }
        if used.iter().any(|u| !u) {
            return Err(Error::Grouping("group indices are not contiguous from 0".into()));
        }
        let mut seen = HashMap::new();
        for name in &group_names {
            if seen.insert(name.clone(), ()).is_some() {
                return Err(Error::Grouping(format!("duplicate group name {:?}", name)));
            }
        }
        Ok(FeatureGrouping { group_of, group_names })
    }

    /// One group per feature, named after the feature.
    pub fn identity(feature_names: &[String]) -> Self {
        FeatureGrouping {
            group_of: (0..feature_names.len()).collect(),
            group_names: feature_names.to_vec(),
        }
    }

    pub fn group_of(&self, feature: usize) -> usize {
        self.group_of[feature]
    }

    pub fn n_features(&self) -> usize {
        self.group_of.len()
    }

    pub fn n_groups(&self) -> usize {
        self.group_names.len()
    }

    pub fn group_names(&self) -> &[String] {
        &self.group_names
    }

    pub fn group_index(&self, name: &str) -> Option<usize> {
        self.group_names.iter().position(|n| n == name)
    }
}

/// Train/test split parameters. Stratification preserves class proportions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "train fraction must lie strictly in (0,1), got {}",
                train_fraction
            )));
        }
        Ok(SplitSpec { train_fraction, seed, stratified: false })
    }

    pub fn stratified(mut self) -> Self {
        self.stratified = true;
        self
    }
}

/// Options for CSV ingestion.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Ignore the first column (a row identifier).
    pub skip_id_column: bool,
    /// Binarize the response: value ≥ high → 1, ≤ low → 0, interior rows dropped.
    pub binarize: Option<(f64, f64)>,
}

/// Loads a dataset from a UTF-8, comma-separated file with a header row.
/// All cells are parsed as 64-bit floats; the response column must contain
/// only 0/1 unless binarization thresholds are supplied.
pub fn load_csv(path: impl AsRef<Path>, response_column: &str) -> Result<Dataset> {
    load_csv_with(path, response_column, &LoadOptions::default())
}

pub fn load_csv_with(
    path: impl AsRef<Path>,
    response_column: &str,
    opts: &LoadOptions,
) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path.display().to_string(), std::io::Error::other(e.to_string())),
            _ => Error::Csv(e.to_string()),
        })?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    let start = usize::from(opts.skip_id_column);
    if headers.len() <= start {
        return Err(Error::Csv("header row has no data columns".into()));
    }
    let headers = &headers[start..];

    let mut seen = HashMap::new();
    for h in headers {
        if seen.insert(h.clone(), ()).is_some() {
            return Err(Error::DuplicateColumn(h.clone()));
        }
    }
    let response_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| Error::ResponseColumnNotFound(response_column.to_string()))?;

    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != response_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); feature_names.len()];
    let mut response: Vec<f64> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        if record.len() != headers.len() + start {
            return Err(Error::Csv(format!(
                "row {} has {} fields, expected {}",
                row,
                record.len(),
                headers.len() + start
            )));
        }
        let mut feat_j = 0;
        for (j, cell) in record.iter().skip(start).enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::NonNumericCell {
                row,
                col: j + start,
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteCell { row, col: j + start });
            }
            if j == response_idx {
                response.push(value);
            } else {
                columns[feat_j].push(value);
                feat_j += 1;
            }
        }
    }
    if response.is_empty() {
        return Err(Error::EmptyDataset(format!("{} has no data rows", path.display())));
    }

    let labels: Vec<u8> = match opts.binarize {
        Some((low, high)) => {
            let (labels, mask) = binarize_response(&response, low, high)?;
            let kept: Vec<usize> = mask
                .iter()
                .enumerate()
                .filter(|(_, &keep)| keep)
                .map(|(i, _)| i)
                .collect();
            if kept.is_empty() {
                return Err(Error::EmptyDataset("binarization dropped every row".into()));
            }
            columns = columns
                .into_iter()
                .map(|col| kept.iter().map(|&i| col[i]).collect())
                .collect();
            labels
        }
        None => {
            let mut labels = Vec::with_capacity(response.len());
            for (i, &v) in response.iter().enumerate() {
                if v == 0.0 {
                    labels.push(0);
                } else if v == 1.0 {
                    labels.push(1);
                } else {
                    return Err(Error::NonBinaryResponse { row: i, value: v });
                }
            }
            labels
        }
    };

    Dataset::new(columns, feature_names, labels)
}

/// Writes the dataset as CSV with the response in a trailing column.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>, response_column: &str) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e.to_string())))?;
    let mut header: Vec<String> = dataset.feature_names.to_vec();
    header.push(response_column.to_string());
    writer.write_record(&header).map_err(|e| Error::Csv(e.to_string()))?;
    for i in 0..dataset.n_rows() {
        let mut record: Vec<String> = Vec::with_capacity(dataset.n_features() + 1);
        for j in 0..dataset.n_features() {
            record.push(format_cell(dataset.value(i, j)));
        }
        record.push(format!("{}", dataset.labels[i]));
        writer.write_record(&record).map_err(|e| Error::Csv(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Shortest decimal form that round-trips the f64 exactly.
fn format_cell(v: f64) -> String {
    let mut buf = ryu_format(v);
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_format(v: f64) -> String {
    // `{}` on f64 is the shortest representation that parses back exactly.
    format!("{}", v)
}

/// Thresholds continuous responses: value ≥ high → 1, value ≤ low → 0.
/// Interior rows get no label; the mask marks kept rows and the returned
/// labels cover kept rows only, in order.
pub fn binarize_response(values: &[f64], low: f64, high: f64) -> Result<(Vec<u8>, Vec<bool>)> {
    if low >= high {
        return Err(Error::InvalidParameter(format!(
            "binarization thresholds must satisfy low < high, got {} >= {}",
            low, high
        )));
    }
    let mut labels = Vec::new();
    let mut mask = Vec::with_capacity(values.len());
    for &v in values {
        if v >= high {
            labels.push(1);
            mask.push(true);
        } else if v <= low {
            labels.push(0);
            mask.push(true);
        } else {
            mask.push(false);
        }
    }
    Ok((labels, mask))
}

/// Splits into disjoint, exhaustive train/test partitions. Deterministic for
/// a fixed seed; uniform by default, stratified by class when requested.
pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let n = dataset.n_rows();
    let mut rng = rng::rng_for(spec.seed, rng::stream::SPLIT, 0);
    let (train_rows, test_rows) = if spec.stratified {
        let mut train_rows = Vec::new();
        let mut test_rows = Vec::new();
        for class in [0u8, 1u8] {
            let mut rows: Vec<usize> = (0..n).filter(|&i| dataset.labels[i] == class).collect();
            rows.shuffle(&mut rng);
            let k = (spec.train_fraction * rows.len() as f64).floor() as usize;
            train_rows.extend_from_slice(&rows[..k]);
            test_rows.extend_from_slice(&rows[k..]);
        }
        train_rows.sort_unstable();
        test_rows.sort_unstable();
        (train_rows, test_rows)
    } else {
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        let k = (spec.train_fraction * n as f64).floor() as usize;
        let (a, b) = rows.split_at(k.min(n));
        let mut train_rows = a.to_vec();
        let mut test_rows = b.to_vec();
        train_rows.sort_unstable();
        test_rows.sort_unstable();
        (train_rows, test_rows)
    };
    if train_rows.is_empty() || test_rows.is_empty() {
        return Err(Error::EmptyPartition { fraction: spec.train_fraction, n });
    }
    Ok((dataset.subset(&train_rows)?, dataset.subset(&test_rows)?))
}

/// Resamples n rows uniformly with replacement. Deterministic per seed.
pub fn bootstrap(dataset: &Dataset, seed: u64) -> Result<Dataset> {
    let rows = bootstrap_rows(dataset.n_rows(), seed);
    dataset.subset(&rows)
}

/// The row indices a bootstrap with this seed draws.
pub fn bootstrap_rows(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng::rng_for(seed, rng::stream::BOOTSTRAP_ROWS, 0);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Loads a two-column `feature,group` CSV mapping every feature name to a
/// group term. Every dataset feature must appear exactly once.
pub fn load_grouping(path: impl AsRef<Path>, feature_names: &[String]) -> Result<FeatureGrouping> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path.display().to_string(), std::io::Error::other(e.to_string())),
            _ => Error::Csv(e.to_string()),
        })?;

    let mut mapping: HashMap<String, String> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        if record.len() < 2 {
            return Err(Error::Grouping("grouping rows need two columns: feature,group".into()));
        }
        let feature = record[0].trim().to_string();
        let group = record[1].trim().to_string();
        if mapping.insert(feature.clone(), group).is_some() {
            return Err(Error::Grouping(format!("duplicate grouping row for feature {:?}", feature)));
        }
    }

    let missing: Vec<&String> =
        feature_names.iter().filter(|name| !mapping.contains_key(*name)).collect();
    if !missing.is_empty() {
        return Err(Error::Grouping(format!(
            "grouping file is missing features: {}",
            missing.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        )));
    }
    let unknown: Vec<&String> =
        mapping.keys().filter(|name| !feature_names.contains(name)).collect();
    if !unknown.is_empty() {
        let mut names: Vec<&str> = unknown.iter().map(|s| s.as_str()).collect();
        names.sort_unstable();
        return Err(Error::Grouping(format!("grouping file names unknown features: {}", names.join(", "))));
    }

    // Group indices in order of first appearance over the dataset's features.
    let mut group_names: Vec<String> = Vec::new();
    let mut group_of = Vec::with_capacity(feature_names.len());
    for name in feature_names {
        let term = &mapping[name];
        let idx = match group_names.iter().position(|g| g == term) {
            Some(idx) => idx,
            None => {
                group_names.push(term.clone());
                group_names.len() - 1
            }
        };
        group_of.push(idx);
    }
    FeatureGrouping::new(group_of, group_names)
}
