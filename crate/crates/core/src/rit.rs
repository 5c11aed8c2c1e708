//! Random intersection trees: a randomized search for feature-index sets
//! prevalent in one class of binary transactions.
//!
//! Each of M trees takes D-fold intersections of uniformly sampled class-C
//! item sets along a breadth-first tree with `n_child` children per node;
//! nonempty depth-D survivors are collected and deduplicated. Optional
//! prevalence thresholds filter the survivors afterwards.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// An (item set, label) pair: the unit RIT intersects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    items: Vec<u32>,
    label: u8,
}

impl Transaction {
    /// Items are sorted and deduplicated; the set may be empty.
    pub fn new(mut items: Vec<u32>, label: u8) -> Self {
        items.sort_unstable();
        items.dedup();
        Transaction { items, label }
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    pub fn label(&self) -> u8 {
        self.label
    }

    /// Line form `label:idx,idx,…` (empty item list allowed).
    pub fn to_line(&self) -> String {
        let items: Vec<String> = self.items.iter().map(|i| i.to_string()).collect();
        format!("{}:{}", self.label, items.join(","))
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let (label, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::Csv(format!("transaction line missing ':': {line:?}")))?;
        let label: u8 = label
            .trim()
            .parse()
            .map_err(|_| Error::Csv(format!("bad transaction label: {line:?}")))?;
        if label > 1 {
            return Err(Error::Csv(format!("transaction label must be 0/1: {line:?}")));
        }
        let mut items = Vec::new();
        for tok in rest.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            items.push(
                tok.parse::<u32>()
                    .map_err(|_| Error::Csv(format!("bad transaction item {tok:?}")))?,
            );
        }
        Ok(Transaction::new(items, label))
    }
}

/// A nonempty, sorted, duplicate-free set of feature-group indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Interaction {
    items: Vec<u32>,
}

impl Interaction {
    pub fn new(mut items: Vec<u32>) -> Result<Self> {
        items.sort_unstable();
        items.dedup();
        if items.is_empty() {
            return Err(Error::InvalidParameter("interaction must be nonempty".into()));
        }
        Ok(Interaction { items })
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    /// Interaction order (number of distinct indices).
    pub fn order(&self) -> usize {
        self.items.len()
    }

    pub fn is_subset_of(&self, other: &[u32]) -> bool {
        is_subset(&self.items, other)
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.items.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// RIT tuning parameters: M trees of depth D with n_child children per
/// non-leaf node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RitParams {
    pub m: usize,
    pub depth: usize,
    pub n_child: usize,
    pub seed: u64,
}

impl Default for RitParams {
    fn default() -> Self {
        RitParams { m: 500, depth: 5, n_child: 2, seed: 0 }
    }
}

impl RitParams {
    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.depth == 0 || self.n_child == 0 {
            return Err(Error::InvalidParameter(
                "rit parameters m, depth, n_child must all be ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

/// Fraction of class-`class_label` transactions whose item set contains
/// `items`. The empty set is contained everywhere, so its prevalence is 1.
pub fn prevalence(items: &[u32], transactions: &[Transaction], class_label: u8) -> Result<f64> {
    let mut class_count = 0usize;
    let mut containing = 0usize;
    for t in transactions {
        if t.label == class_label {
            class_count += 1;
            if is_subset(items, &t.items) {
                containing += 1;
            }
        }
    }
    if class_count == 0 {
        return Err(Error::EmptyClass(class_label));
    }
    Ok(containing as f64 / class_count as f64)
}

/// `a ⊆ b` for sorted, deduplicated slices.
pub(crate) fn is_subset(a: &[u32], b: &[u32]) -> bool {
    let mut bi = 0usize;
    'outer: for &x in a {
        while bi < b.len() {
            if b[bi] == x {
                bi += 1;
                continue 'outer;
            }
            if b[bi] > x {
                return false;
            }
            bi += 1;
        }
        return false;
    }
    true
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Runs RIT over the class-`class_label` transactions: the union over M trees
/// of nonempty depth-D leaf intersections, deduplicated. Deterministic per
/// seed; the M trees run independently and may execute concurrently.
pub fn run(
    transactions: &[Transaction],
    class_label: u8,
    params: &RitParams,
) -> Result<BTreeSet<Interaction>> {
    params.validate()?;
    let pool: Vec<&Transaction> =
        transactions.iter().filter(|t| t.label == class_label).collect();
    if pool.is_empty() {
        return Err(Error::EmptyClass(class_label));
    }

    let per_tree: Vec<BTreeSet<Interaction>> = (0..params.m)
        .into_par_iter()
        .map(|m| {
            let mut rng = rng::rng_for(params.seed, rng::stream::RIT_TREE, m as u64);
            let mut out = BTreeSet::new();
            // Breadth-first: each node draws one uniform class-C transaction
            // and intersects it with its parent's set. Empty intersections
            // prune their subtree (all descendants would also be empty).
            let root = pool[rng.random_range(0..pool.len())].items.clone();
            let mut frontier = vec![root];
            for _depth in 1..=params.depth {
                let mut next = Vec::with_capacity(frontier.len() * params.n_child);
                for parent in &frontier {
                    if parent.is_empty() {
                        continue;
                    }
                    for _ in 0..params.n_child {
                        let draw = &pool[rng.random_range(0..pool.len())];
                        let s = intersect_sorted(parent, &draw.items);
                        if !s.is_empty() {
                            next.push(s);
                        }
                    }
                }
                frontier = next;
                if frontier.is_empty() {
                    break;
                }
            }
            for items in frontier {
                out.insert(Interaction { items });
            }
            out
        })
        .collect();

    let mut union = BTreeSet::new();
    for set in per_tree {
        union.extend(set);
    }
    Ok(union)
}

/// Keeps candidates with class-1 prevalence ≥ `theta1` and class-0 prevalence
/// ≤ `theta0`. Both thresholds must lie in [0,1]; θ0 < θ1 is the meaningful
/// regime but looser settings are allowed so the filter can be made vacuous.
/// A class with no transactions contributes prevalence 0.
pub fn filter(
    candidates: &BTreeSet<Interaction>,
    transactions: &[Transaction],
    theta1: f64,
    theta0: f64,
) -> Result<BTreeSet<Interaction>> {
    if !(0.0..=1.0).contains(&theta0) || !(0.0..=1.0).contains(&theta1) {
        return Err(Error::InvalidParameter(format!(
            "prevalence thresholds must lie in [0,1], got θ0={theta0}, θ1={theta1}"
        )));
    }
    let has_class = |c: u8| transactions.iter().any(|t| t.label == c);
    let classes = (has_class(0), has_class(1));
    let mut kept = BTreeSet::new();
    for s in candidates {
        let p1 = if classes.1 { prevalence(s.items(), transactions, 1)? } else { 0.0 };
        let p0 = if classes.0 { prevalence(s.items(), transactions, 0)? } else { 0.0 };
        if p1 >= theta1 && p0 <= theta0 {
            kept.insert(s.clone());
        }
    }
    Ok(kept)
}

/// Writes transactions one per line in the `label:idx,idx,…` form.
pub fn write_transactions(transactions: &[Transaction]) -> String {
    let mut out = String::new();
    for t in transactions {
        out.push_str(&t.to_line());
        out.push('\n');
    }
    out
}

pub fn read_transactions(text: &str) -> Result<Vec<Transaction>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(Transaction::parse_line)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tx(items: &[u32], label: u8) -> Transaction {
        Transaction::new(items.to_vec(), label)
    }

    fn interaction(items: &[u32]) -> Interaction {
        Interaction::new(items.to_vec()).unwrap()
    }

    #[test]
    fn prevalence_empty_set_is_one() {
        let ts = vec![tx(&[1], 1), tx(&[2], 1)];
        assert_eq!(prevalence(&[], &ts, 1).unwrap(), 1.0);
    }

    #[test]
    fn prevalence_direct_count() {
        let ts = vec![tx(&[1, 2], 1), tx(&[2], 1), tx(&[1, 2], 0)];
        assert_eq!(prevalence(&[1, 2], &ts, 1).unwrap(), 0.5);
        assert_eq!(prevalence(&[1, 2], &ts, 0).unwrap(), 1.0);
    }

    #[test]
    fn prevalence_absent_item_zero() {
        let ts = vec![tx(&[1, 2], 1), tx(&[2], 1)];
        assert_eq!(prevalence(&[99], &ts, 1).unwrap(), 0.0);
    }

    #[test]
    fn prevalence_empty_class_errors() {
        let ts = vec![tx(&[1], 1)];
        assert!(matches!(prevalence(&[1], &ts, 0).unwrap_err(), Error::EmptyClass(0)));
    }

    #[test]
    fn run_identical_transactions_returns_exactly_their_set() {
        let ts: Vec<Transaction> = (0..10).map(|_| tx(&[3, 5, 9], 1)).collect();
        let got = run(&ts, 1, &RitParams { m: 20, depth: 3, n_child: 2, seed: 4 }).unwrap();
        assert_eq!(got.len(), 1);
        assert!(got.contains(&interaction(&[3, 5, 9])));
    }

    #[test]
    fn run_disjoint_transactions_rarely_survive() {
        // Pairwise-disjoint item sets only survive when every draw on a path
        // repeats the same transaction; with 40 transactions and depth 5 that
        // is vanishingly rare, and any survivor must equal one transaction.
        let ts: Vec<Transaction> = (0..40).map(|i| tx(&[i as u32], 1)).collect();
        let got = run(&ts, 1, &RitParams { m: 50, depth: 5, n_child: 2, seed: 7 }).unwrap();
        assert!(got.is_empty(), "unexpected survivors: {got:?}");
    }

    #[test]
    fn run_empty_class_errors() {
        let ts = vec![tx(&[1], 0)];
        assert!(run(&ts, 1, &RitParams::default()).is_err());
    }

    #[test]
    fn run_is_deterministic_per_seed() {
        let ts: Vec<Transaction> = (0..20)
            .map(|i| {
                if i % 10 < 9 {
                    tx(&[1, 2, 3, (i % 4) as u32 + 10], 1)
                } else {
                    tx(&[7, 8], 1)
                }
            })
            .collect();
        let params = RitParams { m: 40, depth: 3, n_child: 2, seed: 11 };
        assert_eq!(run(&ts, 1, &params).unwrap(), run(&ts, 1, &params).unwrap());
    }

    #[test]
    fn run_prevalent_set_survives_with_high_probability() {
        // {1,2,3} present in 90% of class-1 transactions; with M=100 trees the
        // chance that no tree keeps a superset of it is negligible.
        let ts: Vec<Transaction> = (0..20)
            .map(|i| {
                if i < 18 {
                    tx(&[1, 2, 3, 20 + (i % 5) as u32], 1)
                } else {
                    tx(&[30, 31], 1)
                }
            })
            .collect();
        let mut hits = 0;
        let runs = 100;
        for seed in 0..runs {
            let got =
                run(&ts, 1, &RitParams { m: 100, depth: 3, n_child: 2, seed }).unwrap();
            if got.iter().any(|s| interaction(&[1, 2, 3]).is_subset_of(s.items())) {
                hits += 1;
            }
        }
        assert!(hits >= 99, "survival frequency {hits}/{runs}");
    }

    #[test]
    fn run_outputs_are_subsets_of_some_class_transaction() {
        let ts: Vec<Transaction> = (0..25)
            .map(|i| {
                let base = vec![1, 2, (i % 6) as u32 + 3];
                tx(&base, (i % 2) as u8)
            })
            .collect();
        let got = run(&ts, 1, &RitParams { m: 30, depth: 2, n_child: 3, seed: 5 }).unwrap();
        for s in &got {
            assert!(ts
                .iter()
                .filter(|t| t.label() == 1)
                .any(|t| s.is_subset_of(t.items())));
        }
    }

    #[test]
    fn filter_vacuous_bounds_keep_nonzero_class1_prevalence() {
        let ts = vec![tx(&[1, 2], 1), tx(&[3], 1), tx(&[1], 0)];
        let cands: BTreeSet<Interaction> =
            [interaction(&[1, 2]), interaction(&[3]), interaction(&[9])].into_iter().collect();
        let kept = filter(&cands, &ts, f64::MIN_POSITIVE, 0.999999).unwrap();
        assert!(kept.contains(&interaction(&[1, 2])));
        assert!(kept.contains(&interaction(&[3])));
        assert!(!kept.contains(&interaction(&[9])));
    }

    #[test]
    fn filter_keeps_class1_specific_candidate() {
        // candidate prevalent 0.9 in class 1, 0.05 in class 0
        let mut ts = Vec::new();
        for i in 0..20 {
            if i < 18 {
                ts.push(tx(&[1, 2], 1));
            } else {
                ts.push(tx(&[5], 1));
            }
        }
        for i in 0..20 {
            if i < 1 {
                ts.push(tx(&[1, 2], 0));
            } else {
                ts.push(tx(&[6], 0));
            }
        }
        let cands: BTreeSet<Interaction> = [interaction(&[1, 2])].into_iter().collect();
        let kept = filter(&cands, &ts, 0.5, 0.1).unwrap();
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn filter_rejects_class_neutral_candidate() {
        let mut ts = Vec::new();
        for _ in 0..8 {
            ts.push(tx(&[1, 2], 1));
            ts.push(tx(&[1, 2], 0));
        }
        for _ in 0..2 {
            ts.push(tx(&[5], 1));
            ts.push(tx(&[5], 0));
        }
        let cands: BTreeSet<Interaction> = [interaction(&[1, 2])].into_iter().collect();
        assert!(filter(&cands, &ts, 0.5, 0.1).unwrap().is_empty());
    }

    #[test]
    fn filter_rejects_out_of_range_thresholds() {
        let ts = vec![tx(&[1], 1)];
        let cands = BTreeSet::new();
        assert!(filter(&cands, &ts, 1.5, 0.1).is_err());
        assert!(filter(&cands, &ts, 0.5, -0.1).is_err());
    }

    #[test]
    fn transaction_line_round_trip() {
        let t = tx(&[4, 1, 9, 4], 1);
        let line = t.to_line();
        assert_eq!(line, "1:1,4,9");
        assert_eq!(Transaction::parse_line(&line).unwrap(), t);
        let empty = tx(&[], 0);
        assert_eq!(Transaction::parse_line(&empty.to_line()).unwrap(), empty);
    }

    #[test]
    fn transactions_text_round_trip() {
        let ts = vec![tx(&[1, 2], 1), tx(&[], 0), tx(&[7], 1)];
        let text = write_transactions(&ts);
        assert_eq!(read_transactions(&text).unwrap(), ts);
    }

    #[test]
    fn subset_helper() {
        assert!(is_subset(&[], &[1, 2]));
        assert!(is_subset(&[2], &[1, 2, 3]));
        assert!(!is_subset(&[4], &[1, 2, 3]));
        assert!(is_subset(&[1, 3], &[1, 2, 3]));
        assert!(!is_subset(&[1, 2, 3], &[1, 3]));
    }
}
