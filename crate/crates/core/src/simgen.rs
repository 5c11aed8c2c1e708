//! Generative models for the simulation harness: independent and correlated
//! heavy-tailed features, Boolean response rules, label-swap noise, and rule
//! embedding into real feature matrices.

use rand::Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::ForestParams;
use crate::irf::IrfParams;
use crate::metrics::TruthSet;
use crate::rit::RitParams;
use crate::rng;
use crate::tree::TreeParams;

/// A Boolean response rule over feature columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Rule {
    /// 1 if any active coordinate exceeds the threshold.
    Or { active: Vec<usize>, threshold: f64 },
    /// 1 if every active coordinate exceeds the threshold.
    And { active: Vec<usize>, threshold: f64 },
    /// 1 if an odd number of active coordinates exceed the threshold.
    Xor { active: Vec<usize>, threshold: f64 },
    /// Row-wise Bernoulli(pi) choice between two non-mixture rules; rule `a`
    /// applies with probability `pi`.
    Mixture { a: Box<Rule>, b: Box<Rule>, pi: f64 },
}

impl Rule {
    fn validate(&self, p: usize) -> Result<()> {
        match self {
            Rule::Or { active, .. } | Rule::And { active, .. } | Rule::Xor { active, .. } => {
                if active.is_empty() {
                    return Err(Error::InvalidParameter("rule has no active features".into()));
                }
                for &j in active {
                    if j >= p {
                        return Err(Error::InvalidParameter(format!(
                            "active feature index {j} out of range for p={p}"
                        )));
                    }
                }
                Ok(())
            }
            Rule::Mixture { a, b, pi } => {
                if matches!(**a, Rule::Mixture { .. }) || matches!(**b, Rule::Mixture { .. }) {
                    return Err(Error::InvalidParameter(
                        "mixture components must not themselves be mixtures".into(),
                    ));
                }
                if !(*pi > 0.0 && *pi < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "mixture proportion must lie in (0,1), got {pi}"
                    )));
                }
                a.validate(p)?;
                b.validate(p)
            }
        }
    }

    /// All feature indices any component rule reads.
    pub fn active_features(&self) -> Vec<usize> {
        match self {
            Rule::Or { active, .. } | Rule::And { active, .. } | Rule::Xor { active, .. } => {
                active.clone()
            }
            Rule::Mixture { a, b, .. } => {
                let mut out = a.active_features();
                out.extend(b.active_features());
                out.sort_unstable();
                out.dedup();
                out
            }
        }
    }

    fn label_row(&self, value_at: &dyn Fn(usize) -> f64) -> u8 {
        match self {
            Rule::Or { active, threshold } => {
                u8::from(active.iter().any(|&j| value_at(j) > *threshold))
            }
            Rule::And { active, threshold } => {
                u8::from(active.iter().all(|&j| value_at(j) > *threshold))
            }
            Rule::Xor { active, threshold } => {
                let exceed = active.iter().filter(|&&j| value_at(j) > *threshold).count();
                (exceed % 2) as u8
            }
            Rule::Mixture { .. } => unreachable!("mixtures are resolved per row before labelling"),
        }
    }
}

/// Feature covariance structure. Correlated draws use an elliptical Cauchy
/// (multivariate t with one degree of freedom): x = L·z / |u| with z a
/// standard normal vector, u an independent standard normal scalar, and L the
/// Cholesky factor of the scale matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CovSpec {
    Independent,
    /// Σ_ij = ρ^|i−j|.
    Decaying { rho: f64 },
    /// Unit diagonal, ρ within consecutive blocks of `block_size`, 0 across.
    Block { rho: f64, block_size: usize },
}

impl CovSpec {
    fn validate(&self) -> Result<()> {
        match *self {
            CovSpec::Independent => Ok(()),
            CovSpec::Decaying { rho } | CovSpec::Block { rho, .. } => {
                if !(0.0..1.0).contains(&rho) {
                    return Err(Error::InvalidParameter(format!(
                        "correlation must lie in [0,1), got {rho}"
                    )));
                }
                if let CovSpec::Block { block_size, .. } = *self {
                    if block_size == 0 {
                        return Err(Error::InvalidParameter("block_size must be ≥ 1".into()));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Label-swap noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseSpec {
    /// Flips a uniformly chosen ⌊fraction·n⌋ subset of labels.
    SwapUniform { fraction: f64 },
    /// Flips ⌊fraction·(#class 1)⌋ class-1 rows and an equal number of
    /// class-0 rows, preserving the class balance.
    SwapBalanced { fraction: f64 },
}

impl NoiseSpec {
    fn fraction(&self) -> f64 {
        match *self {
            NoiseSpec::SwapUniform { fraction } | NoiseSpec::SwapBalanced { fraction } => fraction,
        }
    }

    fn validate(&self) -> Result<()> {
        let f = self.fraction();
        if !(0.0..0.5).contains(&f) {
            return Err(Error::InvalidParameter(format!(
                "noise fraction must lie in [0,0.5), got {f}"
            )));
        }
        Ok(())
    }
}

/// Draws an n×p feature matrix (column-major) under the covariance spec.
/// Deterministic per seed.
pub fn gen_features(n: usize, p: usize, cov: &CovSpec, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidParameter("n and p must be ≥ 1".into()));
    }
    cov.validate()?;
    match cov {
        CovSpec::Independent => {
            let cauchy = Cauchy::new(0.0, 1.0).expect("standard Cauchy");
            Ok((0..p)
                .map(|j| {
                    let mut rng = rng::rng_for(seed, rng::stream::FEATURES, j as u64);
                    (0..n).map(|_| cauchy.sample(&mut rng)).collect()
                })
                .collect())
        }
        CovSpec::Decaying { .. } | CovSpec::Block { .. } => {
            let sigma = build_scale_matrix(p, cov);
            let chol = cholesky(&sigma, p)?;
            let mut columns: Vec<Vec<f64>> = vec![vec![0.0; n]; p];
            for i in 0..n {
                let mut rng = rng::rng_for(seed, rng::stream::FEATURES, i as u64);
                let z: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
                let u: f64 = StandardNormal.sample(&mut rng);
                let denom = u.abs().max(f64::MIN_POSITIVE);
                for r in 0..p {
                    let mut acc = 0.0;
                    for (c, &zc) in z.iter().enumerate().take(r + 1) {
                        acc += chol[r * p + c] * zc;
                    }
                    columns[r][i] = acc / denom;
                }
            }
            Ok(columns)
        }
    }
}

fn build_scale_matrix(p: usize, cov: &CovSpec) -> Vec<f64> {
    let mut sigma = vec![0.0; p * p];
    match *cov {
        CovSpec::Independent => {
            for i in 0..p {
                sigma[i * p + i] = 1.0;
            }
        }
        CovSpec::Decaying { rho } => {
            for i in 0..p {
                for j in 0..p {
                    sigma[i * p + j] = rho.powi((i as i32 - j as i32).abs());
                }
            }
        }
        CovSpec::Block { rho, block_size } => {
            for i in 0..p {
                for j in 0..p {
                    sigma[i * p + j] = if i == j {
                        1.0
                    } else if i / block_size == j / block_size {
                        rho
                    } else {
                        0.0
                    };
                }
            }
        }
    }
    sigma
}

/// Dense lower-triangular Cholesky factor of a symmetric matrix.
fn cholesky(a: &[f64], p: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut sum = a[i * p + j];
            for k in 0..j {
                sum -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "scale matrix is not positive definite".into(),
                    ));
                }
                l[i * p + j] = sum.sqrt();
            } else {
                l[i * p + j] = sum / l[j * p + j];
            }
        }
    }
    Ok(l)
}

/// Labels each row by the rule. Only mixture assignment consumes randomness;
/// inactive coordinates never influence the labels.
pub fn apply_rule(columns: &[Vec<f64>], rule: &Rule, seed: u64) -> Result<Vec<u8>> {
    let p = columns.len();
    rule.validate(p)?;
    let n = columns.first().map_or(0, |c| c.len());
    match rule {
        Rule::Mixture { a, b, pi } => {
            let mut rng = rng::rng_for(seed, rng::stream::MIXTURE, 0);
            Ok((0..n)
                .map(|i| {
                    let pick_a = rng.random::<f64>() < *pi;
                    let component: &Rule = if pick_a { a } else { b };
                    component.label_row(&|j| columns[j][i])
                })
                .collect())
        }
        _ => Ok((0..n).map(|i| rule.label_row(&|j| columns[j][i])).collect()),
    }
}

/// Applies label-swap noise. The flipped count is exact; flipping the same
/// set again restores the original labels.
pub fn add_noise(labels: &[u8], spec: &NoiseSpec, seed: u64) -> Result<Vec<u8>> {
    spec.validate()?;
    let n = labels.len();
    let mut out = labels.to_vec();
    let mut rng = rng::rng_for(seed, rng::stream::NOISE, 0);
    match *spec {
        NoiseSpec::SwapUniform { fraction } => {
            let k = (fraction * n as f64).floor() as usize;
            for &i in choose_without_replacement(n, k, &mut rng).iter() {
                out[i] ^= 1;
            }
        }
        NoiseSpec::SwapBalanced { fraction } => {
            let ones: Vec<usize> = (0..n).filter(|&i| labels[i] == 1).collect();
            let zeros: Vec<usize> = (0..n).filter(|&i| labels[i] == 0).collect();
            let k = (fraction * ones.len() as f64).floor() as usize;
            if zeros.len() < k {
                return Err(Error::InvalidParameter(format!(
                    "balanced swap needs {k} class-0 rows, found {}",
                    zeros.len()
                )));
            }
            for &pos in choose_without_replacement(ones.len(), k, &mut rng).iter() {
                out[ones[pos]] = 0;
            }
            for &pos in choose_without_replacement(zeros.len(), k, &mut rng).iter() {
                out[zeros[pos]] = 1;
            }
        }
    }
    Ok(out)
}

fn choose_without_replacement(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    // partial Fisher–Yates
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n) {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k.min(n));
    idx
}

/// AND rule over named columns of a real feature matrix: 1 when every named
/// column strictly exceeds its threshold.
pub fn embed_rule(dataset: &Dataset, clauses: &[(String, f64)]) -> Result<Vec<u8>> {
    if clauses.is_empty() {
        return Err(Error::InvalidParameter("embed_rule needs at least one clause".into()));
    }
    let mut resolved = Vec::with_capacity(clauses.len());
    for (name, threshold) in clauses {
        let j = dataset
            .feature_index(name)
            .ok_or_else(|| Error::ResponseColumnNotFound(name.clone()))?;
        resolved.push((j, *threshold));
    }
    Ok((0..dataset.n_rows())
        .map(|i| u8::from(resolved.iter().all(|&(j, t)| dataset.value(i, j) > t)))
        .collect())
}

/// A reproducible simulation bundle.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub train: Dataset,
    pub test: Dataset,
    pub truth: TruthSet,
    pub params: IrfParams,
}

const TEST_ROWS: usize = 500;

/// Builds a named simulation scenario with a fresh train set, a 500-row test
/// set, the ground-truth active features, and harness parameters.
///
/// Names:
/// - `sim1-or-n{N}`, `sim1-and-n{N}`, `sim1-xor-n{N}` — order-4 rules on
///   p=50 independent Cauchy features, 20% uniform label swaps.
/// - `sim2-xor8-noise{PCT}` — order-8 parity on p=100, n=5000.
/// - `sim2-mixture-pi{PI}` — order-8 parity mixed with an order-4 AND.
/// - `sim2-corr-decay-rho{R}`, `sim2-corr-block-rho{R}` — correlated
///   features, randomly placed order-8 parity.
/// - `sim3-bigp-p{P}-noise{PCT}` — order-4 AND with p in the thousands.
pub fn scenario(name: &str, seed: u64) -> Result<Scenario> {
    let spec = parse_scenario(name).ok_or_else(|| Error::UnknownScenario(name.to_string()))?;
    build_scenario(name, spec, seed)
}

struct ScenarioSpec {
    n_train: usize,
    p: usize,
    cov: CovSpec,
    rule: RuleBuild,
    noise: NoiseSpec,
    ntree: usize,
    b: usize,
}

enum RuleBuild {
    Fixed(Rule),
    /// Order-8 parity on an active set drawn uniformly at scenario build time.
    RandomXor8 { threshold: f64 },
}

fn parse_scenario(name: &str) -> Option<ScenarioSpec> {
    let sim1 = |rule: &str, n: usize| -> Option<ScenarioSpec> {
        if !(10..=1_000_000).contains(&n) {
            return None;
        }
        let active = vec![0, 1, 2, 3];
        let rule = match rule {
            "or" => Rule::Or { active, threshold: 3.2 },
            "and" => Rule::And { active, threshold: -1.0 },
            "xor" => Rule::Xor { active, threshold: 1.0 },
            _ => return None,
        };
        Some(ScenarioSpec {
            n_train: n,
            p: 50,
            cov: CovSpec::Independent,
            rule: RuleBuild::Fixed(rule),
            noise: NoiseSpec::SwapUniform { fraction: 0.2 },
            ntree: 500,
            b: 20,
        })
    };

    if let Some(rest) = name.strip_prefix("sim1-") {
        let (rule, n) = rest.split_once("-n")?;
        return sim1(rule, n.parse().ok()?);
    }
    if let Some(rest) = name.strip_prefix("sim2-xor8-noise") {
        let pct: u32 = rest.parse().ok()?;
        if pct >= 50 {
            return None;
        }
        return Some(ScenarioSpec {
            n_train: 5000,
            p: 100,
            cov: CovSpec::Independent,
            rule: RuleBuild::Fixed(Rule::Xor { active: (0..8).collect(), threshold: 2.0 }),
            noise: NoiseSpec::SwapUniform { fraction: pct as f64 / 100.0 },
            ntree: 200,
            b: 10,
        });
    }
    if let Some(rest) = name.strip_prefix("sim2-mixture-pi") {
        let pi: f64 = rest.parse().ok()?;
        if !(pi > 0.0 && pi < 1.0) {
            return None;
        }
        let xor = Rule::Xor { active: (0..8).collect(), threshold: 2.0 };
        let and = Rule::And { active: vec![8, 9, 10, 11], threshold: -0.5 };
        return Some(ScenarioSpec {
            n_train: 5000,
            p: 100,
            cov: CovSpec::Independent,
            rule: RuleBuild::Fixed(Rule::Mixture { a: Box::new(xor), b: Box::new(and), pi }),
            noise: NoiseSpec::SwapUniform { fraction: 0.1 },
            ntree: 200,
            b: 10,
        });
    }
    if let Some(rest) = name.strip_prefix("sim2-corr-") {
        let (kind, rho) = rest.split_once("-rho")?;
        let rho: f64 = rho.parse().ok()?;
        if !(0.0..1.0).contains(&rho) {
            return None;
        }
        let cov = match kind {
            "decay" => CovSpec::Decaying { rho },
            "block" => CovSpec::Block { rho, block_size: 10 },
            _ => return None,
        };
        return Some(ScenarioSpec {
            n_train: 5000,
            p: 100,
            cov,
            rule: RuleBuild::RandomXor8 { threshold: 2.0 },
            noise: NoiseSpec::SwapUniform { fraction: 0.1 },
            ntree: 200,
            b: 10,
        });
    }
    if let Some(rest) = name.strip_prefix("sim3-bigp-p") {
        let (p, noise) = rest.split_once("-noise")?;
        let p: usize = p.parse().ok()?;
        let pct: u32 = noise.parse().ok()?;
        if !(5..=100_000).contains(&p) || pct >= 50 {
            return None;
        }
        return Some(ScenarioSpec {
            n_train: 500,
            p,
            cov: CovSpec::Independent,
            rule: RuleBuild::Fixed(Rule::And { active: vec![0, 1, 2, 3], threshold: -1.0 }),
            noise: NoiseSpec::SwapUniform { fraction: pct as f64 / 100.0 },
            ntree: 500,
            b: 20,
        });
    }
    None
}

fn build_scenario(name: &str, spec: ScenarioSpec, seed: u64) -> Result<Scenario> {
    let rule = match spec.rule {
        RuleBuild::Fixed(rule) => rule,
        RuleBuild::RandomXor8 { threshold } => {
            let mut rng = rng::rng_for(seed, rng::stream::SCENARIO, 0);
            let active = choose_without_replacement(spec.p, 8, &mut rng);
            Rule::Xor { active, threshold }
        }
    };
    let truth = TruthSet::new(rule.active_features().iter().map(|&j| j as u32))?;
    let feature_names: Vec<String> = (1..=spec.p).map(|j| format!("x{j}")).collect();

    let make = |rows: usize, part: u64| -> Result<Dataset> {
        let cols = gen_features(rows, spec.p, &spec.cov, rng::derive_seed(seed, rng::stream::FEATURES, part))?;
        let clean = apply_rule(&cols, &rule, rng::derive_seed(seed, rng::stream::MIXTURE, part))?;
        let noisy = add_noise(&clean, &spec.noise, rng::derive_seed(seed, rng::stream::NOISE, part))?;
        Dataset::new(cols, feature_names.clone(), noisy)
    };
    let train = make(spec.n_train, 0)?;
    let test = make(TEST_ROWS, 1)?;

    let params = IrfParams {
        k: 5,
        b: spec.b,
        forest: ForestParams { ntree: spec.ntree, tree: TreeParams::default(), seed: 0 },
        rit: RitParams { m: 100, depth: 5, n_child: 2, seed: 0 },
        class_of_interest: 1,
        grouping: None,
        seed: rng::derive_seed(seed, rng::stream::SCENARIO, 1),
        weight_epsilon: 0.0,
    };
    Ok(Scenario { name: name.to_string(), train, test, truth, params })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_cauchy_cdf(x: f64) -> f64 {
        0.5 + x.atan() / std::f64::consts::PI
    }

    #[test]
    fn independent_cauchy_median_near_zero() {
        let cols = gen_features(100_000, 1, &CovSpec::Independent, 12).unwrap();
        let mut v = cols[0].clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = v[v.len() / 2];
        assert!(median.abs() < 0.02, "median {median}");
    }

    #[test]
    fn decaying_rho_zero_marginal_matches_cauchy_cdf() {
        // Kolmogorov–Smirnov at α = 0.01: D < 1.628/√n.
        let n = 10_000;
        let cols = gen_features(n, 3, &CovSpec::Decaying { rho: 0.0 }, 99).unwrap();
        let mut v = cols[1].clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut d_stat = 0.0f64;
        for (i, &x) in v.iter().enumerate() {
            let f = standard_cauchy_cdf(x);
            let hi = (i + 1) as f64 / n as f64 - f;
            let lo = f - i as f64 / n as f64;
            d_stat = d_stat.max(hi.max(lo));
        }
        let critical = 1.628 / (n as f64).sqrt();
        assert!(d_stat < critical, "KS statistic {d_stat} ≥ {critical}");
    }

    fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let mut concordant = 0i64;
        let mut discordant = 0i64;
        for i in 0..n {
            for j in (i + 1)..n {
                let s = (x[i] - x[j]) * (y[i] - y[j]);
                if s > 0.0 {
                    concordant += 1;
                } else if s < 0.0 {
                    discordant += 1;
                }
            }
        }
        (concordant - discordant) as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
    }

    #[test]
    fn block_covariance_rank_correlation_structure() {
        let n = 2000;
        let cov = CovSpec::Block { rho: 0.75, block_size: 10 };
        let cols = gen_features(n, 20, &cov, 7).unwrap();
        let tau_within = kendall_tau(&cols[0], &cols[1]);
        let tau_cross = kendall_tau(&cols[0], &cols[15]);
        // Under independence τ is Normal(0, 2(2n+5)/(9n(n−1))).
        let sigma =
            (2.0 * (2.0 * n as f64 + 5.0) / (9.0 * n as f64 * (n as f64 - 1.0))).sqrt();
        // Elliptical τ = (2/π)·asin(ρ) ≈ 0.54 for ρ = 0.75.
        assert!(tau_within > 5.0 * sigma, "within-block τ {tau_within}");
        assert!(tau_cross.abs() < 5.0 * sigma, "cross-block τ {tau_cross}");
    }

    #[test]
    fn heavy_tails_beat_gaussian_by_ten_x() {
        let cols = gen_features(100_000, 1, &CovSpec::Independent, 4).unwrap();
        let frac = cols[0].iter().filter(|v| v.abs() > 10.0).count() as f64 / 100_000.0;
        // P(|Cauchy| > 10) = 1 − 2·atan(10)/π ≈ 0.0634; Gaussian ≈ 1.5e-23.
        let gaussian = 1.5e-23;
        assert!(frac >= 10.0 * gaussian);
        assert!((0.05..0.08).contains(&frac), "tail fraction {frac}");
    }

    #[test]
    fn gen_features_is_bit_reproducible() {
        let a = gen_features(50, 4, &CovSpec::Decaying { rho: 0.5 }, 3).unwrap();
        let b = gen_features(50, 4, &CovSpec::Decaying { rho: 0.5 }, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn and_rule_class_fraction_matches_cauchy_cdf() {
        // P(C > −1)⁴ = 0.75⁴ ≈ 0.3164
        let cols = gen_features(100_000, 4, &CovSpec::Independent, 21).unwrap();
        let rule = Rule::And { active: vec![0, 1, 2, 3], threshold: -1.0 };
        let labels = apply_rule(&cols, &rule, 0).unwrap();
        let frac = labels.iter().filter(|&&y| y == 1).count() as f64 / labels.len() as f64;
        assert!((frac - 0.75f64.powi(4)).abs() < 0.01, "class-1 fraction {frac}");
    }

    #[test]
    fn xor_all_below_threshold_is_zero() {
        let cols = vec![vec![-5.0], vec![-3.0], vec![-1.0]];
        let rule = Rule::Xor { active: vec![0, 1, 2], threshold: 0.0 };
        assert_eq!(apply_rule(&cols, &rule, 0).unwrap(), vec![0]);
    }

    #[test]
    fn or_single_huge_coordinate_is_one() {
        let cols = vec![vec![1e300], vec![-2.0]];
        let rule = Rule::Or { active: vec![0, 1], threshold: 3.2 };
        assert_eq!(apply_rule(&cols, &rule, 0).unwrap(), vec![1]);
    }

    #[test]
    fn rule_ignores_inactive_columns() {
        let cols = vec![vec![1.0, -1.0], vec![5.0, 5.0]];
        let rule = Rule::And { active: vec![0], threshold: 0.0 };
        let a = apply_rule(&cols, &rule, 0).unwrap();
        let altered = vec![cols[0].clone(), vec![-9.0, 100.0]];
        let b = apply_rule(&altered, &rule, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rule_rejects_out_of_range_index() {
        let cols = vec![vec![1.0]];
        let rule = Rule::Or { active: vec![3], threshold: 0.0 };
        assert!(apply_rule(&cols, &rule, 0).is_err());
    }

    #[test]
    fn noise_zero_fraction_is_identity() {
        let labels = vec![0, 1, 0, 1, 1];
        let out = add_noise(&labels, &NoiseSpec::SwapUniform { fraction: 0.0 }, 5).unwrap();
        assert_eq!(out, labels);
    }

    #[test]
    fn noise_flips_exact_count() {
        let labels = vec![0u8; 100];
        let out = add_noise(&labels, &NoiseSpec::SwapUniform { fraction: 0.2 }, 5).unwrap();
        let hamming = out.iter().zip(&labels).filter(|(a, b)| a != b).count();
        assert_eq!(hamming, 20);
    }

    #[test]
    fn balanced_swap_preserves_class_count() {
        let mut labels = vec![0u8; 100];
        for l in labels.iter_mut().take(10) {
            *l = 1;
        }
        let out = add_noise(&labels, &NoiseSpec::SwapBalanced { fraction: 0.4 }, 9).unwrap();
        let ones_before = labels.iter().filter(|&&y| y == 1).count();
        let ones_after = out.iter().filter(|&&y| y == 1).count();
        assert_eq!(ones_before, ones_after);
        let flipped: Vec<usize> =
            (0..100).filter(|&i| labels[i] != out[i]).collect();
        assert_eq!(flipped.len(), 8, "4 active + 4 inactive rows swap");
    }

    #[test]
    fn balanced_swap_insufficient_inactive_errors() {
        // 10 class-1 rows at fraction 0.4 need 4 class-0 partners; only 2 exist.
        let mut labels = vec![1u8; 10];
        labels.extend([0u8, 0]);
        assert!(add_noise(&labels, &NoiseSpec::SwapBalanced { fraction: 0.4 }, 1).is_err());
    }

    #[test]
    fn mixture_assignment_is_seeded_and_roughly_pi() {
        let cols = gen_features(20_000, 12, &CovSpec::Independent, 31).unwrap();
        let xor = Rule::Xor { active: (0..8).collect(), threshold: 2.0 };
        let and = Rule::And { active: vec![8, 9, 10, 11], threshold: -0.5 };
        let rule = Rule::Mixture { a: Box::new(xor.clone()), b: Box::new(and.clone()), pi: 0.75 };
        let a = apply_rule(&cols, &rule, 6).unwrap();
        let b = apply_rule(&cols, &rule, 6).unwrap();
        assert_eq!(a, b);
        // Rows where the two components disagree reveal the assignment.
        let la = apply_rule(&cols, &xor, 0).unwrap();
        let lb = apply_rule(&cols, &and, 0).unwrap();
        let mut used_a = 0usize;
        let mut informative = 0usize;
        for i in 0..a.len() {
            if la[i] != lb[i] {
                informative += 1;
                if a[i] == la[i] {
                    used_a += 1;
                }
            }
        }
        let frac = used_a as f64 / informative as f64;
        assert!((frac - 0.75).abs() < 0.02, "component-A fraction {frac}");
    }

    #[test]
    fn embed_rule_named_thresholds() {
        let d = Dataset::new(
            vec![vec![2.0, 0.5], vec![3.0, 3.0]],
            vec!["kr".into(), "zld".into()],
            vec![0, 0],
        )
        .unwrap();
        let labels =
            embed_rule(&d, &[("kr".into(), 1.25), ("zld".into(), 1.25)]).unwrap();
        assert_eq!(labels, vec![1, 0]);
        assert!(embed_rule(&d, &[("missing".into(), 1.0)]).is_err());
        let all_zero = embed_rule(&d, &[("kr".into(), f64::MAX)]).unwrap();
        assert_eq!(all_zero, vec![0, 0]);
        let min = d.column(0).iter().cloned().fold(f64::INFINITY, f64::min);
        let all_one = embed_rule(&d, &[("kr".into(), min - 1.0)]).unwrap();
        assert_eq!(all_one, vec![1, 1]);
    }

    #[test]
    fn scenario_sim1_and_shape() {
        let s = scenario("sim1-and-n500", 3).unwrap();
        assert_eq!(s.train.n_rows(), 500);
        assert_eq!(s.train.n_features(), 50);
        assert_eq!(s.test.n_rows(), 500);
        let truth: Vec<u32> = s.truth.active().iter().copied().collect();
        assert_eq!(truth, vec![0, 1, 2, 3]);
    }

    #[test]
    fn scenario_sim2_xor8_shape() {
        let s = scenario("sim2-xor8-noise15", 4).unwrap();
        assert_eq!(s.train.n_rows(), 5000);
        assert_eq!(s.train.n_features(), 100);
        assert_eq!(s.truth.len(), 8);
    }

    #[test]
    fn scenario_is_reproducible() {
        let a = scenario("sim1-xor-n200", 8).unwrap();
        let b = scenario("sim1-xor-n200", 8).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
        assert_eq!(a.truth, b.truth);
    }

    #[test]
    fn scenario_unknown_name_errors() {
        assert!(matches!(scenario("sim9-nope", 0).unwrap_err(), Error::UnknownScenario(_)));
        assert!(matches!(scenario("sim1-and-n", 0).unwrap_err(), Error::UnknownScenario(_)));
    }

    #[test]
    fn scenario_corr_records_sampled_active_set() {
        let s = scenario("sim2-corr-block-rho0.75", 5).unwrap();
        assert_eq!(s.truth.len(), 8);
        assert!(s.truth.active().iter().all(|&j| j < 100));
    }
}
