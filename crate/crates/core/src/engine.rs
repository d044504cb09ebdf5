//! Paired null/alternative Monte Carlo experiments.
//!
//! Replication `r` (1-based) draws its Poisson(λ) sample from stream `2r`
//! and its alternative sample from stream `2r + 1` under the master seed, so
//! the output does not depend on how replications are scheduled. Each half
//! gets three statistics: `√n(ĉ - 1)`, `T` at `θ = λ` and `T` at the MLE.
//!
//! Power is measured against critical values taken from the experiment's
//! own null half. The dispersion test is two-sided (binomial alternatives
//! push `ĉ` below one, negative binomial ones above), the `T` tests are
//! upper one-sided.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{draw, mean_of, AlternativeSpec, CountSample};
use crate::error::{domain, Error, Result};
use crate::gof::{self, build_cells, c_hat_statistic, cell_counts, gof_statistic, CellPartition};
use crate::rng::RngStream;

pub const DEFAULT_ALPHA_LEVELS: [f64; 3] = [0.01, 0.05, 0.10];
pub const DEFAULT_EXPECTED_COUNT_FLOOR: f64 = 4.0;

/// Alternatives whose mean is further than this from λ raise a warning.
pub const MEAN_MATCH_TOLERANCE: f64 = 0.05;
/// Largest tolerated fraction of failed replications.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    /// `√n (ĉ - 1)`.
    CHat,
    /// `T` with cells at the null parameter.
    GofTheta,
    /// `T` with cells at the sample mean.
    GofMle,
}

impl TestKind {
    pub const ALL: [TestKind; 3] = [TestKind::CHat, TestKind::GofTheta, TestKind::GofMle];

    pub fn sidedness(self) -> Sidedness {
        match self {
            TestKind::CHat => Sidedness::TwoSided,
            TestKind::GofTheta | TestKind::GofMle => Sidedness::OneSidedUpper,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TestKind::CHat => "c_hat",
            TestKind::GofTheta => "gof_theta",
            TestKind::GofMle => "gof_mle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    OneSidedUpper,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Half {
    Null,
    Alternative,
}

fn default_alpha_levels() -> Vec<f64> {
    DEFAULT_ALPHA_LEVELS.to_vec()
}

fn default_seed() -> u64 {
    1
}

fn default_floor() -> f64 {
    DEFAULT_EXPECTED_COUNT_FLOOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Null Poisson parameter.
    pub lambda: f64,
    pub alternative: AlternativeSpec,
    pub n: usize,
    pub replications: usize,
    pub k_min: u64,
    pub k_max: u64,
    #[serde(default = "default_alpha_levels")]
    pub alpha_levels: Vec<f64>,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default = "default_floor")]
    pub expected_count_floor: f64,
}

impl ExperimentConfig {
    /// Rejects invalid configurations; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(domain(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        self.alternative.validate()?;
        if self.replications == 0 {
            return Err(domain("replications must be at least 1"));
        }
        if self.n < 2 {
            return Err(domain(format!(
                "sample size must be at least 2, got {}",
                self.n
            )));
        }
        if self.k_min >= self.k_max {
            return Err(domain(format!(
                "k_min ({}) must be below k_max ({})",
                self.k_min, self.k_max
            )));
        }
        if let Some(a) = self.alpha_levels.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
            return Err(domain(format!("significance level {a} outside (0, 1)")));
        }
        if !(self.expected_count_floor >= 0.0) {
            return Err(domain("expected_count_floor must be non-negative"));
        }

        let mut warnings = Vec::new();
        let mean = mean_of(&self.alternative)?;
        if (mean - self.lambda).abs() > MEAN_MATCH_TOLERANCE {
            warnings.push(format!(
                "alternative mean {mean:.4} differs from lambda {} by more than {MEAN_MATCH_TOLERANCE}",
                self.lambda
            ));
        }
        if let Some(max) = self.alternative.support_max() {
            if max < self.k_max {
                warnings.push(format!(
                    "alternative support ends at {max}, below k_max = {}: the top cell is always empty",
                    self.k_max
                ));
            }
        }
        Ok(warnings)
    }
}

/// The three statistic collections of one half, indexed by replication.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatisticSet {
    pub c_hat: Vec<f64>,
    pub gof_theta: Vec<f64>,
    pub gof_mle: Vec<f64>,
}

impl StatisticSet {
    pub fn get(&self, test: TestKind) -> &[f64] {
        match test {
            TestKind::CHat => &self.c_hat,
            TestKind::GofTheta => &self.gof_theta,
            TestKind::GofMle => &self.gof_mle,
        }
    }

    fn push(&mut self, stats: [f64; 3]) {
        self.c_hat.push(stats[0]);
        self.gof_theta.push(stats[1]);
        self.gof_mle.push(stats[2]);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerEntry {
    pub test: TestKind,
    pub sided: Sidedness,
    pub alpha: f64,
    pub critical_value: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub null: StatisticSet,
    pub alternative: StatisticSet,
    /// 1-based indices of replications dropped because a statistic was undefined.
    pub failed_replications: Vec<usize>,
    pub power: Vec<PowerEntry>,
    pub warnings: Vec<String>,
}

impl ExperimentResult {
    pub fn statistics(&self, half: Half) -> &StatisticSet {
        match half {
            Half::Null => &self.null,
            Half::Alternative => &self.alternative,
        }
    }

    pub fn edf(&self, test: TestKind, half: Half) -> Result<Vec<EdfPoint>> {
        edf_points(self.statistics(half).get(test))
    }

    pub fn power_at(&self, test: TestKind, alpha: f64) -> Option<&PowerEntry> {
        self.power
            .iter()
            .find(|e| e.test == test && (e.alpha - alpha).abs() < 1e-12)
    }
}

/// One step of a right-continuous EDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdfPoint {
    pub value: f64,
    pub fraction: f64,
}

/// Steps of the EDF: each distinct sorted value with the fraction of
/// observations at or below it.
pub fn edf_points(values: &[f64]) -> Result<Vec<EdfPoint>> {
    if values.is_empty() {
        return Err(domain("EDF of an empty collection"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total = sorted.len() as f64;
    let mut points: Vec<EdfPoint> = Vec::new();
    for (i, &value) in sorted.iter().enumerate() {
        let fraction = (i + 1) as f64 / total;
        match points.last_mut() {
            Some(last) if last.value == value => last.fraction = fraction,
            _ => points.push(EdfPoint { value, fraction }),
        }
    }
    Ok(points)
}

/// The `⌈(1-α)(R+1)⌉`-th order statistic of the null values (of their
/// absolute values when two-sided).
pub fn mc_critical_value(null_stats: &[f64], alpha: f64, sided: Sidedness) -> Result<f64> {
    let r = null_stats.len();
    if r < 20 {
        return Err(domain(format!("need at least 20 null statistics, got {r}")));
    }
    if !(alpha > 1.0 / (r as f64 + 1.0) && alpha < 1.0) {
        return Err(domain(format!(
            "alpha = {alpha} outside (1/(R+1), 1) for R = {r}"
        )));
    }
    let mut sorted: Vec<f64> = match sided {
        Sidedness::OneSidedUpper => null_stats.to_vec(),
        Sidedness::TwoSided => null_stats.iter().map(|v| v.abs()).collect(),
    };
    sorted.sort_by(f64::total_cmp);
    // guard against (1-α)(R+1) landing a rounding error above an integer
    let rank = (((1.0 - alpha) * (r as f64 + 1.0)) - 1e-9).ceil() as usize;
    let rank = rank.clamp(1, r);
    Ok(sorted[rank - 1])
}

/// Fraction of alternative statistics beyond the critical value.
pub fn empirical_power(alt_stats: &[f64], critical: f64, sided: Sidedness) -> Result<f64> {
    if alt_stats.is_empty() {
        return Err(domain("power of an empty collection"));
    }
    let rejected = alt_stats
        .iter()
        .filter(|&&v| match sided {
            Sidedness::OneSidedUpper => v > critical,
            Sidedness::TwoSided => v.abs() > critical,
        })
        .count();
    Ok(rejected as f64 / alt_stats.len() as f64)
}

/// Warns for every cell whose expected count `n p_k` is below `floor`.
pub fn expected_count_check(partition: &CellPartition, n: usize, floor: f64) -> Vec<String> {
    partition
        .probs()
        .iter()
        .enumerate()
        .filter_map(|(k, &p)| {
            let expected = n as f64 * p;
            (expected < floor).then(|| {
                format!(
                    "cell {} ({}) expects {expected:.2} observations, below {floor}",
                    k + 1,
                    cell_label(partition, k)
                )
            })
        })
        .collect()
}

fn cell_label(partition: &CellPartition, k: usize) -> String {
    if k == 0 {
        format!("x <= {}", partition.k_min())
    } else if k + 1 == partition.cells() {
        format!("x >= {}", partition.k_max())
    } else {
        format!("x = {}", partition.k_min() + k as u64)
    }
}

struct Replicate {
    null: [f64; 3],
    alternative: [f64; 3],
    alternative_top_empty: bool,
}

fn statistics(
    sample: &CountSample,
    fixed: &CellPartition,
    k_min: u64,
    k_max: u64,
) -> Result<[f64; 3]> {
    let c = c_hat_statistic(sample)?;
    let t_theta = gof_statistic(&cell_counts(sample, fixed), fixed)?;
    let t_mle = gof::gof_at_mle(sample, k_min, k_max)?;
    Ok([c, t_theta, t_mle])
}

fn replicate(config: &ExperimentConfig, fixed: &CellPartition, r: u64) -> Result<Replicate> {
    let null_spec = AlternativeSpec::Poisson {
        lambda: config.lambda,
    };
    let mut null_stream = RngStream::new(config.master_seed, 2 * r);
    let mut alt_stream = RngStream::new(config.master_seed, 2 * r + 1);
    let null_sample = draw(&null_spec, config.n, &mut null_stream)?;
    let alt_sample = draw(&config.alternative, config.n, &mut alt_stream)?;
    let alternative_top_empty = alt_sample.values().iter().all(|&x| x < config.k_max);
    Ok(Replicate {
        null: statistics(&null_sample, fixed, config.k_min, config.k_max)?,
        alternative: statistics(&alt_sample, fixed, config.k_min, config.k_max)?,
        alternative_top_empty,
    })
}

/// Runs the experiment on rayon's global pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_with_workers(config, None)
}

/// Runs the experiment on a dedicated pool of `workers` threads (all cores
/// when `None`). The result does not depend on the worker count.
pub fn run_experiment_with_workers(
    config: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<ExperimentResult> {
    let mut warnings = config.validate()?;
    let fixed = build_cells(config.lambda, config.k_min, config.k_max)?;
    warnings.extend(expected_count_check(
        &fixed,
        config.n,
        config.expected_count_floor,
    ));

    let simulate = || {
        (1..=config.replications as u64)
            .into_par_iter()
            .map(|r| replicate(config, &fixed, r))
            .collect::<Vec<_>>()
    };
    let outcomes = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| domain(format!("cannot start {w} workers: {e}")))?
            .install(simulate),
        None => simulate(),
    };

    let mut null = StatisticSet::default();
    let mut alternative = StatisticSet::default();
    let mut failed_replications = Vec::new();
    let mut top_empty = 0usize;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(rep) => {
                null.push(rep.null);
                alternative.push(rep.alternative);
                top_empty += usize::from(rep.alternative_top_empty);
            }
            Err(Error::UndefinedStatistic | Error::DegenerateMle) => {
                failed_replications.push(i + 1)
            }
            Err(e) => return Err(e),
        }
    }
    let total = config.replications;
    if failed_replications.len() as f64 > MAX_FAILURE_FRACTION * total as f64 {
        return Err(Error::TooManyFailures {
            failed: failed_replications.len(),
            total,
        });
    }
    if !failed_replications.is_empty() {
        warnings.push(format!(
            "{} of {total} replications had a degenerate sample and were dropped",
            failed_replications.len()
        ));
    }
    let completed = total - failed_replications.len();
    if top_empty * 10 > completed {
        warnings.push(format!(
            "top cell (x >= {}) empty in {top_empty} of {completed} alternative samples",
            config.k_max
        ));
    }

    let mut power = Vec::new();
    for test in TestKind::ALL {
        let sided = test.sidedness();
        for &alpha in &config.alpha_levels {
            match mc_critical_value(null.get(test), alpha, sided) {
                Ok(critical_value) => power.push(PowerEntry {
                    test,
                    sided,
                    alpha,
                    critical_value,
                    power: empirical_power(alternative.get(test), critical_value, sided)?,
                }),
                Err(e) => warnings.push(format!(
                    "no power for {} at alpha = {alpha}: {e}",
                    test.name()
                )),
            }
        }
    }

    Ok(ExperimentResult {
        config: config.clone(),
        null,
        alternative,
        failed_replications,
        power,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(alternative: AlternativeSpec, replications: usize) -> ExperimentConfig {
        ExperimentConfig {
            lambda: 7.0,
            alternative,
            n: 100,
            replications,
            k_min: 3,
            k_max: 12,
            alpha_levels: vec![0.05],
            master_seed: 17,
            expected_count_floor: 4.0,
        }
    }

    #[test]
    fn edf_examples() {
        let pts = edf_points(&[1.0, 2.0, 3.0]).unwrap();
        let heights: Vec<f64> = pts.iter().map(|p| p.fraction).collect();
        assert_eq!(heights, vec![1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert_eq!(
            edf_points(&[5.0, 5.0, 5.0]).unwrap(),
            vec![EdfPoint {
                value: 5.0,
                fraction: 1.0
            }]
        );
        assert!(edf_points(&[]).is_err());
    }

    #[test]
    fn critical_value_examples() {
        let values: Vec<f64> = (1..=99).map(f64::from).collect();
        assert_eq!(
            mc_critical_value(&values, 0.05, Sidedness::OneSidedUpper).unwrap(),
            95.0
        );
        assert_eq!(
            mc_critical_value(&values, 0.999, Sidedness::OneSidedUpper).unwrap(),
            1.0
        );

        let symmetric: Vec<f64> = (-50..=50).map(f64::from).collect();
        let abs: Vec<f64> = symmetric.iter().map(|v| v.abs()).collect();
        assert_eq!(
            mc_critical_value(&symmetric, 0.1, Sidedness::TwoSided).unwrap(),
            mc_critical_value(&abs, 0.1, Sidedness::OneSidedUpper).unwrap()
        );
    }

    #[test]
    fn critical_value_domain() {
        let values: Vec<f64> = (1..=99).map(f64::from).collect();
        assert!(mc_critical_value(&values, 0.0, Sidedness::OneSidedUpper).is_err());
        assert!(mc_critical_value(&values, 0.005, Sidedness::OneSidedUpper).is_err());
        assert!(mc_critical_value(&values, 1.0, Sidedness::OneSidedUpper).is_err());
        assert!(mc_critical_value(&values[..10], 0.5, Sidedness::OneSidedUpper).is_err());
    }

    #[test]
    fn power_examples() {
        assert_eq!(
            empirical_power(&[1.0, 2.0], 3.0, Sidedness::OneSidedUpper).unwrap(),
            0.0
        );
        assert_eq!(
            empirical_power(&[-4.0, 2.0], 3.0, Sidedness::TwoSided).unwrap(),
            0.5
        );
        assert!(empirical_power(&[], 3.0, Sidedness::TwoSided).is_err());
    }

    #[test]
    fn expected_counts() {
        let p = build_cells(7.0, 3, 12).unwrap();
        assert!(expected_count_check(&p, 100, 4.0).is_empty());
        assert!(expected_count_check(&p, 20, 4.0).len() > 1);
        assert!(expected_count_check(&p, 1, 0.0).is_empty());
    }

    #[test]
    fn invalid_configs() {
        let mut c = config(AlternativeSpec::Poisson { lambda: 7.0 }, 10);
        c.n = 1;
        assert!(c.validate().is_err());
        let mut c = config(AlternativeSpec::Poisson { lambda: 7.0 }, 10);
        c.alpha_levels = vec![1.5];
        assert!(c.validate().is_err());
        let mut c = config(AlternativeSpec::Poisson { lambda: 7.0 }, 0);
        assert!(c.validate().is_err());
        c.replications = 5;
        c.k_min = 12;
        assert!(c.validate().is_err());
    }

    #[test]
    fn mean_mismatch_warns() {
        let c = config(AlternativeSpec::Poisson { lambda: 8.0 }, 10);
        let warnings = c.validate().unwrap();
        assert!(warnings.iter().any(|w| w.contains("differs from lambda")));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let c = config(AlternativeSpec::Binomial { m_b: 50, p_b: 0.14 }, 200);
        let one = run_experiment_with_workers(&c, Some(1)).unwrap();
        let many = run_experiment_with_workers(&c, Some(4)).unwrap();
        assert_eq!(
            serde_json::to_vec(&one).unwrap(),
            serde_json::to_vec(&many).unwrap()
        );
        for set in [&one.null, &one.alternative] {
            for test in TestKind::ALL {
                assert_eq!(set.get(test).len(), 200);
            }
        }
    }

    #[test]
    fn mle_and_fixed_agree_when_mean_hits_lambda() {
        let c = config(AlternativeSpec::Poisson { lambda: 7.0 }, 300);
        let res = run_experiment(&c).unwrap();
        let mut hits = 0;
        for r in 1..=300u64 {
            let mut s = RngStream::new(c.master_seed, 2 * r);
            let sample = draw(&AlternativeSpec::Poisson { lambda: 7.0 }, c.n, &mut s).unwrap();
            if sample.mean() == 7.0 {
                hits += 1;
                let i = (r - 1) as usize;
                assert_eq!(
                    res.null.gof_theta[i].to_bits(),
                    res.null.gof_mle[i].to_bits()
                );
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn edf_reconstructs_power() {
        let c = config(
            AlternativeSpec::NegativeBinomial {
                m_nb: 70,
                p_nb: 10.0 / 11.0,
            },
            400,
        );
        let res = run_experiment(&c).unwrap();
        let r = c.replications as f64;
        for entry in &res.power {
            let alt: Vec<f64> = match entry.sided {
                Sidedness::OneSidedUpper => res.alternative.get(entry.test).to_vec(),
                Sidedness::TwoSided => res
                    .alternative
                    .get(entry.test)
                    .iter()
                    .map(|v| v.abs())
                    .collect(),
            };
            let curve = edf_points(&alt).unwrap();
            let below = curve
                .iter()
                .take_while(|p| p.value <= entry.critical_value)
                .last()
                .map_or(0.0, |p| p.fraction);
            assert!((1.0 - below - entry.power).abs() <= 1.0 / r);
        }
    }

    #[test]
    fn degenerate_samples_are_counted() {
        // tiny mean: many all-zero samples, far more than 1%
        let mut c = config(AlternativeSpec::Poisson { lambda: 0.01 }, 50);
        c.lambda = 0.01;
        c.k_min = 0;
        c.k_max = 1;
        c.n = 2;
        assert!(matches!(
            run_experiment(&c),
            Err(Error::TooManyFailures { .. })
        ));
    }
}
