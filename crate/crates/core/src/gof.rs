//! Test statistics for a Poisson null.
//!
//! The dispersion statistic `ĉ = mean(X(X-1)) / X̄²` compares the second
//! factorial moment with the squared mean; it equals one in expectation
//! under the Poisson and satisfies `ĉ - 1 = (s² - X̄)/X̄² = (FI - 1)/X̄` with
//! `s²` the variance computed with divisor `n` and `FI = s²/X̄` the Fisher
//! index.
//!
//! The goodness-of-fit statistic groups outcomes into `K` cells: a bottom
//! cell `{x ≤ k_min}`, one cell per integer strictly between the bounds and a
//! top cell `{x ≥ k_max}`. With standardized residuals
//! `Y_k = (ν_k - n p_k) / sqrt(n p_k)` it takes the largest absolute partial
//! sum, scaled by `1/sqrt(K)`.
//!
//! All raw-data statistics (`ĉ`, the MLE) use the ungrouped values.

use serde::{Deserialize, Serialize};

use crate::distributions::{poisson_cdf, poisson_pmf, poisson_sf, CountSample};
use crate::error::{domain, Error, Result};

fn positive_mean(sample: &CountSample) -> Result<f64> {
    let mean = sample.mean();
    if mean > 0.0 {
        Ok(mean)
    } else {
        Err(Error::UndefinedStatistic)
    }
}

/// `ĉ = [Σ X_i(X_i - 1) / n] / X̄²`.
pub fn c_hat(sample: &CountSample) -> Result<f64> {
    let mean = positive_mean(sample)?;
    let n = sample.len() as f64;
    let factorial_moment = sample
        .values()
        .iter()
        .map(|&x| {
            let x = x as f64;
            x * (x - 1.0)
        })
        .sum::<f64>()
        / n;
    Ok(factorial_moment / (mean * mean))
}

/// The test statistic `√n (ĉ - 1)`.
pub fn c_hat_statistic(sample: &CountSample) -> Result<f64> {
    Ok((sample.len() as f64).sqrt() * (c_hat(sample)? - 1.0))
}

/// `√n (ĉ - 1) X̄ / √2`, asymptotically standard normal under a Poisson null.
pub fn c_hat_normalized(sample: &CountSample) -> Result<f64> {
    let stat = c_hat_statistic(sample)?;
    Ok(stat * sample.mean() / std::f64::consts::SQRT_2)
}

/// Poisson maximum-likelihood estimate, the raw sample mean.
pub fn poisson_mle(sample: &CountSample) -> Result<f64> {
    let mean = sample.mean();
    if mean > 0.0 {
        Ok(mean)
    } else {
        Err(Error::DegenerateMle)
    }
}

/// Cell layout with Poisson(`theta`) probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellPartition {
    k_min: u64,
    k_max: u64,
    theta: f64,
    probs: Vec<f64>,
}

impl CellPartition {
    pub fn k_min(&self) -> u64 {
        self.k_min
    }

    pub fn k_max(&self) -> u64 {
        self.k_max
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Cell probabilities, bottom cell first.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of cells `K = k_max - k_min + 1`.
    pub fn cells(&self) -> usize {
        self.probs.len()
    }

    /// `P(X ≤ k_min)`.
    pub fn p_min(&self) -> f64 {
        self.probs[0]
    }

    /// `P(X ≥ k_max)`.
    pub fn p_max(&self) -> f64 {
        self.probs[self.probs.len() - 1]
    }

    /// Zero-based index of the cell holding `x`.
    pub fn cell_of(&self, x: u64) -> usize {
        if x <= self.k_min {
            0
        } else if x >= self.k_max {
            self.probs.len() - 1
        } else {
            (x - self.k_min) as usize
        }
    }
}

/// Builds the partition `{≤ k_min}, k_min+1, …, k_max-1, {≥ k_max}` at `theta`.
pub fn build_cells(theta: f64, k_min: u64, k_max: u64) -> Result<CellPartition> {
    if k_min >= k_max {
        return Err(domain(format!(
            "k_min ({k_min}) must be below k_max ({k_max})"
        )));
    }
    if !(theta.is_finite() && theta > 0.0) {
        return Err(domain(format!("theta must be positive, got {theta}")));
    }
    let mut probs = Vec::with_capacity((k_max - k_min + 1) as usize);
    probs.push(poisson_cdf(theta, k_min)?);
    for x in k_min + 1..k_max {
        probs.push(poisson_pmf(theta, x)?);
    }
    probs.push(poisson_sf(theta, k_max - 1)?);
    if let Some(k) = probs.iter().position(|&p| p <= 0.0) {
        return Err(domain(format!(
            "cell {} has zero probability at theta = {theta}",
            k + 1
        )));
    }
    Ok(CellPartition {
        k_min,
        k_max,
        theta,
        probs,
    })
}

/// Observed cell frequencies `ν_1..ν_K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    counts: Vec<u64>,
    n: u64,
}

impl CellCounts {
    /// Wraps raw frequencies; the total is their sum.
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let n = counts.iter().sum();
        Self { counts, n }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

pub fn cell_counts(sample: &CountSample, partition: &CellPartition) -> CellCounts {
    let mut counts = vec![0u64; partition.cells()];
    for &x in sample.values() {
        counts[partition.cell_of(x)] += 1;
    }
    CellCounts {
        counts,
        n: sample.len() as u64,
    }
}

/// Standardized residuals `Y_k = (ν_k - n p_k) / sqrt(n p_k)`.
pub fn residuals(counts: &CellCounts, partition: &CellPartition) -> Result<Vec<f64>> {
    if counts.counts.len() != partition.cells() {
        return Err(domain(format!(
            "{} counts for {} cells",
            counts.counts.len(),
            partition.cells()
        )));
    }
    if counts.n == 0 {
        return Err(domain("cell counts are empty"));
    }
    let n = counts.n as f64;
    counts
        .counts
        .iter()
        .zip(&partition.probs)
        .map(|(&nu, &p)| {
            if p <= 0.0 {
                return Err(domain("cannot standardize a cell with zero probability"));
            }
            let expected = n * p;
            Ok((nu as f64 - expected) / expected.sqrt())
        })
        .collect()
}

/// `T = max_k |Σ_{k' ≤ k} Y_{k'}| / sqrt(K)`.
pub fn gof_statistic(counts: &CellCounts, partition: &CellPartition) -> Result<f64> {
    let y = residuals(counts, partition)?;
    let k = y.len() as f64;
    let max_abs = y
        .iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(acc.abs())
        })
        .fold(0.0, f64::max);
    Ok(max_abs / k.sqrt())
}

/// `T` with cells at the fixed null parameter `theta`.
pub fn gof_at_theta(sample: &CountSample, theta: f64, k_min: u64, k_max: u64) -> Result<f64> {
    let partition = build_cells(theta, k_min, k_max)?;
    gof_statistic(&cell_counts(sample, &partition), &partition)
}

/// `T` with cells rebuilt at the Poisson MLE, same bounds.
pub fn gof_at_mle(sample: &CountSample, k_min: u64, k_max: u64) -> Result<f64> {
    gof_at_theta(sample, poisson_mle(sample)?, k_min, k_max)
}
