//! Variate generators.
//!
//! The algorithms are fixed because seeded baselines depend on them:
//!
//! * Poisson: sequential inversion.
//! * Binomial: inversion from the mode-free end (`p ≤ 1/2`, reflecting
//!   otherwise), Bernoulli summation when `(1-p)^m` would underflow.
//! * Negative binomial: sum of `m` geometric failure counts, each by
//!   inversion.
//! * Gamma: Marsaglia-Tsang squeeze; shapes below one use the
//!   `G(k+1) U^{1/k}` boost.
//! * Beta: `G_a / (G_a + G_b)`.
//! * Normal: Box-Muller. Weibull: inverse CDF.

use super::{AlternativeSpec, CountSample};
use crate::error::{domain, Result};
use crate::rng::RngStream;

/// Draws `n` independent variates from `spec`.
pub fn draw(spec: &AlternativeSpec, n: usize, stream: &mut RngStream) -> Result<CountSample> {
    spec.validate()?;
    if n == 0 {
        return Err(domain("sample size must be at least 1"));
    }
    let values = (0..n).map(|_| draw_one(spec, stream)).collect();
    CountSample::new(values)
}

fn draw_one(spec: &AlternativeSpec, rng: &mut RngStream) -> u64 {
    match *spec {
        AlternativeSpec::Poisson { lambda } => poisson(lambda, rng),
        AlternativeSpec::Binomial { m_b, p_b } => binomial(m_b, p_b, rng),
        AlternativeSpec::NegativeBinomial { m_nb, p_nb } => negative_binomial(m_nb, p_nb, rng),
        AlternativeSpec::BetaBinomial { m_b, alpha, beta } => {
            let ga = gamma(alpha, rng);
            let gb = gamma(beta, rng);
            binomial(m_b, ga / (ga + gb), rng)
        }
        AlternativeSpec::BinNegBinMixture { w, m_b, m_nb, p } => {
            if rng.uniform() < w {
                binomial(m_b, p, rng)
            } else {
                negative_binomial(m_nb, p, rng)
            }
        }
        AlternativeSpec::FloorNormal { a } => {
            let z = a + 0.5 + a.sqrt() * rng.standard_normal();
            floor_count(z)
        }
        AlternativeSpec::FloorGamma { k, b } => floor_count(b * gamma(k, rng)),
        AlternativeSpec::FloorWeibull { k, b } => {
            floor_count(b * (-rng.uniform().ln()).powf(1.0 / k))
        }
    }
}

// Negative values clamp to zero.
fn floor_count(z: f64) -> u64 {
    if z <= 0.0 {
        0
    } else {
        z.floor() as u64
    }
}

fn poisson(lambda: f64, rng: &mut RngStream) -> u64 {
    let u = rng.uniform();
    let mut x = 0u64;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf {
        x += 1;
        p *= lambda / x as f64;
        let next = cdf + p;
        if next == cdf {
            // rounding exhausted the tail
            break;
        }
        cdf = next;
    }
    x
}

fn binomial(m: u64, p: f64, rng: &mut RngStream) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return m;
    }
    if p > 0.5 {
        return m - binomial(m, 1.0 - p, rng);
    }
    let q = 1.0 - p;
    let p0 = q.powf(m as f64);
    if p0 < 1e-280 {
        return (0..m).filter(|_| rng.uniform() < p).count() as u64;
    }
    let ratio = p / q;
    let u = rng.uniform();
    let mut x = 0u64;
    let mut prob = p0;
    let mut cdf = p0;
    while u > cdf && x < m {
        prob *= ratio * (m - x) as f64 / (x + 1) as f64;
        x += 1;
        cdf += prob;
    }
    x
}

fn negative_binomial(m: u64, p: f64, rng: &mut RngStream) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    let log_q = (-p).ln_1p();
    (0..m)
        .map(|_| (rng.uniform().ln() / log_q).floor() as u64)
        .sum()
}

/// Standard gamma variate with the given shape (unit scale).
fn gamma(shape: f64, rng: &mut RngStream) -> f64 {
    if shape < 1.0 {
        let boosted = gamma(shape + 1.0, rng);
        return boosted * rng.uniform().powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = rng.standard_normal();
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = rng.uniform();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}
