//! Count distributions: the Poisson null, the eight alternative generating
//! mechanisms, their moments and exact probability mass functions.

mod continuous;
mod sample;

pub use continuous::ContinuousLaw;
pub use sample::draw;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special::{ln_beta, ln_choose, ln_gamma};

/// A generating distribution for count data.
///
/// The negative binomial counts failures before the `m_nb`-th success, with
/// `p_nb` the per-trial success probability. The floor-discretized laws
/// observe `X = ⌊Z⌋` for a continuous `Z`; for `FloorNormal`,
/// `Z ~ N(a + 1/2, a)` and negative draws are clamped to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlternativeSpec {
    Poisson { lambda: f64 },
    Binomial { m_b: u64, p_b: f64 },
    NegativeBinomial { m_nb: u64, p_nb: f64 },
    BetaBinomial { m_b: u64, alpha: f64, beta: f64 },
    BinNegBinMixture { w: f64, m_b: u64, m_nb: u64, p: f64 },
    FloorNormal { a: f64 },
    FloorGamma { k: f64, b: f64 },
    FloorWeibull { k: f64, b: f64 },
}

impl AlternativeSpec {
    /// Checks every parameter against its domain.
    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(domain(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        }
        fn count(name: &str, m: u64) -> Result<()> {
            if m >= 1 {
                Ok(())
            } else {
                Err(domain(format!("{name} must be at least 1")))
            }
        }
        // Binomial-type success probabilities may sit on the closed interval;
        // the endpoints give degenerate but well-defined laws.
        fn probability(name: &str, p: f64) -> Result<()> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(domain(format!("{name} must lie in [0, 1], got {p}")))
            }
        }
        match *self {
            Self::Poisson { lambda } => positive("lambda", lambda),
            Self::Binomial { m_b, p_b } => {
                count("m_b", m_b)?;
                probability("p_b", p_b)
            }
            Self::NegativeBinomial { m_nb, p_nb } => {
                count("m_nb", m_nb)?;
                probability("p_nb", p_nb)?;
                if p_nb == 0.0 {
                    return Err(domain("p_nb must be positive"));
                }
                Ok(())
            }
            Self::BetaBinomial { m_b, alpha, beta } => {
                count("m_b", m_b)?;
                positive("alpha", alpha)?;
                positive("beta", beta)
            }
            Self::BinNegBinMixture { w, m_b, m_nb, p } => {
                probability("w", w)?;
                count("m_b", m_b)?;
                count("m_nb", m_nb)?;
                if !(p > 0.0 && p < 1.0) {
                    return Err(domain(format!("p must lie in (0, 1), got {p}")));
                }
                Ok(())
            }
            Self::FloorNormal { a } => positive("a", a),
            Self::FloorGamma { k, b } | Self::FloorWeibull { k, b } => {
                positive("k", k)?;
                positive("b", b)
            }
        }
    }

    /// True for the laws observed as `⌊Z⌋` of a continuous variable.
    pub fn is_floor_discretized(&self) -> bool {
        matches!(
            self,
            Self::FloorNormal { .. } | Self::FloorGamma { .. } | Self::FloorWeibull { .. }
        )
    }

    /// The underlying continuous law of a floor-discretized spec.
    pub fn continuous_law(&self) -> Option<ContinuousLaw> {
        match *self {
            Self::FloorNormal { a } => Some(ContinuousLaw::Normal {
                mean: a + 0.5,
                sd: a.sqrt(),
            }),
            Self::FloorGamma { k, b } => Some(ContinuousLaw::Gamma { shape: k, scale: b }),
            Self::FloorWeibull { k, b } => Some(ContinuousLaw::Weibull { shape: k, scale: b }),
            _ => None,
        }
    }

    /// Largest attainable value, if the support is finite.
    pub fn support_max(&self) -> Option<u64> {
        match *self {
            Self::Binomial { m_b, .. } | Self::BetaBinomial { m_b, .. } => Some(m_b),
            Self::NegativeBinomial { p_nb: 1.0, .. } => Some(0),
            _ => None,
        }
    }
}

impl fmt::Display for AlternativeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Poisson { lambda } => write!(f, "Poisson(lambda={lambda})"),
            Self::Binomial { m_b, p_b } => write!(f, "Binomial(m_b={m_b}, p_b={p_b})"),
            Self::NegativeBinomial { m_nb, p_nb } => {
                write!(f, "NegativeBinomial(m_nb={m_nb}, p_nb={p_nb})")
            }
            Self::BetaBinomial { m_b, alpha, beta } => {
                write!(f, "BetaBinomial(m_b={m_b}, alpha={alpha}, beta={beta})")
            }
            Self::BinNegBinMixture { w, m_b, m_nb, p } => {
                write!(f, "BinNegBinMixture(w={w}, m_b={m_b}, m_nb={m_nb}, p={p})")
            }
            Self::FloorNormal { a } => write!(f, "FloorNormal(a={a})"),
            Self::FloorGamma { k, b } => write!(f, "FloorGamma(k={k}, b={b})"),
            Self::FloorWeibull { k, b } => write!(f, "FloorWeibull(k={k}, b={b})"),
        }
    }
}

/// An ordered, ungrouped sample of non-negative counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct CountSample(Vec<u64>);

impl CountSample {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("a sample needs at least one observation"));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sample mean `X̄`.
    pub fn mean(&self) -> f64 {
        self.0.iter().map(|&x| x as f64).sum::<f64>() / self.0.len() as f64
    }

    /// Sample variance with divisor `n`.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.0
            .iter()
            .map(|&x| (x as f64 - mean).powi(2))
            .sum::<f64>()
            / self.0.len() as f64
    }
}

impl TryFrom<Vec<u64>> for CountSample {
    type Error = Error;

    fn try_from(values: Vec<u64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<CountSample> for Vec<u64> {
    fn from(s: CountSample) -> Self {
        s.0
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "Poisson lambda must be positive, got {lambda}"
        )))
    }
}

fn ln_poisson_pmf(lambda: f64, x: u64) -> f64 {
    let xf = x as f64;
    xf * lambda.ln() - lambda - ln_gamma(xf + 1.0)
}

/// Poisson probability `e^{-λ} λ^x / x!`, evaluated in log space.
pub fn poisson_pmf(lambda: f64, x: u64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(ln_poisson_pmf(lambda, x).exp())
}

/// `P(X ≤ x)` for `X ~ Poisson(λ)`, as a partial sum of the pmf.
pub fn poisson_cdf(lambda: f64, x: u64) -> Result<f64> {
    check_lambda(lambda)?;
    let sum: f64 = (0..=x).map(|j| ln_poisson_pmf(lambda, j).exp()).sum();
    Ok(sum.min(1.0))
}

/// `P(X > x)` for `X ~ Poisson(λ)`.
///
/// Right of the mode the upper terms are summed directly so the result keeps
/// relative precision deep in the tail.
pub fn poisson_sf(lambda: f64, x: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if (x as f64) < lambda {
        return Ok((1.0 - poisson_cdf(lambda, x)?).max(0.0));
    }
    let mut j = x + 1;
    let mut term = ln_poisson_pmf(lambda, j).exp();
    let mut sum = 0.0;
    while term > 0.0 && term > sum * 1e-17 {
        sum += term;
        j += 1;
        term *= lambda / j as f64;
    }
    Ok(sum)
}

/// Exact probability `P(X = x)` under `spec`.
pub fn pmf(spec: &AlternativeSpec, x: u64) -> Result<f64> {
    spec.validate()?;
    let p = match *spec {
        AlternativeSpec::Poisson { lambda } => ln_poisson_pmf(lambda, x).exp(),
        AlternativeSpec::Binomial { m_b, p_b } => binomial_pmf(m_b, p_b, x),
        AlternativeSpec::NegativeBinomial { m_nb, p_nb } => negative_binomial_pmf(m_nb, p_nb, x),
        AlternativeSpec::BetaBinomial { m_b, alpha, beta } => {
            if x > m_b {
                0.0
            } else {
                let xf = x as f64;
                (ln_choose(m_b, x) + ln_beta(xf + alpha, (m_b - x) as f64 + beta)
                    - ln_beta(alpha, beta))
                .exp()
            }
        }
        AlternativeSpec::BinNegBinMixture { w, m_b, m_nb, p } => {
            w * binomial_pmf(m_b, p, x) + (1.0 - w) * negative_binomial_pmf(m_nb, p, x)
        }
        AlternativeSpec::FloorNormal { .. }
        | AlternativeSpec::FloorGamma { .. }
        | AlternativeSpec::FloorWeibull { .. } => {
            let law = spec.continuous_law().expect("floor spec");
            let xf = x as f64;
            let upper = law.sf(xf + 1.0);
            if x == 0 {
                // X = 0 also absorbs any mass below zero
                1.0 - upper
            } else {
                law.sf(xf) - upper
            }
        }
    };
    Ok(p.max(0.0))
}

fn binomial_pmf(m: u64, p: f64, x: u64) -> f64 {
    if x > m {
        return 0.0;
    }
    if p == 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if x == m { 1.0 } else { 0.0 };
    }
    (ln_choose(m, x) + x as f64 * p.ln() + (m - x) as f64 * (1.0 - p).ln()).exp()
}

fn negative_binomial_pmf(m: u64, p: f64, x: u64) -> f64 {
    if p == 1.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    (ln_choose(x + m - 1, x) + m as f64 * p.ln() + x as f64 * (1.0 - p).ln()).exp()
}

/// Closed-form mean and variance.
///
/// Floor-discretized laws have no closed form; use
/// [`crate::calibrate::discretized_moments`] for them.
pub fn analytic_moments(spec: &AlternativeSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let moments = match *spec {
        AlternativeSpec::Poisson { lambda } => (lambda, lambda),
        AlternativeSpec::Binomial { m_b, p_b } => binomial_moments(m_b, p_b),
        AlternativeSpec::NegativeBinomial { m_nb, p_nb } => negative_binomial_moments(m_nb, p_nb),
        AlternativeSpec::BetaBinomial { m_b, alpha, beta } => {
            let m = m_b as f64;
            let p0 = alpha / (alpha + beta);
            let rho = 1.0 / (alpha + beta + 1.0);
            (m * p0, m * p0 * (1.0 - p0) * (1.0 + (m - 1.0) * rho))
        }
        AlternativeSpec::BinNegBinMixture { w, m_b, m_nb, p } => {
            // raw moments mix linearly
            let (mu_b, v_b) = binomial_moments(m_b, p);
            let (mu_nb, v_nb) = negative_binomial_moments(m_nb, p);
            let mean = w * mu_b + (1.0 - w) * mu_nb;
            let second = w * (v_b + mu_b * mu_b) + (1.0 - w) * (v_nb + mu_nb * mu_nb);
            (mean, second - mean * mean)
        }
        _ => {
            return Err(Error::UnsupportedSpec {
                operation: "analytic_moments",
                spec: spec.to_string(),
            })
        }
    };
    Ok(moments)
}

fn binomial_moments(m: u64, p: f64) -> (f64, f64) {
    let m = m as f64;
    (m * p, m * p * (1.0 - p))
}

fn negative_binomial_moments(m: u64, p: f64) -> (f64, f64) {
    let m = m as f64;
    (m * (1.0 - p) / p, m * (1.0 - p) / (p * p))
}

/// `c = E[X(X-1)] / (E X)^2` for the three members of the Poisson family
/// where it characterizes the law: `1`, `(m-1)/m` and `(m+1)/m`.
pub fn theoretical_c(spec: &AlternativeSpec) -> Result<f64> {
    spec.validate()?;
    match *spec {
        AlternativeSpec::Poisson { .. } => Ok(1.0),
        AlternativeSpec::Binomial { m_b, .. } => Ok((m_b as f64 - 1.0) / m_b as f64),
        AlternativeSpec::NegativeBinomial { m_nb, .. } => Ok((m_nb as f64 + 1.0) / m_nb as f64),
        _ => Err(Error::UnsupportedSpec {
            operation: "theoretical_c",
            spec: spec.to_string(),
        }),
    }
}

/// Mean of any alternative: closed form where available, series otherwise.
pub fn mean_of(spec: &AlternativeSpec) -> Result<f64> {
    if spec.is_floor_discretized() {
        crate::calibrate::discretized_moments(spec, crate::calibrate::DEFAULT_TAIL_EPS)
            .map(|(m, _)| m)
    } else {
        analytic_moments(spec).map(|(m, _)| m)
    }
}
