//! Reference implementations that share no code path with the library:
//! brute-force partial sums, statrs-backed CDFs and direct enumeration.
#![allow(dead_code)]

use statrs::distribution::{ContinuousCDF, Gamma, Normal, Weibull};

/// `T` recomputed from scratch for every prefix.
pub fn gof_statistic(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    let k = counts.len();
    let mut best: f64 = 0.0;
    for last in 0..k {
        let mut partial = 0.0;
        for j in 0..=last {
            let expected = n * probs[j];
            partial += (counts[j] as f64 - expected) / expected.sqrt();
        }
        best = best.max(partial.abs());
    }
    best / (k as f64).sqrt()
}

pub enum Floor {
    Normal { a: f64 },
    Gamma { k: f64, b: f64 },
    Weibull { k: f64, b: f64 },
}

/// Mean and variance of `⌊Z⌋` from the pmf `F(j+1) - F(j)`.
pub fn floor_moments(law: &Floor) -> (f64, f64) {
    let cdf: Box<dyn Fn(f64) -> f64> = match *law {
        Floor::Normal { a } => {
            let d = Normal::new(a + 0.5, a.sqrt()).unwrap();
            Box::new(move |z| d.cdf(z))
        }
        Floor::Gamma { k, b } => {
            let d = Gamma::new(k, 1.0 / b).unwrap();
            Box::new(move |z| if z <= 0.0 { 0.0 } else { d.cdf(z) })
        }
        Floor::Weibull { k, b } => {
            let d = Weibull::new(k, b).unwrap();
            Box::new(move |z| if z <= 0.0 { 0.0 } else { d.cdf(z) })
        }
    };
    let (mut m1, mut m2) = (0.0, 0.0);
    let mut j = 0u32;
    loop {
        let jf = f64::from(j);
        // X = 0 collects everything below 1, negative Z included
        let lower = if j == 0 { 0.0 } else { cdf(jf) };
        let upper = cdf(jf + 1.0);
        let p = upper - lower;
        m1 += jf * p;
        m2 += jf * jf * p;
        if 1.0 - upper < 1e-15 && j > 5 {
            break;
        }
        j += 1;
    }
    (m1, m2 - m1 * m1)
}

/// `E[X(X-1)] / (E X)^2` from a pmf given on `0..len`.
pub fn c_from_pmf(pmf: &[f64]) -> f64 {
    let mean: f64 = pmf.iter().enumerate().map(|(x, p)| x as f64 * p).sum();
    let fact: f64 = pmf
        .iter()
        .enumerate()
        .map(|(x, p)| x as f64 * (x as f64 - 1.0) * p)
        .sum();
    fact / (mean * mean)
}

pub fn binomial_pmf_table(m: u32, p: f64) -> Vec<f64> {
    let mut coef = 1.0f64;
    (0..=m)
        .map(|x| {
            if x > 0 {
                coef *= f64::from(m - x + 1) / f64::from(x);
            }
            coef * p.powi(x as i32) * (1.0 - p).powi((m - x) as i32)
        })
        .collect()
}

/// Poisson pmf by recurrence until the tail is below 1e-16.
pub fn poisson_pmf_table(lambda: f64) -> Vec<f64> {
    let mut out = vec![(-lambda).exp()];
    let mut x = 0.0;
    loop {
        x += 1.0;
        let next = out.last().unwrap() * lambda / x;
        out.push(next);
        if x > lambda && next < 1e-18 {
            return out;
        }
    }
}

/// Failures before the `m`-th success, by recurrence.
pub fn negative_binomial_pmf_table(m: u32, p: f64) -> Vec<f64> {
    let mut out = vec![p.powi(m as i32)];
    let mut x = 0.0;
    loop {
        let next = out.last().unwrap() * (x + f64::from(m)) / (x + 1.0) * (1.0 - p);
        x += 1.0;
        out.push(next);
        if next < 1e-18 && x > 10.0 * f64::from(m) * (1.0 - p) / p {
            return out;
        }
    }
}

pub fn beta_binomial_pmf_table(m: u64, alpha: f64, beta: f64) -> Vec<f64> {
    use statrs::function::beta::ln_beta;
    use statrs::function::factorial::ln_binomial;
    (0..=m)
        .map(|x| {
            (ln_binomial(m, x) + ln_beta(x as f64 + alpha, (m - x) as f64 + beta)
                - ln_beta(alpha, beta))
            .exp()
        })
        .collect()
}
