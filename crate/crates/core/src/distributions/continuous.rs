use serde::{Deserialize, Serialize};

use crate::special::{gamma, gamma_p, gamma_q, normal_cdf, normal_sf};

/// Continuous law underlying a floor-discretized count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ContinuousLaw {
    Normal {
        mean: f64,
        sd: f64,
    },
    /// Density proportional to `(z/scale)^(shape-1) exp(-z/scale)`.
    Gamma {
        shape: f64,
        scale: f64,
    },
    /// `F(z) = 1 - exp(-(z/scale)^shape)`.
    Weibull {
        shape: f64,
        scale: f64,
    },
}

impl ContinuousLaw {
    pub fn cdf(&self, z: f64) -> f64 {
        match *self {
            Self::Normal { mean, sd } => normal_cdf((z - mean) / sd),
            Self::Gamma { shape, scale } => gamma_p(shape, z.max(0.0) / scale),
            Self::Weibull { shape, scale } => {
                if z <= 0.0 {
                    0.0
                } else {
                    -(-(z / scale).powf(shape)).exp_m1()
                }
            }
        }
    }

    /// `P(Z > z)`, evaluated directly rather than as `1 - cdf`.
    pub fn sf(&self, z: f64) -> f64 {
        match *self {
            Self::Normal { mean, sd } => normal_sf((z - mean) / sd),
            Self::Gamma { shape, scale } => gamma_q(shape, z.max(0.0) / scale),
            Self::Weibull { shape, scale } => {
                if z <= 0.0 {
                    1.0
                } else {
                    (-(z / scale).powf(shape)).exp()
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Normal { mean, .. } => mean,
            Self::Gamma { shape, scale } => shape * scale,
            Self::Weibull { shape, scale } => scale * gamma(1.0 + 1.0 / shape),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Normal { sd, .. } => sd * sd,
            Self::Gamma { shape, scale } => shape * scale * scale,
            Self::Weibull { shape, scale } => {
                let g1 = gamma(1.0 + 1.0 / shape);
                scale * scale * (gamma(1.0 + 2.0 / shape) - g1 * g1)
            }
        }
    }
}
