//! The nine reference power experiments.

use crate::calibrate::mixture_weight;
use crate::distributions::AlternativeSpec;
use crate::engine::{ExperimentConfig, DEFAULT_ALPHA_LEVELS, DEFAULT_EXPECTED_COUNT_FLOOR};
use crate::error::{domain, Result};

pub const PRESET_IDS: std::ops::RangeInclusive<u8> = 1..=9;
pub const PRESET_REPLICATIONS: usize = 5000;

/// Reference extreme-cell probabilities `(p_min, p_max)` of each experiment.
pub const CAPTION_PROBABILITIES: [(f64, f64); 9] = [
    (0.082, 0.053),
    (0.082, 0.053),
    (0.040, 0.068),
    (0.062, 0.084),
    (0.062, 0.077),
    (0.067, 0.083),
    (0.042, 0.034),
    (0.029, 0.027),
    (0.029, 0.027),
];

/// Short human label for a preset.
pub fn preset_title(id: u8) -> Result<&'static str> {
    Ok(match id {
        1 => "binomial alternative",
        2 => "negative binomial alternative",
        3 => "first beta-binomial alternative",
        4 => "second beta-binomial alternative",
        5 => "third beta-binomial alternative",
        6 => "binomial/negative binomial mixture",
        7 => "floor-discretized normal",
        8 => "floor-discretized gamma",
        9 => "floor-discretized Weibull",
        _ => return Err(domain(format!("unknown preset {id}; expected 1-9"))),
    })
}

/// Catalog entry `id` with master seed 1.
pub fn preset(id: u8) -> Result<ExperimentConfig> {
    let (lambda, alternative, n, k_min, k_max) = match id {
        1 => (
            7.0,
            AlternativeSpec::Binomial { m_b: 50, p_b: 0.14 },
            100,
            3,
            12,
        ),
        2 => (
            7.0,
            AlternativeSpec::NegativeBinomial {
                m_nb: 70,
                p_nb: 10.0 / 11.0,
            },
            100,
            3,
            12,
        ),
        3 => (
            5.0,
            AlternativeSpec::BetaBinomial {
                m_b: 10,
                alpha: 4.0,
                beta: 4.0,
            },
            100,
            1,
            9,
        ),
        4 => (
            6.0,
            AlternativeSpec::BetaBinomial {
                m_b: 10,
                alpha: 3.0,
                beta: 2.0,
            },
            100,
            2,
            10,
        ),
        5 => (
            14.0,
            AlternativeSpec::BetaBinomial {
                m_b: 21,
                alpha: 6.0,
                beta: 3.0,
            },
            100,
            8,
            20,
        ),
        6 => (
            10.0,
            AlternativeSpec::BinNegBinMixture {
                w: mixture_weight(20, 10, 0.5)?,
                m_b: 20,
                m_nb: 10,
                p: 0.5,
            },
            100,
            5,
            15,
        ),
        7 => (8.0, AlternativeSpec::FloorNormal { a: 8.0 }, 200, 3, 14),
        8 => (
            10.0,
            AlternativeSpec::FloorGamma {
                k: 11.025,
                b: 0.952,
            },
            200,
            4,
            17,
        ),
        9 => (
            10.0,
            AlternativeSpec::FloorWeibull {
                k: 3.698,
                b: 11.637,
            },
            200,
            4,
            17,
        ),
        _ => return Err(domain(format!("unknown preset {id}; expected 1-9"))),
    };
    Ok(ExperimentConfig {
        lambda,
        alternative,
        n,
        replications: PRESET_REPLICATIONS,
        k_min,
        k_max,
        alpha_levels: DEFAULT_ALPHA_LEVELS.to_vec(),
        master_seed: 1,
        expected_count_floor: DEFAULT_EXPECTED_COUNT_FLOOR,
    })
}
