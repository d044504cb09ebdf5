//! Testing count data for Poissonity.
//!
//! The crate provides two tests of a Poisson null hypothesis and the
//! machinery to compare their power by simulation:
//!
//! * the dispersion test on `√n(ĉ - 1)`, where `ĉ` is the sample analogue of
//!   `E[X(X-1)] / (E X)²` ([`gof::c_hat_statistic`]);
//! * a goodness-of-fit test on the maximum absolute partial sum of
//!   standardized cell residuals, with cell probabilities either at the null
//!   parameter or at the sample mean ([`gof::gof_statistic`]).
//!
//! [`engine::run_experiment`] runs paired null/alternative experiments and
//! reports EDFs, Monte Carlo critical values and power; [`presets`] holds the
//! nine reference experiments; [`calibrate`] finds equidispersed parameters
//! for floor-discretized gamma and Weibull alternatives.
//!
//! ```
//! use poissonity::distributions::CountSample;
//! use poissonity::gof::{c_hat, gof_at_theta};
//!
//! let sample = CountSample::new(vec![4, 7, 6, 9, 8, 5, 7, 10, 6, 8]).unwrap();
//! let c = c_hat(&sample).unwrap();
//! assert!(c < 1.0); // under-dispersed
//! let t = gof_at_theta(&sample, 7.0, 3, 12).unwrap();
//! assert!(t >= 0.0);
//! ```

pub mod calibrate;
pub mod distributions;
pub mod engine;
pub mod error;
pub mod gof;
pub mod presets;
pub mod rng;
pub mod special;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/dispersion.md")]
    mod dispersion {}
    #[doc = include_str!("../../../book/src/goodness-of-fit.md")]
    mod goodness_of_fit {}
    #[doc = include_str!("../../../book/src/alternatives.md")]
    mod alternatives {}
    #[doc = include_str!("../../../book/src/calibration.md")]
    mod calibration {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
