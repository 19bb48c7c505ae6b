//! Posterior post-processing for FRF population models.
//!
//! Everything here is a pure function over draw arrays: convergence
//! diagnostics (split R-hat, rank-normalised bulk ESS, scalar summaries),
//! Gaussian kernel density estimates, population-level marginals obtained
//! by re-sampling hyper-parameter draws, posterior-predictive FRF bands,
//! temperature extrapolation of modal parameters, and NMSE scoring.
//!
//! Draw vectors are constrained-space values; callers convert sampler
//! output before analysis.

mod diagnostics;
mod extrapolate;
mod kde;
mod marginal;
mod predictive;

pub use diagnostics::{rhat_ess, summarize_parameter, ScalarSummary};
pub use extrapolate::{extrapolate_temperature, nmse, ModalTrend, TemperaturePrediction};
pub use kde::{kde, KdeCurve};
pub use marginal::{population_marginal, PopulationFamily};
pub use predictive::{
    posterior_predictive_frf, predictive_band, BandComposition, PredictiveBand,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("convergence diagnostics need at least two chains")]
    TooFewChains,
    #[error("convergence diagnostics need at least four draws per chain")]
    TooFewDraws,
    #[error("chain is constant; diagnostics are undefined")]
    ConstantChain,
    #[error("input contains non-finite values")]
    NonFiniteInput,
    #[error("kernel density estimation needs at least two samples")]
    TooFewSamples,
    #[error("samples are all equal; bandwidth is undefined")]
    ConstantSamples,
    #[error("kernel density estimation needs at least two grid points")]
    TooFewGridPoints,
    #[error("no posterior draws")]
    EmptyTrace,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyData,
    #[error("test data are constant; the normalising variance is zero")]
    ConstantTestData,
    #[error("invalid distribution parameters for a population draw")]
    BadFamilyParameter,
}
