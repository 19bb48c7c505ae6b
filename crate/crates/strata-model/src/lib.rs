//! Probabilistic FRF models over populations of structures.
//!
//! Ties the modal forward model to a Bayesian hierarchy and exposes the
//! result as an unconstrained log-density with exact gradients, ready for
//! Hamiltonian samplers:
//!
//! - [`build_hierarchical_model`]: multi-domain, multi-mode hierarchy where
//!   domains share parent distributions over natural frequency (truncated
//!   normal), damping (beta) and residue (normal), with hyperpriors on each
//!   parent and on the shared noise variance. [`PoolingMode`] switches
//!   between partial pooling, fully independent domains, and one pooled
//!   parameter set.
//! - [`build_temperature_model`]: single-mode model whose domain parameters
//!   are deterministic polynomial functions of temperature; sampling
//!   recovers the polynomial coefficients and population means.
//!
//! All frequencies are rad/s internally. Unconstrained-space bijections
//! (log, logit, increasing-positive) live in [`transform`]; the density
//! kernels with analytic partials in [`density`].

pub mod dataset;
pub mod density;
pub mod hier;
pub mod layout;
pub mod spec;
pub mod temperature;
pub mod transform;

pub use dataset::{DomainObservations, FrfDataset};
pub use hier::{build_hierarchical_model, HierarchicalFrfModel};
pub use layout::{GroupSlots, ParameterLayout};
pub use spec::{
    HierarchySpec, ModePrior, NoisePrior, PoolingMode, PriorSpec, TemperaturePrior,
    TemperatureSpec,
};
pub use temperature::{build_temperature_model, TemperatureFrfModel};
pub use transform::{BlockTransform, TransformPipeline};

use thiserror::Error;

/// Validation failures when assembling datasets, specs, or models.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("dataset contains no domains")]
    EmptyDataset,
    #[error("domain has no observations")]
    EmptyDomain,
    #[error("domain has {frequencies} frequencies but {observations} observations")]
    LengthMismatch { frequencies: usize, observations: usize },
    #[error("observations must be finite")]
    NonFiniteObservation,
    #[error("temperatures must be finite")]
    NonFiniteTemperature,
    #[error("domain {domain} lacks a temperature label")]
    MissingTemperature { domain: usize },
    #[error("spec declares no domains")]
    NoDomains,
    #[error("prior spec declares no modes")]
    NoModes,
    #[error("prior scales must be positive and finite")]
    BadPriorScale,
    #[error("mode frequency center must be positive and finite, got {value}")]
    BadFrequencyCenter { value: f64 },
    #[error("ordered frequencies need strictly increasing mode centers")]
    UnorderedFrequencyCenters,
    #[error("dataset has {data} domains but the spec declares {spec}")]
    DomainCountMismatch { data: usize, spec: usize },
    #[error("domain {domain} temperature {data} does not match the spec's {spec}")]
    TemperatureMismatch { domain: usize, data: f64, spec: f64 },
}
