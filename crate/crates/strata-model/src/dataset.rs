//! Observed FRF data grouped by domain (one domain per structure or per
//! test condition).

use strata_modal::{FrequencyGrid, FrequencyUnit};

use crate::ModelError;

/// Real-part FRF observations for one domain.
#[derive(Debug, Clone)]
pub struct DomainObservations {
    frequencies: FrequencyGrid,
    real: Vec<f64>,
    temperature_c: Option<f64>,
}

impl DomainObservations {
    /// `frequencies` may arrive in any unit; they are stored in rad/s.
    pub fn new(
        frequencies: FrequencyGrid,
        real: Vec<f64>,
        temperature_c: Option<f64>,
    ) -> Result<Self, ModelError> {
        if frequencies.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        if frequencies.len() != real.len() {
            return Err(ModelError::LengthMismatch {
                frequencies: frequencies.len(),
                observations: real.len(),
            });
        }
        if real.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteObservation);
        }
        if let Some(t) = temperature_c {
            if !t.is_finite() {
                return Err(ModelError::NonFiniteTemperature);
            }
        }
        let frequencies = match frequencies.unit() {
            FrequencyUnit::RadPerSec => frequencies,
            FrequencyUnit::Hz => frequencies.in_rad_per_sec(),
        };
        Ok(DomainObservations { frequencies, real, temperature_c })
    }

    pub fn frequencies(&self) -> &FrequencyGrid {
        &self.frequencies
    }

    /// Grid values in rad/s (the stored unit).
    pub fn omega_rad(&self) -> &[f64] {
        self.frequencies.values()
    }

    pub fn real(&self) -> &[f64] {
        &self.real
    }

    pub fn temperature_c(&self) -> Option<f64> {
        self.temperature_c
    }

    pub fn len(&self) -> usize {
        self.real.len()
    }

    pub fn is_empty(&self) -> bool {
        self.real.is_empty()
    }
}

/// A population of per-domain FRF observations.
#[derive(Debug, Clone)]
pub struct FrfDataset {
    domains: Vec<DomainObservations>,
}

impl FrfDataset {
    pub fn new(domains: Vec<DomainObservations>) -> Result<Self, ModelError> {
        if domains.is_empty() {
            return Err(ModelError::EmptyDataset);
        }
        Ok(FrfDataset { domains })
    }

    pub fn domains(&self) -> &[DomainObservations] {
        &self.domains
    }

    pub fn n_domains(&self) -> usize {
        self.domains.len()
    }

    /// Total observation count across domains.
    pub fn n_points(&self) -> usize {
        self.domains.iter().map(|d| d.len()).sum()
    }

    /// Temperatures for all domains, or an error if any domain lacks one
    /// (temperature-conditioned models need every domain labelled).
    pub fn temperatures(&self) -> Result<Vec<f64>, ModelError> {
        self.domains
            .iter()
            .enumerate()
            .map(|(k, d)| d.temperature_c().ok_or(ModelError::MissingTemperature { domain: k }))
            .collect()
    }
}
