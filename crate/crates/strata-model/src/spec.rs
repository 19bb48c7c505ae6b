//! Model specifications: pooling modes and prior constants.
//!
//! All frequency quantities are rad/s. Scales are standard deviations; the
//! corresponding densities are parameterised internally by variance, so a
//! scale `s` enters as `s²`. Every constant is overridable — the defaults
//! describe a two-mode population of lightly damped structures observed
//! around 190 and 335 rad/s and a single-mode structure near 910 rad/s.

use crate::ModelError;

/// How information is shared across domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolingMode {
    /// Every domain gets its own parameters *and* its own hyper-level nodes;
    /// nothing is shared. Equivalent to fitting each domain independently.
    NoPooling,
    /// Domains share hyper-level distributions (and residues and noise
    /// variance); domain-level frequencies and dampings vary per domain.
    PartialPooling,
    /// One parameter set serves every domain; domain identity is ignored.
    CompletePooling,
}

/// Hyperprior constants for one vibration mode.
///
/// Each pair is (location, scale) of the hyperprior over the named
/// quantity. Frequency hyperpriors are truncated normal, damping shape
/// hyperpriors are truncated normal, the residue mean is normal and the
/// residue variance truncated normal.
#[derive(Debug, Clone, Copy)]
pub struct ModePrior {
    pub freq_mean_loc: f64,
    pub freq_mean_scale: f64,
    pub freq_var_loc: f64,
    pub freq_var_scale: f64,
    pub damping_alpha_loc: f64,
    pub damping_alpha_scale: f64,
    pub damping_beta_loc: f64,
    pub damping_beta_scale: f64,
    pub residue_mean_loc: f64,
    pub residue_mean_scale: f64,
    pub residue_var_loc: f64,
    pub residue_var_scale: f64,
}

impl ModePrior {
    /// Default constants centred at `freq_mean_loc` rad/s: frequency mean
    /// scale 5, frequency variance TN(5, 5²), damping shapes TN(6, 0.5²)
    /// and TN(1000, 10²), residue mean N(-0.004, 0.003²), residue variance
    /// TN(0.003, 0.003²).
    pub fn centered_at(freq_mean_loc: f64) -> Self {
        ModePrior {
            freq_mean_loc,
            freq_mean_scale: 5.0,
            freq_var_loc: 5.0,
            freq_var_scale: 5.0,
            damping_alpha_loc: 6.0,
            damping_alpha_scale: 0.5,
            damping_beta_loc: 1000.0,
            damping_beta_scale: 10.0,
            residue_mean_loc: -0.004,
            residue_mean_scale: 0.003,
            residue_var_loc: 0.003,
            residue_var_scale: 0.003,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        let scales = [
            self.freq_mean_scale,
            self.freq_var_scale,
            self.damping_alpha_scale,
            self.damping_beta_scale,
            self.residue_mean_scale,
            self.residue_var_scale,
        ];
        if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(ModelError::BadPriorScale);
        }
        if !self.freq_mean_loc.is_finite() || !(self.freq_mean_loc > 0.0) {
            return Err(ModelError::BadFrequencyCenter { value: self.freq_mean_loc });
        }
        Ok(())
    }
}

/// Hyperprior constants for the shared noise variance: σ²_H ~ TN(μ, σ²)
/// with μ ~ TN(mean_loc, mean_scale²) and σ² ~ TN(var_loc, var_scale²).
/// Defaults are deliberately weak (scale 100).
#[derive(Debug, Clone, Copy)]
pub struct NoisePrior {
    pub mean_loc: f64,
    pub mean_scale: f64,
    pub var_loc: f64,
    pub var_scale: f64,
}

impl Default for NoisePrior {
    fn default() -> Self {
        NoisePrior { mean_loc: 0.0, mean_scale: 100.0, var_loc: 100.0, var_scale: 100.0 }
    }
}

impl NoisePrior {
    fn validate(&self) -> Result<(), ModelError> {
        if !(self.mean_scale > 0.0) || !(self.var_scale > 0.0) {
            return Err(ModelError::BadPriorScale);
        }
        Ok(())
    }
}

/// Full prior specification for the multi-domain hierarchy: one `ModePrior`
/// per mode plus the noise hierarchy.
#[derive(Debug, Clone)]
pub struct PriorSpec {
    pub modes: Vec<ModePrior>,
    pub noise: NoisePrior,
}

impl PriorSpec {
    /// Defaults for every mode, centred at the given rad/s frequencies.
    pub fn with_mode_centers(centers_rad: &[f64]) -> Self {
        PriorSpec {
            modes: centers_rad.iter().map(|&c| ModePrior::centered_at(c)).collect(),
            noise: NoisePrior::default(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }
}

/// Specification of the multi-domain hierarchical model.
#[derive(Debug, Clone)]
pub struct HierarchySpec {
    pub n_domains: usize,
    pub prior: PriorSpec,
    pub pooling: PoolingMode,
    /// Constrain each domain's natural frequencies to be strictly
    /// increasing across modes (removes mode-relabelling ambiguity).
    pub ordered_frequencies: bool,
}

impl HierarchySpec {
    pub fn new(n_domains: usize, prior: PriorSpec, pooling: PoolingMode) -> Self {
        HierarchySpec { n_domains, prior, pooling, ordered_frequencies: true }
    }

    pub fn n_modes(&self) -> usize {
        self.prior.n_modes()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_domains == 0 {
            return Err(ModelError::NoDomains);
        }
        if self.prior.modes.is_empty() {
            return Err(ModelError::NoModes);
        }
        for mode in &self.prior.modes {
            mode.validate()?;
        }
        self.prior.noise.validate()?;
        if self.ordered_frequencies {
            // Initialisation sits at the hyperprior means, so those must
            // respect the ordering constraint themselves.
            let increasing = self
                .prior
                .modes
                .windows(2)
                .all(|w| w[1].freq_mean_loc > w[0].freq_mean_loc);
            if !increasing {
                return Err(ModelError::UnorderedFrequencyCenters);
            }
        }
        Ok(())
    }
}

/// Prior constants for the temperature-conditioned single-mode model.
///
/// The natural frequency follows a quadratic in temperature and damping a
/// linear law; both are anchored at population-level means with the listed
/// priors. Defaults: μ_ω ~ TN(910, 10²) rad/s, μ_ζ ~ TN(0.01, 1²),
/// a₁ ~ N(-0.01, 1²), a₂ ~ N(0.001, 1²), b ~ N(-5e-6, 1²),
/// μ_A ~ N(-0.008, 0.002²), σ²_A ~ TN(0.002, 0.002²), σ²_H ~ TN(0.3, 1²).
#[derive(Debug, Clone, Copy)]
pub struct TemperaturePrior {
    pub freq_mean_loc: f64,
    pub freq_mean_scale: f64,
    pub damping_mean_loc: f64,
    pub damping_mean_scale: f64,
    pub freq_slope_loc: f64,
    pub freq_slope_scale: f64,
    pub freq_curvature_loc: f64,
    pub freq_curvature_scale: f64,
    pub damping_slope_loc: f64,
    pub damping_slope_scale: f64,
    pub residue_mean_loc: f64,
    pub residue_mean_scale: f64,
    pub residue_var_loc: f64,
    pub residue_var_scale: f64,
    pub noise_var_loc: f64,
    pub noise_var_scale: f64,
}

impl Default for TemperaturePrior {
    fn default() -> Self {
        TemperaturePrior {
            freq_mean_loc: 910.0,
            freq_mean_scale: 10.0,
            damping_mean_loc: 0.01,
            damping_mean_scale: 1.0,
            freq_slope_loc: -0.01,
            freq_slope_scale: 1.0,
            freq_curvature_loc: 0.001,
            freq_curvature_scale: 1.0,
            damping_slope_loc: -5e-6,
            damping_slope_scale: 1.0,
            residue_mean_loc: -0.008,
            residue_mean_scale: 0.002,
            residue_var_loc: 0.002,
            residue_var_scale: 0.002,
            noise_var_loc: 0.3,
            noise_var_scale: 1.0,
        }
    }
}

impl TemperaturePrior {
    fn validate(&self) -> Result<(), ModelError> {
        let scales = [
            self.freq_mean_scale,
            self.damping_mean_scale,
            self.freq_slope_scale,
            self.freq_curvature_scale,
            self.damping_slope_scale,
            self.residue_mean_scale,
            self.residue_var_scale,
            self.noise_var_scale,
        ];
        if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(ModelError::BadPriorScale);
        }
        Ok(())
    }
}

/// Specification of the temperature-conditioned model: one training
/// temperature per domain (°C) plus priors.
#[derive(Debug, Clone)]
pub struct TemperatureSpec {
    pub temperatures_c: Vec<f64>,
    pub prior: TemperaturePrior,
    /// When true, the residue hyper-level (μ_A, σ²_A) is sampled with the
    /// priors above. When false those two stay fixed at their prior
    /// locations and only the residue itself is sampled.
    pub sample_residue_hyperpriors: bool,
}

impl TemperatureSpec {
    pub fn new(temperatures_c: Vec<f64>) -> Self {
        TemperatureSpec {
            temperatures_c,
            prior: TemperaturePrior::default(),
            sample_residue_hyperpriors: true,
        }
    }

    pub fn n_domains(&self) -> usize {
        self.temperatures_c.len()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.temperatures_c.is_empty() {
            return Err(ModelError::NoDomains);
        }
        if self.temperatures_c.iter().any(|t| !t.is_finite()) {
            return Err(ModelError::NonFiniteTemperature);
        }
        self.prior.validate()
    }
}
