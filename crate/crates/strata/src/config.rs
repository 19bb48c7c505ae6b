//! Run configuration: one JSON document covering every subcommand.
//!
//! Every field has a default, so an absent config file (or any subset of
//! keys) is valid. Frequencies in the file are Hz (and Hz² for frequency
//! variances); they are converted to rad/s once at ingestion. The defaults
//! reproduce the reference protocol: 4 chains, 10000 draws after 5000
//! warm-up at target acceptance 0.99; 5% training noise; 20 Hann blocks;
//! a 24–61 Hz band with two modes.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use strata_hmc::SamplerConfig;
use strata_model::{
    HierarchySpec, PoolingMode, PriorSpec, TemperaturePrior, TemperatureSpec,
};
use strata_signal::WindowKind;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every stochastic step derives from it.
    pub seed: u64,
    /// Directory all artefacts are written to (and, for relative input
    /// paths of `fit`/`predict`/`diagnose`, read from).
    pub out_dir: PathBuf,
    pub simulate: SimulateConfig,
    pub estimate: EstimateConfig,
    pub fit: FitConfig,
    pub predict: PredictConfig,
    pub diagnose: DiagnoseConfig,
    pub sampler: SamplerSettings,
    pub convergence: ConvergenceGates,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out_dir: PathBuf::from("out"),
            simulate: SimulateConfig::default(),
            estimate: EstimateConfig::default(),
            fit: FitConfig::default(),
            predict: PredictConfig::default(),
            diagnose: DiagnoseConfig::default(),
            sampler: SamplerSettings::default(),
            convergence: ConvergenceGates::default(),
        }
    }
}

impl RunConfig {
    /// Defaults when `path` is `None`; otherwise the parsed, validated
    /// file. Unknown keys are rejected to catch typos.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let cfg = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Data(format!("cannot read config {}: {e}", p.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Usage(format!("config {}: {e}", p.display()))
                })?
            }
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.simulate.validate()?;
        self.estimate.validate()?;
        self.fit.validate()?;
        self.sampler.validate()?;
        self.convergence.validate()
    }
}

fn check_band(band: &[f64; 2], what: &str) -> Result<(), CliError> {
    if !(band[0].is_finite() && band[1].is_finite() && 0.0 <= band[0] && band[0] < band[1]) {
        return Err(CliError::Usage(format!(
            "{what}: band lower bound must be non-negative and below the upper bound, got [{}, {}]",
            band[0], band[1]
        )));
    }
    Ok(())
}

/// Ground-truth modal parameters of one mode (frequency in Hz).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeTruth {
    pub freq_hz: f64,
    pub damping: f64,
    pub residue: f64,
}

/// Temperature law for single-structure simulation: the natural frequency
/// is quadratic and the damping ratio linear in temperature, anchored at
/// the first `modes` entry (its values apply at 0 °C).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemperatureSim {
    pub train_temperatures_c: Vec<f64>,
    pub test_temperatures_c: Vec<f64>,
    pub freq_slope_hz_per_c: f64,
    pub freq_curvature_hz_per_c2: f64,
    pub damping_slope_per_c: f64,
}

impl Default for TemperatureSim {
    fn default() -> Self {
        TemperatureSim {
            train_temperatures_c: vec![-10.0, -5.0, 10.0, 25.0],
            test_temperatures_c: (0..11).map(|i| -20.0 + 5.0 * i as f64).collect(),
            freq_slope_hz_per_c: -0.5,
            freq_curvature_hz_per_c2: 0.007,
            damping_slope_per_c: -8e-5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Number of synthetic structures (ignored when `temperature` is set:
    /// the training temperatures then define the domains).
    pub n_domains: usize,
    /// Population-level ground-truth modes.
    pub modes: Vec<ModeTruth>,
    /// Per-domain relative jitter of the natural frequencies, uniform in
    /// ±this fraction. Zero disables jittering.
    pub freq_jitter_fraction: f64,
    /// Truth grid band edges in Hz.
    pub band_hz: [f64; 2],
    /// Number of evenly spaced truth grid lines.
    pub grid_points: usize,
    /// Training observations kept per domain; length must equal the domain
    /// count.
    pub training_points: Vec<usize>,
    /// Std of added Gaussian noise as a fraction of the peak |FRF|.
    pub noise_fraction: f64,
    pub temperature: Option<TemperatureSim>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            n_domains: 4,
            modes: vec![
                ModeTruth { freq_hz: 30.2, damping: 0.0063, residue: -0.0042 },
                ModeTruth { freq_hz: 53.3, damping: 0.0055, residue: -0.0038 },
            ],
            freq_jitter_fraction: 0.02,
            band_hz: [24.0, 61.0],
            grid_points: 200,
            training_points: vec![100, 100, 7, 20],
            noise_fraction: 0.05,
            temperature: None,
        }
    }
}

impl SimulateConfig {
    pub fn n_effective_domains(&self) -> usize {
        match &self.temperature {
            Some(t) => t.train_temperatures_c.len(),
            None => self.n_domains,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        check_band(&self.band_hz, "simulate")?;
        if self.modes.is_empty() {
            return Err(CliError::Usage("simulate: at least one mode is required".into()));
        }
        if self.grid_points < 2 {
            return Err(CliError::Usage("simulate: grid_points must be at least 2".into()));
        }
        if !(self.noise_fraction.is_finite() && self.noise_fraction >= 0.0) {
            return Err(CliError::Usage(format!(
                "simulate: noise_fraction must be non-negative, got {}",
                self.noise_fraction
            )));
        }
        if !(self.freq_jitter_fraction.is_finite()
            && (0.0..1.0).contains(&self.freq_jitter_fraction))
        {
            return Err(CliError::Usage(format!(
                "simulate: freq_jitter_fraction must lie in [0, 1), got {}",
                self.freq_jitter_fraction
            )));
        }
        let n = self.n_effective_domains();
        if n == 0 {
            return Err(CliError::Usage("simulate: no domains configured".into()));
        }
        if self.training_points.len() != n {
            return Err(CliError::Usage(format!(
                "simulate: training_points has {} entries for {} domains",
                self.training_points.len(),
                n
            )));
        }
        for &k in &self.training_points {
            if k == 0 || k > self.grid_points {
                return Err(CliError::Usage(format!(
                    "simulate: each training count must lie in 1..={}, got {k}",
                    self.grid_points
                )));
            }
        }
        if let Some(t) = &self.temperature {
            if self.modes.len() != 1 {
                return Err(CliError::Usage(
                    "simulate: temperature simulation uses exactly one mode".into(),
                ));
            }
            for v in t.train_temperatures_c.iter().chain(&t.test_temperatures_c) {
                if !v.is_finite() {
                    return Err(CliError::Usage("simulate: non-finite temperature".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    /// Excitation time series (`time_s,value`).
    pub force_path: PathBuf,
    /// Response time series (`time_s,value`).
    pub response_path: PathBuf,
    /// Output FRF CSV, relative to the output directory.
    pub output: PathBuf,
    /// Number of averaging blocks.
    pub blocks: usize,
    /// `hann` or `rectangular`.
    pub window: String,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            force_path: PathBuf::from("force.csv"),
            response_path: PathBuf::from("response.csv"),
            output: PathBuf::from("frf.csv"),
            blocks: 20,
            window: "hann".into(),
        }
    }
}

impl EstimateConfig {
    pub fn window_kind(&self) -> Result<WindowKind, CliError> {
        match self.window.as_str() {
            "hann" => Ok(WindowKind::Hann),
            "rectangular" => Ok(WindowKind::Rectangular),
            other => Err(CliError::Usage(format!(
                "estimate: unknown window '{other}' (expected hann or rectangular)"
            ))),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.blocks == 0 {
            return Err(CliError::Usage("estimate: blocks must be positive".into()));
        }
        self.window_kind().map(|_| ())
    }
}

/// Uniform overrides of the hierarchical prior constants; unset fields
/// keep the built-in defaults. Frequency-dimensioned fields are Hz (Hz²
/// for variances) and apply to every mode.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorOverrides {
    pub freq_mean_scale_hz: Option<f64>,
    pub freq_var_loc_hz2: Option<f64>,
    pub freq_var_scale_hz2: Option<f64>,
    pub damping_alpha_loc: Option<f64>,
    pub damping_alpha_scale: Option<f64>,
    pub damping_beta_loc: Option<f64>,
    pub damping_beta_scale: Option<f64>,
    pub residue_mean_loc: Option<f64>,
    pub residue_mean_scale: Option<f64>,
    pub residue_var_loc: Option<f64>,
    pub residue_var_scale: Option<f64>,
    pub noise_mean_loc: Option<f64>,
    pub noise_mean_scale: Option<f64>,
    pub noise_var_loc: Option<f64>,
    pub noise_var_scale: Option<f64>,
}

/// Overrides of the temperature-model prior; unset fields keep the
/// built-in defaults. Frequency fields are Hz-domain (per °C, per °C²).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemperaturePriorOverrides {
    pub freq_mean_loc_hz: Option<f64>,
    pub freq_mean_scale_hz: Option<f64>,
    pub damping_mean_loc: Option<f64>,
    pub damping_mean_scale: Option<f64>,
    pub freq_slope_loc_hz: Option<f64>,
    pub freq_slope_scale_hz: Option<f64>,
    pub freq_curvature_loc_hz: Option<f64>,
    pub freq_curvature_scale_hz: Option<f64>,
    pub damping_slope_loc: Option<f64>,
    pub damping_slope_scale: Option<f64>,
    pub residue_mean_loc: Option<f64>,
    pub residue_mean_scale: Option<f64>,
    pub residue_var_loc: Option<f64>,
    pub residue_var_scale: Option<f64>,
    pub noise_var_loc: Option<f64>,
    pub noise_var_scale: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Training FRF CSVs. Empty: every `train_<k>.csv` in the output
    /// directory, ordered by k.
    pub train_paths: Vec<PathBuf>,
    /// `partial`, `none`, or `complete`.
    pub pooling: String,
    /// Prior centers of the natural frequencies in Hz; the length sets the
    /// mode count.
    pub mode_centers_hz: Vec<f64>,
    /// Optional band restriction (Hz); rows outside are dropped.
    pub band_hz: Option<[f64; 2]>,
    /// Fit the temperature-conditioned single-mode model instead of the
    /// multi-domain hierarchy (training files must carry temperature
    /// tags).
    pub temperature_model: bool,
    /// Temperature model only: sample the residue hyper-level (two extra
    /// coordinates) instead of fixing it at its prior location. With a
    /// single structure the hyper-variance is informed by one residue
    /// only, which mixes poorly; the default keeps it fixed.
    pub sample_residue_hyperpriors: bool,
    pub prior: PriorOverrides,
    pub temperature_prior: TemperaturePriorOverrides,
    pub trace_output: PathBuf,
    pub adaptation_output: PathBuf,
    pub summary_output: PathBuf,
    /// Write population-marginal KDE CSVs (hierarchy fits only).
    pub write_kde: bool,
    pub kde_grid_points: usize,
    /// Write per-domain posterior-predictive band CSVs (hierarchy fits
    /// only).
    pub write_bands: bool,
    pub band_grid_points: usize,
    /// `std-plus-noise-sd` or `root-sum-squares`.
    pub band_composition: String,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            train_paths: Vec::new(),
            pooling: "partial".into(),
            mode_centers_hz: vec![30.2, 53.3],
            band_hz: None,
            temperature_model: false,
            sample_residue_hyperpriors: false,
            prior: PriorOverrides::default(),
            temperature_prior: TemperaturePriorOverrides::default(),
            trace_output: PathBuf::from("trace.csv"),
            adaptation_output: PathBuf::from("adaptation.json"),
            summary_output: PathBuf::from("summary.json"),
            write_kde: true,
            kde_grid_points: 512,
            write_bands: true,
            band_grid_points: 200,
            band_composition: "std-plus-noise-sd".into(),
        }
    }
}

impl FitConfig {
    pub fn pooling_mode(&self) -> Result<PoolingMode, CliError> {
        match self.pooling.as_str() {
            "partial" => Ok(PoolingMode::PartialPooling),
            "none" => Ok(PoolingMode::NoPooling),
            "complete" => Ok(PoolingMode::CompletePooling),
            other => Err(CliError::Usage(format!(
                "fit: unknown pooling '{other}' (expected partial, none or complete)"
            ))),
        }
    }

    /// Hierarchy prior: built-in constants centred at the configured mode
    /// frequencies, with any overrides applied uniformly across modes.
    pub fn prior_spec(&self) -> PriorSpec {
        let centers_rad: Vec<f64> = self.mode_centers_hz.iter().map(|f| f * TAU).collect();
        let mut prior = PriorSpec::with_mode_centers(&centers_rad);
        let o = &self.prior;
        for m in prior.modes.iter_mut() {
            apply(&mut m.freq_mean_scale, o.freq_mean_scale_hz.map(|v| v * TAU));
            apply(&mut m.freq_var_loc, o.freq_var_loc_hz2.map(|v| v * TAU * TAU));
            apply(&mut m.freq_var_scale, o.freq_var_scale_hz2.map(|v| v * TAU * TAU));
            apply(&mut m.damping_alpha_loc, o.damping_alpha_loc);
            apply(&mut m.damping_alpha_scale, o.damping_alpha_scale);
            apply(&mut m.damping_beta_loc, o.damping_beta_loc);
            apply(&mut m.damping_beta_scale, o.damping_beta_scale);
            apply(&mut m.residue_mean_loc, o.residue_mean_loc);
            apply(&mut m.residue_mean_scale, o.residue_mean_scale);
            apply(&mut m.residue_var_loc, o.residue_var_loc);
            apply(&mut m.residue_var_scale, o.residue_var_scale);
        }
        apply(&mut prior.noise.mean_loc, o.noise_mean_loc);
        apply(&mut prior.noise.mean_scale, o.noise_mean_scale);
        apply(&mut prior.noise.var_loc, o.noise_var_loc);
        apply(&mut prior.noise.var_scale, o.noise_var_scale);
        prior
    }

    pub fn hierarchy_spec(&self, n_domains: usize) -> Result<HierarchySpec, CliError> {
        Ok(HierarchySpec::new(n_domains, self.prior_spec(), self.pooling_mode()?))
    }

    pub fn temperature_spec(&self, temperatures_c: Vec<f64>) -> TemperatureSpec {
        let mut spec = TemperatureSpec::new(temperatures_c);
        spec.sample_residue_hyperpriors = self.sample_residue_hyperpriors;
        let o = &self.temperature_prior;
        let p: &mut TemperaturePrior = &mut spec.prior;
        apply(&mut p.freq_mean_loc, o.freq_mean_loc_hz.map(|v| v * TAU));
        apply(&mut p.freq_mean_scale, o.freq_mean_scale_hz.map(|v| v * TAU));
        apply(&mut p.damping_mean_loc, o.damping_mean_loc);
        apply(&mut p.damping_mean_scale, o.damping_mean_scale);
        apply(&mut p.freq_slope_loc, o.freq_slope_loc_hz.map(|v| v * TAU));
        apply(&mut p.freq_slope_scale, o.freq_slope_scale_hz.map(|v| v * TAU));
        apply(&mut p.freq_curvature_loc, o.freq_curvature_loc_hz.map(|v| v * TAU));
        apply(&mut p.freq_curvature_scale, o.freq_curvature_scale_hz.map(|v| v * TAU));
        apply(&mut p.damping_slope_loc, o.damping_slope_loc);
        apply(&mut p.damping_slope_scale, o.damping_slope_scale);
        apply(&mut p.residue_mean_loc, o.residue_mean_loc);
        apply(&mut p.residue_mean_scale, o.residue_mean_scale);
        apply(&mut p.residue_var_loc, o.residue_var_loc);
        apply(&mut p.residue_var_scale, o.residue_var_scale);
        apply(&mut p.noise_var_loc, o.noise_var_loc);
        apply(&mut p.noise_var_scale, o.noise_var_scale);
        spec
    }

    pub fn band_composition(&self) -> Result<strata_analysis::BandComposition, CliError> {
        parse_composition(&self.band_composition, "fit")
    }

    fn validate(&self) -> Result<(), CliError> {
        self.pooling_mode()?;
        self.band_composition()?;
        if let Some(band) = &self.band_hz {
            check_band(band, "fit")?;
        }
        if self.mode_centers_hz.is_empty() {
            return Err(CliError::Usage("fit: mode_centers_hz must not be empty".into()));
        }
        if self.kde_grid_points < 2 || self.band_grid_points < 2 {
            return Err(CliError::Usage(
                "fit: kde_grid_points and band_grid_points must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

fn apply(target: &mut f64, value: Option<f64>) {
    if let Some(v) = value {
        *target = v;
    }
}

pub fn parse_composition(
    name: &str,
    section: &str,
) -> Result<strata_analysis::BandComposition, CliError> {
    match name {
        "std-plus-noise-sd" => Ok(strata_analysis::BandComposition::StdPlusNoiseSd),
        "root-sum-squares" => Ok(strata_analysis::BandComposition::RootSumSquares),
        other => Err(CliError::Usage(format!(
            "{section}: unknown band_composition '{other}' (expected std-plus-noise-sd or root-sum-squares)"
        ))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictConfig {
    /// Trace CSV of a temperature-model fit, relative to the output
    /// directory.
    pub trace_path: PathBuf,
    /// Training FRF CSVs (for excluding trained points from scoring).
    /// Empty: every `train_<k>.csv` in the output directory.
    pub train_paths: Vec<PathBuf>,
    /// Temperature-tagged test FRF CSVs. Empty: every `test_<k>.csv` in
    /// the output directory.
    pub test_paths: Vec<PathBuf>,
    pub nmse_output: PathBuf,
    /// Per-temperature modal-parameter extrapolation table.
    pub extrapolation_output: PathBuf,
    /// Predicted curve files are named `<prefix><k>.csv`.
    pub curve_prefix: String,
    /// `std-plus-noise-sd` or `root-sum-squares`.
    pub band_composition: String,
    /// Relative tolerance when matching training frequencies and
    /// temperatures for exclusion.
    pub exclusion_tolerance: f64,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            trace_path: PathBuf::from("trace.csv"),
            train_paths: Vec::new(),
            test_paths: Vec::new(),
            nmse_output: PathBuf::from("nmse.csv"),
            extrapolation_output: PathBuf::from("extrapolation.csv"),
            curve_prefix: "predicted_".into(),
            band_composition: "std-plus-noise-sd".into(),
            exclusion_tolerance: 1e-9,
        }
    }
}

impl PredictConfig {
    pub fn band_composition(&self) -> Result<strata_analysis::BandComposition, CliError> {
        parse_composition(&self.band_composition, "predict")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseConfig {
    /// Trace CSV to diagnose, relative to the output directory.
    pub trace_path: PathBuf,
    pub output: PathBuf,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig {
            trace_path: PathBuf::from("trace.csv"),
            output: PathBuf::from("diagnostics.csv"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSettings {
    pub chains: usize,
    pub draws: usize,
    pub warmup: usize,
    pub target_accept: f64,
    pub max_tree_depth: usize,
    pub initial_jitter: f64,
    pub divergence_energy_threshold: f64,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        SamplerSettings {
            chains: 4,
            draws: 10_000,
            warmup: 5_000,
            target_accept: 0.99,
            max_tree_depth: 10,
            initial_jitter: 0.1,
            divergence_energy_threshold: 1000.0,
        }
    }
}

impl SamplerSettings {
    pub fn to_sampler_config(&self, seed: u64) -> SamplerConfig {
        SamplerConfig {
            chains: self.chains,
            warmup_draws: self.warmup,
            sampling_draws: self.draws,
            target_accept: self.target_accept,
            max_tree_depth: self.max_tree_depth,
            divergence_energy_threshold: self.divergence_energy_threshold,
            seed,
            chain_streams: None,
            initial_step_size: None,
            initial_jitter: self.initial_jitter,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        // Split diagnostics need at least two chains.
        if self.chains < 2 {
            return Err(CliError::Usage("sampler: at least two chains are required".into()));
        }
        if self.draws < 4 {
            return Err(CliError::Usage("sampler: at least four draws are required".into()));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(CliError::Usage(format!(
                "sampler: target_accept must lie in (0, 1), got {}",
                self.target_accept
            )));
        }
        Ok(())
    }
}

/// Post-fit quality gates; breaching either makes `fit`/`diagnose` exit
/// with code 3.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceGates {
    pub max_rhat: f64,
    pub max_divergence_rate: f64,
}

impl Default for ConvergenceGates {
    fn default() -> Self {
        ConvergenceGates { max_rhat: 1.05, max_divergence_rate: 0.01 }
    }
}

impl ConvergenceGates {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.max_rhat >= 1.0) || !(self.max_divergence_rate >= 0.0) {
            return Err(CliError::Usage(
                "convergence: max_rhat must be >= 1 and max_divergence_rate >= 0".into(),
            ));
        }
        Ok(())
    }
}
