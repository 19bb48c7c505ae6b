//! Closed-form modal accelerance FRFs and their analytic parameter gradients.
//!
//! A proportionally-damped linear structure with `M` modes has the accelerance
//! (acceleration per unit force) frequency response function
//!
//! ```text
//! H(ω) = −ω² Σ_m A_m (u_m + i·v_m) / (u_m² + v_m²)
//!
//! u_m = ω_nat,m² − ω²        v_m = 2 ζ_m ω ω_nat,m
//! ```
//!
//! where `ω_nat,m` is the natural frequency (rad/s), `ζ_m` the damping ratio
//! and `A_m` the residue (product of mass-normalised mode shapes at the drive
//! and response points). The imaginary part is negative at resonance
//! (`imag H = −A/(2ζ)` at `ω = ω_nat` for a single mode), i.e. the `e^{−iωt}`
//! time convention. Spectral estimators that compare against these values must
//! use the matching convention.
//!
//! The denominator is evaluated in the factored form `u² + v²`; the expanded
//! quartic `ω_nat⁴ + ω⁴ + 2ω²ω_nat²(2ζ²−1)` is algebraically identical but
//! cancels catastrophically near resonance at small damping.
//!
//! All evaluation is in rad/s. [`FrequencyGrid`] carries a unit tag so Hz can
//! exist at I/O boundaries; conversion is by the exact factor 2π.
//!
//! Two API levels:
//! - typed operations ([`frf_complex`], [`frf_real`], [`frf_imag`],
//!   [`frf_real_gradient`]) validate inputs and detect non-finite output;
//! - slice kernels ([`eval_real_into`], [`accumulate_weighted_real_jacobian`],
//!   ...) skip validation and allocation for samplers that evaluate the same
//!   model millions of times.

use num_complex::Complex64;
use thiserror::Error;

/// One vibration mode of a proportionally-damped structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Natural frequency ω_nat in rad/s. Must be positive.
    pub natural_frequency: f64,
    /// Viscous damping ratio ζ. Must lie in (0, 1) (lightly damped).
    pub damping_ratio: f64,
    /// Residue A = ψ_h ψ_j, the mode-shape product at drive/response points.
    pub residue: f64,
}

impl Mode {
    pub fn new(natural_frequency: f64, damping_ratio: f64, residue: f64) -> Result<Self, ModalError> {
        let mode = Mode { natural_frequency, damping_ratio, residue };
        mode.validate(0)?;
        Ok(mode)
    }

    fn validate(&self, index: usize) -> Result<(), ModalError> {
        if !(self.natural_frequency > 0.0) || !self.natural_frequency.is_finite() {
            return Err(ModalError::NaturalFrequency { index, value: self.natural_frequency });
        }
        if !(self.damping_ratio > 0.0 && self.damping_ratio < 1.0) {
            return Err(ModalError::DampingRatio { index, value: self.damping_ratio });
        }
        if !self.residue.is_finite() {
            return Err(ModalError::Residue { index, value: self.residue });
        }
        Ok(())
    }
}

/// Ordered mode set for one domain (one structure).
#[derive(Debug, Clone, PartialEq)]
pub struct ModalParameterSet {
    /// Modes in strictly increasing natural-frequency order.
    pub modes: Vec<Mode>,
    /// Index k of the domain this set describes.
    pub domain_index: usize,
}

impl ModalParameterSet {
    pub fn new(modes: Vec<Mode>, domain_index: usize) -> Result<Self, ModalError> {
        let set = ModalParameterSet { modes, domain_index };
        set.validate()?;
        Ok(set)
    }

    /// Checks every mode invariant plus the canonical strictly-increasing
    /// frequency ordering.
    pub fn validate(&self) -> Result<(), ModalError> {
        if self.modes.is_empty() {
            return Err(ModalError::EmptyModes);
        }
        for (i, mode) in self.modes.iter().enumerate() {
            mode.validate(i)?;
        }
        for i in 1..self.modes.len() {
            if !(self.modes[i].natural_frequency > self.modes[i - 1].natural_frequency) {
                return Err(ModalError::ModeOrdering { index: i });
            }
        }
        Ok(())
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }
}

/// Unit tag for frequency values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyUnit {
    RadPerSec,
    Hz,
}

/// Strictly increasing, non-negative frequency grid with a unit tag.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    values: Vec<f64>,
    unit: FrequencyUnit,
}

impl FrequencyGrid {
    pub fn new(values: Vec<f64>, unit: FrequencyUnit) -> Result<Self, ModalError> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(ModalError::GridValue { index: i, value: v });
            }
            if i > 0 && !(v > values[i - 1]) {
                return Err(ModalError::GridOrdering { index: i });
            }
        }
        Ok(FrequencyGrid { values, unit })
    }

    pub fn from_rad_per_sec(values: Vec<f64>) -> Result<Self, ModalError> {
        Self::new(values, FrequencyUnit::RadPerSec)
    }

    pub fn from_hz(values: Vec<f64>) -> Result<Self, ModalError> {
        Self::new(values, FrequencyUnit::Hz)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> FrequencyUnit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Converts to rad/s by the exact factor 2π (no-op if already rad/s).
    pub fn in_rad_per_sec(&self) -> FrequencyGrid {
        match self.unit {
            FrequencyUnit::RadPerSec => self.clone(),
            FrequencyUnit::Hz => FrequencyGrid {
                values: self.values.iter().map(|v| v * std::f64::consts::TAU).collect(),
                unit: FrequencyUnit::RadPerSec,
            },
        }
    }

    /// Converts to Hz by the exact factor 2π (no-op if already Hz).
    pub fn in_hz(&self) -> FrequencyGrid {
        match self.unit {
            FrequencyUnit::Hz => self.clone(),
            FrequencyUnit::RadPerSec => FrequencyGrid {
                values: self.values.iter().map(|v| v / std::f64::consts::TAU).collect(),
                unit: FrequencyUnit::Hz,
            },
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModalError {
    #[error("mode {index}: natural frequency must be a positive finite value, got {value}")]
    NaturalFrequency { index: usize, value: f64 },
    #[error("mode {index}: damping ratio must lie in (0, 1), got {value}")]
    DampingRatio { index: usize, value: f64 },
    #[error("mode {index}: residue must be finite, got {value}")]
    Residue { index: usize, value: f64 },
    #[error("parameter set must contain at least one mode")]
    EmptyModes,
    #[error("modes must be in strictly increasing natural-frequency order (violated at mode {index})")]
    ModeOrdering { index: usize },
    #[error("frequency grid value at index {index} must be finite and non-negative, got {value}")]
    GridValue { index: usize, value: f64 },
    #[error("frequency grid must be strictly increasing (violated at index {index})")]
    GridOrdering { index: usize },
    #[error("frequency grid must be in rad/s for evaluation; call in_rad_per_sec() first")]
    GridUnit,
    #[error("non-finite FRF value at ω = {omega} rad/s, produced by mode {mode_index}")]
    NonFinite { mode_index: usize, omega: f64 },
}

#[inline(always)]
fn mode_terms(mode: &Mode, omega: f64) -> (f64, f64, f64) {
    let u = mode.natural_frequency * mode.natural_frequency - omega * omega;
    let v = 2.0 * mode.damping_ratio * omega * mode.natural_frequency;
    (u, v, u * u + v * v)
}

/// Writes H(ω) for each grid point into `out`. No validation.
pub fn eval_complex_into(modes: &[Mode], omega_rad: &[f64], out: &mut [Complex64]) {
    assert_eq!(omega_rad.len(), out.len());
    for (o, &w) in out.iter_mut().zip(omega_rad) {
        let w2 = w * w;
        let mut acc = Complex64::new(0.0, 0.0);
        for mode in modes {
            let (u, v, d) = mode_terms(mode, w);
            let scale = mode.residue / d;
            acc += Complex64::new(u * scale, v * scale);
        }
        *o = Complex64::new(-w2 * acc.re, -w2 * acc.im);
    }
}

/// Writes real(H) for each grid point into `out`. No validation.
pub fn eval_real_into(modes: &[Mode], omega_rad: &[f64], out: &mut [f64]) {
    assert_eq!(omega_rad.len(), out.len());
    for (o, &w) in out.iter_mut().zip(omega_rad) {
        let w2 = w * w;
        let mut acc = 0.0;
        for mode in modes {
            let (u, _, d) = mode_terms(mode, w);
            acc += mode.residue * u / d;
        }
        *o = -w2 * acc;
    }
}

/// Writes imag(H) for each grid point into `out`. No validation.
pub fn eval_imag_into(modes: &[Mode], omega_rad: &[f64], out: &mut [f64]) {
    assert_eq!(omega_rad.len(), out.len());
    for (o, &w) in out.iter_mut().zip(omega_rad) {
        let w2 = w * w;
        let mut acc = 0.0;
        for mode in modes {
            let (_, v, d) = mode_terms(mode, w);
            acc += mode.residue * v / d;
        }
        *o = -w2 * acc;
    }
}

/// Per-mode partials of real(H) at one frequency:
/// `(∂/∂ω_nat, ∂/∂ζ, ∂/∂A)`.
///
/// With `g_m = −ω² A u / (u² + v²)`:
///
/// ```text
/// ∂g/∂ω_nat = 2 A ω² ω_nat (u² − 4ζ²ω⁴) / D²
/// ∂g/∂ζ     = 8 A ζ ω⁴ ω_nat² u / D²
/// ∂g/∂A     = −ω² u / D
/// ```
#[inline]
pub fn real_partials(mode: &Mode, omega: f64) -> (f64, f64, f64) {
    let (u, _, d) = mode_terms(mode, omega);
    let w2 = omega * omega;
    let a = mode.residue;
    let zeta = mode.damping_ratio;
    let wn = mode.natural_frequency;
    let d2 = d * d;
    let d_wn = 2.0 * a * w2 * wn * (u * u - 4.0 * zeta * zeta * w2 * w2) / d2;
    let d_zeta = 8.0 * a * zeta * w2 * w2 * wn * wn * u / d2;
    let d_res = -w2 * u / d;
    (d_wn, d_zeta, d_res)
}

/// Row-major Jacobian of real(H): one row per grid point, 3 columns per mode
/// in `(∂/∂ω_nat, ∂/∂ζ, ∂/∂A)` order.
#[derive(Debug, Clone)]
pub struct RealFrfJacobian {
    partials: Vec<f64>,
    n_modes: usize,
}

impl RealFrfJacobian {
    pub fn n_points(&self) -> usize {
        if self.n_modes == 0 { 0 } else { self.partials.len() / (3 * self.n_modes) }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Row for grid point `i`: `[∂/∂ω_nat_0, ∂/∂ζ_0, ∂/∂A_0, ∂/∂ω_nat_1, ...]`.
    pub fn row(&self, i: usize) -> &[f64] {
        let stride = 3 * self.n_modes;
        &self.partials[i * stride..(i + 1) * stride]
    }

    pub fn wrt_natural_frequency(&self, point: usize, mode: usize) -> f64 {
        self.row(point)[3 * mode]
    }

    pub fn wrt_damping_ratio(&self, point: usize, mode: usize) -> f64 {
        self.row(point)[3 * mode + 1]
    }

    pub fn wrt_residue(&self, point: usize, mode: usize) -> f64 {
        self.row(point)[3 * mode + 2]
    }
}

/// Writes the real-FRF Jacobian (row-major, `omega_rad.len() × 3·modes.len()`)
/// into `out`. No validation.
pub fn real_jacobian_into(modes: &[Mode], omega_rad: &[f64], out: &mut [f64]) {
    let stride = 3 * modes.len();
    assert_eq!(out.len(), omega_rad.len() * stride);
    for (row, &w) in out.chunks_exact_mut(stride).zip(omega_rad) {
        for (m, mode) in modes.iter().enumerate() {
            let (d_wn, d_zeta, d_res) = real_partials(mode, w);
            row[3 * m] = d_wn;
            row[3 * m + 1] = d_zeta;
            row[3 * m + 2] = d_res;
        }
    }
}

/// Accumulates `Σ_i weights[i] · ∂real(H)(ω_i)/∂p` into `out` (length
/// `3·modes.len()`, `(ω_nat, ζ, A)` per mode). The weighted contraction a
/// Gaussian likelihood gradient needs, without materialising the Jacobian.
pub fn accumulate_weighted_real_jacobian(
    modes: &[Mode],
    omega_rad: &[f64],
    weights: &[f64],
    out: &mut [f64],
) {
    assert_eq!(omega_rad.len(), weights.len());
    assert_eq!(out.len(), 3 * modes.len());
    for (&w, &weight) in omega_rad.iter().zip(weights) {
        for (m, mode) in modes.iter().enumerate() {
            let (d_wn, d_zeta, d_res) = real_partials(mode, w);
            out[3 * m] += weight * d_wn;
            out[3 * m + 1] += weight * d_zeta;
            out[3 * m + 2] += weight * d_res;
        }
    }
}

fn require_rad(grid: &FrequencyGrid) -> Result<&[f64], ModalError> {
    match grid.unit() {
        FrequencyUnit::RadPerSec => Ok(grid.values()),
        FrequencyUnit::Hz => Err(ModalError::GridUnit),
    }
}

/// Finds which mode produced a non-finite value at `omega`.
fn offending_mode(modes: &[Mode], omega: f64) -> usize {
    for (m, mode) in modes.iter().enumerate() {
        let (u, v, d) = mode_terms(mode, omega);
        let w2 = omega * omega;
        let re = -w2 * mode.residue * u / d;
        let im = -w2 * mode.residue * v / d;
        if !re.is_finite() || !im.is_finite() {
            return m;
        }
    }
    0
}

/// Complex accelerance H(ω) over the grid.
pub fn frf_complex(
    params: &ModalParameterSet,
    grid: &FrequencyGrid,
) -> Result<Vec<Complex64>, ModalError> {
    params.validate()?;
    let omega = require_rad(grid)?;
    let mut out = vec![Complex64::new(0.0, 0.0); omega.len()];
    eval_complex_into(&params.modes, omega, &mut out);
    for (i, h) in out.iter().enumerate() {
        if !h.re.is_finite() || !h.im.is_finite() {
            return Err(ModalError::NonFinite {
                mode_index: offending_mode(&params.modes, omega[i]),
                omega: omega[i],
            });
        }
    }
    Ok(out)
}

/// Real part of the accelerance over the grid.
pub fn frf_real(params: &ModalParameterSet, grid: &FrequencyGrid) -> Result<Vec<f64>, ModalError> {
    params.validate()?;
    let omega = require_rad(grid)?;
    let mut out = vec![0.0; omega.len()];
    eval_real_into(&params.modes, omega, &mut out);
    for (i, y) in out.iter().enumerate() {
        if !y.is_finite() {
            return Err(ModalError::NonFinite {
                mode_index: offending_mode(&params.modes, omega[i]),
                omega: omega[i],
            });
        }
    }
    Ok(out)
}

/// Imaginary part of the accelerance over the grid.
pub fn frf_imag(params: &ModalParameterSet, grid: &FrequencyGrid) -> Result<Vec<f64>, ModalError> {
    params.validate()?;
    let omega = require_rad(grid)?;
    let mut out = vec![0.0; omega.len()];
    eval_imag_into(&params.modes, omega, &mut out);
    for (i, y) in out.iter().enumerate() {
        if !y.is_finite() {
            return Err(ModalError::NonFinite {
                mode_index: offending_mode(&params.modes, omega[i]),
                omega: omega[i],
            });
        }
    }
    Ok(out)
}

/// Analytic partials of real(H) with respect to every mode parameter.
pub fn frf_real_gradient(
    params: &ModalParameterSet,
    grid: &FrequencyGrid,
) -> Result<RealFrfJacobian, ModalError> {
    params.validate()?;
    let omega = require_rad(grid)?;
    let n_modes = params.modes.len();
    let mut partials = vec![0.0; omega.len() * 3 * n_modes];
    real_jacobian_into(&params.modes, omega, &mut partials);
    for (idx, p) in partials.iter().enumerate() {
        if !p.is_finite() {
            let point = idx / (3 * n_modes);
            return Err(ModalError::NonFinite {
                mode_index: (idx % (3 * n_modes)) / 3,
                omega: omega[point],
            });
        }
    }
    Ok(RealFrfJacobian { partials, n_modes })
}
