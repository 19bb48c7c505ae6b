//! Temperature-conditioned single-mode FRF model.
//!
//! Domains are the same structure observed at different temperatures. The
//! domain-level modal parameters are deterministic functions of population
//! means and shared coefficients: natural frequency is quadratic in
//! temperature, damping linear,
//!
//! ```text
//! ω_k = μ_ω + a₁·T_k + a₂·T_k²
//! ζ_k = μ_ζ + b·T_k
//! ```
//!
//! and only the population-level quantities are sampled. The residue and
//! the noise variance are temperature-invariant. Derived parameters that
//! leave their physical ranges (ω ≤ 0 or ζ outside (0, 1)) put the draw off
//! support rather than clamping it.

use strata_hmc::LogDensityGradient;
use strata_modal::{accumulate_weighted_real_jacobian, eval_real_into, Mode};

use crate::dataset::FrfDataset;
use crate::density::{normal, truncated_normal, truncated_normal_mean, LN_SQRT_2PI};
use crate::layout::ParameterLayout;
use crate::spec::TemperatureSpec;
use crate::transform::{BlockTransform, TransformPipeline};
use crate::ModelError;

// Coordinate slots; the two hyper slots exist only when the residue
// hyper-level is sampled.
const MU_OMEGA: usize = 0;
const MU_ZETA: usize = 1;
const OMEGA_SLOPE: usize = 2;
const OMEGA_CURVATURE: usize = 3;
const ZETA_SLOPE: usize = 4;
const RESIDUE: usize = 5;
const SIGMA2_H: usize = 6;
const MU_RESIDUE: usize = 7;
const SIGMA2_RESIDUE: usize = 8;

/// A built temperature model: immutable and re-entrant.
#[derive(Debug)]
pub struct TemperatureFrfModel {
    dataset: FrfDataset,
    spec: TemperatureSpec,
    layout: ParameterLayout,
    initial: Vec<f64>,
}

/// Validates the spec against the data (domain counts must match; dataset
/// temperature labels, when present, must equal the spec's) and assembles
/// the 7- or 9-coordinate layout.
pub fn build_temperature_model(
    dataset: FrfDataset,
    spec: TemperatureSpec,
) -> Result<TemperatureFrfModel, ModelError> {
    spec.validate()?;
    if dataset.n_domains() != spec.n_domains() {
        return Err(ModelError::DomainCountMismatch {
            data: dataset.n_domains(),
            spec: spec.n_domains(),
        });
    }
    for (k, dom) in dataset.domains().iter().enumerate() {
        if let Some(t) = dom.temperature_c() {
            if (t - spec.temperatures_c[k]).abs() > 1e-9 {
                return Err(ModelError::TemperatureMismatch {
                    domain: k,
                    data: t,
                    spec: spec.temperatures_c[k],
                });
            }
        }
    }

    let mut names: Vec<String> = [
        "mu_omega",
        "mu_zeta",
        "omega_slope",
        "omega_curvature",
        "zeta_slope",
        "residue",
        "sigma2_h",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut blocks = vec![
        BlockTransform::Log { len: 2 },
        BlockTransform::Identity { len: 4 },
        BlockTransform::Log { len: 1 },
    ];
    if spec.sample_residue_hyperpriors {
        names.push("mu_residue".to_string());
        names.push("sigma2_residue".to_string());
        blocks.push(BlockTransform::Identity { len: 1 });
        blocks.push(BlockTransform::Log { len: 1 });
    }
    let layout = ParameterLayout::new(names, TransformPipeline::new(blocks));

    let p = &spec.prior;
    let mut constrained = vec![
        truncated_normal_mean(p.freq_mean_loc, sq(p.freq_mean_scale)),
        truncated_normal_mean(p.damping_mean_loc, sq(p.damping_mean_scale)),
        p.freq_slope_loc,
        p.freq_curvature_loc,
        p.damping_slope_loc,
        p.residue_mean_loc,
        truncated_normal_mean(p.noise_var_loc, sq(p.noise_var_scale)),
    ];
    if spec.sample_residue_hyperpriors {
        constrained.push(p.residue_mean_loc);
        constrained.push(truncated_normal_mean(p.residue_var_loc, sq(p.residue_var_scale)));
    }
    let initial = layout.unconstrain(&constrained);

    Ok(TemperatureFrfModel { dataset, spec, layout, initial })
}

#[inline]
fn sq(v: f64) -> f64 {
    v * v
}

impl TemperatureFrfModel {
    pub fn layout(&self) -> &ParameterLayout {
        &self.layout
    }

    pub fn spec(&self) -> &TemperatureSpec {
        &self.spec
    }

    pub fn dataset(&self) -> &FrfDataset {
        &self.dataset
    }

    /// Derived `(omega, zeta)` at temperature `t_c` for a constrained draw.
    pub fn modal_parameters_at(&self, constrained: &[f64], t_c: f64) -> (f64, f64) {
        let omega = constrained[MU_OMEGA]
            + constrained[OMEGA_SLOPE] * t_c
            + constrained[OMEGA_CURVATURE] * t_c * t_c;
        let zeta = constrained[MU_ZETA] + constrained[ZETA_SLOPE] * t_c;
        (omega, zeta)
    }

    /// Shared residue of a constrained draw.
    pub fn residue(&self, constrained: &[f64]) -> f64 {
        constrained[RESIDUE]
    }

    /// Shared noise variance of a constrained draw.
    pub fn noise_variance(&self, constrained: &[f64]) -> f64 {
        constrained[SIGMA2_H]
    }

    /// Log-likelihood of a constrained parameter vector (no Jacobian term).
    /// -∞ when a derived domain parameter leaves its physical range.
    pub fn log_likelihood(&self, constrained: &[f64]) -> f64 {
        let mut scratch = vec![0.0; self.layout.dim()];
        self.accumulate_likelihood(constrained, &mut scratch)
    }

    /// Log-prior of a constrained parameter vector (no Jacobian term).
    pub fn log_prior(&self, constrained: &[f64]) -> f64 {
        let mut scratch = vec![0.0; self.layout.dim()];
        self.accumulate_prior(constrained, &mut scratch)
    }

    fn accumulate_likelihood(&self, x: &[f64], grad_c: &mut [f64]) -> f64 {
        let sigma2 = x[SIGMA2_H];
        let mut total = 0.0;
        let mut fitted: Vec<f64> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (k, dom) in self.dataset.domains().iter().enumerate() {
            let t = self.spec.temperatures_c[k];
            let (omega_k, zeta_k) = self.modal_parameters_at(x, t);
            if !(omega_k > 0.0) || !(zeta_k > 0.0) || !(zeta_k < 1.0) {
                return f64::NEG_INFINITY;
            }
            let modes =
                [Mode { natural_frequency: omega_k, damping_ratio: zeta_k, residue: x[RESIDUE] }];
            let omega = dom.omega_rad();
            let n = omega.len();
            fitted.clear();
            fitted.resize(n, 0.0);
            eval_real_into(&modes, omega, &mut fitted);

            let mut sum_sq = 0.0;
            weights.clear();
            weights.reserve(n);
            for (f, &y) in fitted.iter().zip(dom.real()) {
                let r = y - f;
                sum_sq += r * r;
                weights.push(r / sigma2);
            }
            total +=
                -0.5 * (n as f64) * (2.0 * LN_SQRT_2PI + sigma2.ln()) - sum_sq / (2.0 * sigma2);

            let mut mode_grad = [0.0; 3];
            accumulate_weighted_real_jacobian(&modes, omega, &weights, &mut mode_grad);
            // Chain rule through the temperature laws: ∂ω_k/∂μ_ω = 1,
            // ∂ω_k/∂a₁ = T, ∂ω_k/∂a₂ = T², ∂ζ_k/∂μ_ζ = 1, ∂ζ_k/∂b = T.
            grad_c[MU_OMEGA] += mode_grad[0];
            grad_c[OMEGA_SLOPE] += mode_grad[0] * t;
            grad_c[OMEGA_CURVATURE] += mode_grad[0] * t * t;
            grad_c[MU_ZETA] += mode_grad[1];
            grad_c[ZETA_SLOPE] += mode_grad[1] * t;
            grad_c[RESIDUE] += mode_grad[2];
            grad_c[SIGMA2_H] += -0.5 * (n as f64) / sigma2 + sum_sq / (2.0 * sigma2 * sigma2);
        }
        total
    }

    fn accumulate_prior(&self, x: &[f64], grad_c: &mut [f64]) -> f64 {
        let mut total = 0.0;
        let p = &self.spec.prior;
        let e = truncated_normal(x[MU_OMEGA], p.freq_mean_loc, sq(p.freq_mean_scale));
        total += e.logp;
        grad_c[MU_OMEGA] += e.d_x;
        let e = truncated_normal(x[MU_ZETA], p.damping_mean_loc, sq(p.damping_mean_scale));
        total += e.logp;
        grad_c[MU_ZETA] += e.d_x;
        let e = normal(x[OMEGA_SLOPE], p.freq_slope_loc, sq(p.freq_slope_scale));
        total += e.logp;
        grad_c[OMEGA_SLOPE] += e.d_x;
        let e = normal(x[OMEGA_CURVATURE], p.freq_curvature_loc, sq(p.freq_curvature_scale));
        total += e.logp;
        grad_c[OMEGA_CURVATURE] += e.d_x;
        let e = normal(x[ZETA_SLOPE], p.damping_slope_loc, sq(p.damping_slope_scale));
        total += e.logp;
        grad_c[ZETA_SLOPE] += e.d_x;
        let e = truncated_normal(x[SIGMA2_H], p.noise_var_loc, sq(p.noise_var_scale));
        total += e.logp;
        grad_c[SIGMA2_H] += e.d_x;

        if self.spec.sample_residue_hyperpriors {
            let e = normal(x[RESIDUE], x[MU_RESIDUE], x[SIGMA2_RESIDUE]);
            total += e.logp;
            grad_c[RESIDUE] += e.d_x;
            grad_c[MU_RESIDUE] += e.d_loc;
            grad_c[SIGMA2_RESIDUE] += e.d_var;
            let e = normal(x[MU_RESIDUE], p.residue_mean_loc, sq(p.residue_mean_scale));
            total += e.logp;
            grad_c[MU_RESIDUE] += e.d_x;
            let e = truncated_normal(x[SIGMA2_RESIDUE], p.residue_var_loc, sq(p.residue_var_scale));
            total += e.logp;
            grad_c[SIGMA2_RESIDUE] += e.d_x;
        } else {
            // Hyper-level fixed at its prior locations.
            let e = normal(x[RESIDUE], p.residue_mean_loc, p.residue_var_loc);
            total += e.logp;
            grad_c[RESIDUE] += e.d_x;
        }
        total
    }
}

impl LogDensityGradient for TemperatureFrfModel {
    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn log_density_gradient(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let dim = self.layout.dim();
        let mut x = vec![0.0; dim];
        let log_jac = self.layout.pipeline().constrain(theta, &mut x);
        if !log_jac.is_finite() || x.iter().any(|v| !v.is_finite()) {
            grad.fill(0.0);
            return f64::NEG_INFINITY;
        }

        let mut grad_c = vec![0.0; dim];
        let mut total = self.accumulate_likelihood(&x, &mut grad_c);
        if total.is_finite() {
            total += self.accumulate_prior(&x, &mut grad_c);
        }
        let logp = total + log_jac;
        if !logp.is_finite() {
            grad.fill(0.0);
            return f64::NEG_INFINITY;
        }
        self.layout.pipeline().chain_gradient(&x, &grad_c, grad);
        logp
    }

    fn initial_point(&self) -> Vec<f64> {
        self.initial.clone()
    }
}
