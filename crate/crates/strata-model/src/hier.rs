//! Hierarchical FRF model over a population of domains.
//!
//! Likelihood: the real part of each domain's accelerance FRF is Gaussian
//! around the modal-superposition curve, with a noise variance shared
//! within each inference group. Domain-level natural frequencies follow a
//! truncated-normal parent per mode, dampings a beta parent, residues a
//! normal parent shared across the group's domains; every parent's own
//! parameters carry hyperpriors, including the noise variance's location
//! and spread. Pooling modes reshape how domains map onto those groups
//! without changing any density.

use strata_hmc::LogDensityGradient;
use strata_modal::{accumulate_weighted_real_jacobian, eval_real_into, Mode};

use crate::dataset::FrfDataset;
use crate::density::{beta, normal, truncated_normal, truncated_normal_mean};
use crate::layout::{build_hierarchy_layout, GroupSlots, ParameterLayout};
use crate::spec::{HierarchySpec, ModePrior, NoisePrior};
use crate::ModelError;

/// A built model: immutable, re-entrant, ready for any number of chains.
#[derive(Debug)]
pub struct HierarchicalFrfModel {
    dataset: FrfDataset,
    spec: HierarchySpec,
    layout: ParameterLayout,
    groups: Vec<GroupSlots>,
    member_of_data: Vec<(usize, usize)>,
    initial: Vec<f64>,
}

/// Validates the spec against the data and assembles layout, transforms,
/// and the unconstrained initial point (constrained-space prior means).
pub fn build_hierarchical_model(
    dataset: FrfDataset,
    spec: HierarchySpec,
) -> Result<HierarchicalFrfModel, ModelError> {
    spec.validate()?;
    if dataset.n_domains() != spec.n_domains {
        return Err(ModelError::DomainCountMismatch {
            data: dataset.n_domains(),
            spec: spec.n_domains,
        });
    }
    let hl = build_hierarchy_layout(&spec);
    let constrained = constrained_prior_means(&spec, &hl.groups, hl.layout.dim());
    let initial = hl.layout.unconstrain(&constrained);
    Ok(HierarchicalFrfModel {
        dataset,
        spec,
        layout: hl.layout,
        groups: hl.groups,
        member_of_data: hl.member_of_data,
        initial,
    })
}

/// Constrained initial values: each coordinate at the mean of its prior,
/// hyper-level nodes first so lower levels can condition on them.
fn constrained_prior_means(spec: &HierarchySpec, groups: &[GroupSlots], dim: usize) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    for slots in groups {
        for (mi, p) in spec.prior.modes.iter().enumerate() {
            let mu_w = truncated_normal_mean(p.freq_mean_loc, sq(p.freq_mean_scale));
            let s2_w = truncated_normal_mean(p.freq_var_loc, sq(p.freq_var_scale));
            let alpha = truncated_normal_mean(p.damping_alpha_loc, sq(p.damping_alpha_scale));
            let beta_shape = truncated_normal_mean(p.damping_beta_loc, sq(p.damping_beta_scale));
            let mu_a = p.residue_mean_loc;
            let s2_a = truncated_normal_mean(p.residue_var_loc, sq(p.residue_var_scale));
            x[slots.mu_omega[mi]] = mu_w;
            x[slots.sigma2_omega[mi]] = s2_w;
            x[slots.alpha_zeta[mi]] = alpha;
            x[slots.beta_zeta[mi]] = beta_shape;
            x[slots.mu_residue[mi]] = mu_a;
            x[slots.sigma2_residue[mi]] = s2_a;
            x[slots.residue[mi]] = mu_a;
            for s in 0..slots.member_sets() {
                x[slots.omega[s][mi]] = truncated_normal_mean(mu_w, s2_w);
                x[slots.zeta[s][mi]] = alpha / (alpha + beta_shape);
            }
        }
        let noise = &spec.prior.noise;
        let mu_s = truncated_normal_mean(noise.mean_loc, sq(noise.mean_scale));
        let s2_s = truncated_normal_mean(noise.var_loc, sq(noise.var_scale));
        x[slots.mu_sigma2] = mu_s;
        x[slots.sigma2_sigma2] = s2_s;
        x[slots.sigma2_h] = truncated_normal_mean(mu_s, s2_s);
    }
    x
}

#[inline]
fn sq(v: f64) -> f64 {
    v * v
}

impl HierarchicalFrfModel {
    pub fn layout(&self) -> &ParameterLayout {
        &self.layout
    }

    pub fn spec(&self) -> &HierarchySpec {
        &self.spec
    }

    pub fn dataset(&self) -> &FrfDataset {
        &self.dataset
    }

    pub fn groups(&self) -> &[GroupSlots] {
        &self.groups
    }

    /// `(group, member set)` serving each data domain.
    pub fn member_of_data(&self) -> &[(usize, usize)] {
        &self.member_of_data
    }

    /// Constrained modal parameters `(omega, zeta, residue)` per mode for
    /// the given data domain, extracted from a constrained draw.
    pub fn domain_modes(&self, constrained: &[f64], domain: usize) -> Vec<Mode> {
        let (g, s) = self.member_of_data[domain];
        let slots = &self.groups[g];
        (0..self.spec.n_modes())
            .map(|mi| Mode {
                natural_frequency: constrained[slots.omega[s][mi]],
                damping_ratio: constrained[slots.zeta[s][mi]],
                residue: constrained[slots.residue[mi]],
            })
            .collect()
    }

    /// Noise variance slot value for the group serving `domain`.
    pub fn noise_variance(&self, constrained: &[f64], domain: usize) -> f64 {
        let (g, _) = self.member_of_data[domain];
        constrained[self.groups[g].sigma2_h]
    }

    /// Log-likelihood of a constrained parameter vector (no Jacobian term).
    pub fn log_likelihood(&self, constrained: &[f64]) -> f64 {
        let mut scratch = vec![0.0; self.layout.dim()];
        self.accumulate_likelihood(constrained, &mut scratch)
    }

    /// Log-prior of a constrained parameter vector (no Jacobian term).
    pub fn log_prior(&self, constrained: &[f64]) -> f64 {
        let mut scratch = vec![0.0; self.layout.dim()];
        self.accumulate_prior(constrained, &mut scratch)
    }

    /// Log-likelihood plus constrained-space gradient accumulation.
    fn accumulate_likelihood(&self, x: &[f64], grad_c: &mut [f64]) -> f64 {
        let m = self.spec.n_modes();
        let mut modes = Vec::with_capacity(m);
        let mut total = 0.0;
        let mut fitted: Vec<f64> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut mode_grad = vec![0.0; 3 * m];
        for (d, dom) in self.dataset.domains().iter().enumerate() {
            let (g, s) = self.member_of_data[d];
            let slots = &self.groups[g];
            modes.clear();
            for mi in 0..m {
                modes.push(Mode {
                    natural_frequency: x[slots.omega[s][mi]],
                    damping_ratio: x[slots.zeta[s][mi]],
                    residue: x[slots.residue[mi]],
                });
            }
            let sigma2 = x[slots.sigma2_h];
            let omega = dom.omega_rad();
            let n = omega.len();
            fitted.clear();
            fitted.resize(n, 0.0);
            eval_real_into(&modes, omega, &mut fitted);

            let mut sum_sq = 0.0;
            weights.clear();
            weights.reserve(n);
            for (res, &y) in fitted.iter().zip(dom.real()) {
                let r = y - res;
                sum_sq += r * r;
                weights.push(r / sigma2);
            }
            total += -0.5 * (n as f64) * (crate::density::LN_SQRT_2PI * 2.0 + sigma2.ln())
                - sum_sq / (2.0 * sigma2);

            mode_grad.fill(0.0);
            accumulate_weighted_real_jacobian(&modes, omega, &weights, &mut mode_grad);
            for mi in 0..m {
                grad_c[slots.omega[s][mi]] += mode_grad[3 * mi];
                grad_c[slots.zeta[s][mi]] += mode_grad[3 * mi + 1];
                grad_c[slots.residue[mi]] += mode_grad[3 * mi + 2];
            }
            grad_c[slots.sigma2_h] +=
                -0.5 * (n as f64) / sigma2 + sum_sq / (2.0 * sigma2 * sigma2);
        }
        total
    }

    /// Log-prior plus constrained-space gradient accumulation.
    fn accumulate_prior(&self, x: &[f64], grad_c: &mut [f64]) -> f64 {
        let mut total = 0.0;
        for slots in &self.groups {
            for (mi, p) in self.spec.prior.modes.iter().enumerate() {
                total += mode_prior_terms(x, grad_c, slots, mi, p);
                if total == f64::NEG_INFINITY {
                    return total;
                }
            }
            total += noise_prior_terms(x, grad_c, slots, &self.spec.prior.noise);
            if total == f64::NEG_INFINITY {
                return total;
            }
        }
        total
    }
}

/// Parent and hyperprior terms for one mode within one group.
fn mode_prior_terms(
    x: &[f64],
    grad_c: &mut [f64],
    slots: &GroupSlots,
    mi: usize,
    p: &ModePrior,
) -> f64 {
    let mut total = 0.0;
    let mu_w = x[slots.mu_omega[mi]];
    let s2_w = x[slots.sigma2_omega[mi]];
    let alpha = x[slots.alpha_zeta[mi]];
    let beta_shape = x[slots.beta_zeta[mi]];
    let mu_a = x[slots.mu_residue[mi]];
    let s2_a = x[slots.sigma2_residue[mi]];

    for s in 0..slots.member_sets() {
        let e = truncated_normal(x[slots.omega[s][mi]], mu_w, s2_w);
        total += e.logp;
        grad_c[slots.omega[s][mi]] += e.d_x;
        grad_c[slots.mu_omega[mi]] += e.d_loc;
        grad_c[slots.sigma2_omega[mi]] += e.d_var;

        let e = beta(x[slots.zeta[s][mi]], alpha, beta_shape);
        total += e.logp;
        grad_c[slots.zeta[s][mi]] += e.d_x;
        grad_c[slots.alpha_zeta[mi]] += e.d_alpha;
        grad_c[slots.beta_zeta[mi]] += e.d_beta;
    }

    let e = normal(x[slots.residue[mi]], mu_a, s2_a);
    total += e.logp;
    grad_c[slots.residue[mi]] += e.d_x;
    grad_c[slots.mu_residue[mi]] += e.d_loc;
    grad_c[slots.sigma2_residue[mi]] += e.d_var;

    let e = truncated_normal(mu_w, p.freq_mean_loc, sq(p.freq_mean_scale));
    total += e.logp;
    grad_c[slots.mu_omega[mi]] += e.d_x;
    let e = truncated_normal(s2_w, p.freq_var_loc, sq(p.freq_var_scale));
    total += e.logp;
    grad_c[slots.sigma2_omega[mi]] += e.d_x;
    let e = truncated_normal(alpha, p.damping_alpha_loc, sq(p.damping_alpha_scale));
    total += e.logp;
    grad_c[slots.alpha_zeta[mi]] += e.d_x;
    let e = truncated_normal(beta_shape, p.damping_beta_loc, sq(p.damping_beta_scale));
    total += e.logp;
    grad_c[slots.beta_zeta[mi]] += e.d_x;
    let e = normal(mu_a, p.residue_mean_loc, sq(p.residue_mean_scale));
    total += e.logp;
    grad_c[slots.mu_residue[mi]] += e.d_x;
    let e = truncated_normal(s2_a, p.residue_var_loc, sq(p.residue_var_scale));
    total += e.logp;
    grad_c[slots.sigma2_residue[mi]] += e.d_x;
    total
}

/// Noise-variance parent and its two hyperpriors for one group.
fn noise_prior_terms(x: &[f64], grad_c: &mut [f64], slots: &GroupSlots, noise: &NoisePrior) -> f64 {
    let mut total = 0.0;
    let mu_s = x[slots.mu_sigma2];
    let s2_s = x[slots.sigma2_sigma2];

    let e = truncated_normal(x[slots.sigma2_h], mu_s, s2_s);
    total += e.logp;
    grad_c[slots.sigma2_h] += e.d_x;
    grad_c[slots.mu_sigma2] += e.d_loc;
    grad_c[slots.sigma2_sigma2] += e.d_var;

    let e = truncated_normal(mu_s, noise.mean_loc, sq(noise.mean_scale));
    total += e.logp;
    grad_c[slots.mu_sigma2] += e.d_x;
    let e = truncated_normal(s2_s, noise.var_loc, sq(noise.var_scale));
    total += e.logp;
    grad_c[slots.sigma2_sigma2] += e.d_x;
    total
}

impl LogDensityGradient for HierarchicalFrfModel {
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
