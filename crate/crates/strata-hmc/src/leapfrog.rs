use crate::LogDensityGradient;

/// Position/momentum pair with the density and gradient cached at the
/// position, so integration never re-evaluates a visited point.
#[derive(Debug, Clone)]
pub(crate) struct PhasePoint {
    pub theta: Vec<f64>,
    pub momentum: Vec<f64>,
    pub grad: Vec<f64>,
    pub logp: f64,
}

impl PhasePoint {
    /// Total energy `-log p + K` under a diagonal metric. Off-support
    /// states (non-finite density or momentum) report infinite energy and
    /// are therefore always treated as divergent.
    pub fn energy(&self, inv_mass: &[f64]) -> f64 {
        if !self.logp.is_finite() {
            return f64::INFINITY;
        }
        let k = kinetic(&self.momentum, inv_mass);
        if !k.is_finite() {
            return f64::INFINITY;
        }
        -self.logp + k
    }
}

/// Kinetic energy `p' M^-1 p / 2` for a diagonal mass matrix.
pub(crate) fn kinetic(momentum: &[f64], inv_mass: &[f64]) -> f64 {
    0.5 * momentum
        .iter()
        .zip(inv_mass)
        .map(|(p, im)| p * p * im)
        .sum::<f64>()
}

/// One leapfrog step in place; a negative `step` integrates backwards.
/// The velocity is `M^-1 p`, so heavier coordinates move more slowly.
pub(crate) fn step_in_place<M: LogDensityGradient>(
    model: &M,
    point: &mut PhasePoint,
    step: f64,
    inv_mass: &[f64],
) {
    let half = 0.5 * step;
    for (p, g) in point.momentum.iter_mut().zip(&point.grad) {
        *p += half * g;
    }
    for ((t, p), im) in point
        .theta
        .iter_mut()
        .zip(&point.momentum)
        .zip(inv_mass)
    {
        *t += step * p * im;
    }
    point.logp = model.log_density_gradient(&point.theta, &mut point.grad);
    // Off support the gradient carries no meaning; the state already has
    // infinite energy, so the closing half-step is skipped rather than
    // poisoning the momentum with it.
    if point.logp.is_finite() {
        for (p, g) in point.momentum.iter_mut().zip(&point.grad) {
            *p += half * g;
        }
    }
}

/// A single leapfrog step under the unit metric, returning the updated
/// position and momentum. Exposed for integrator-level checks; the
/// sampler uses the same kernel with its adapted metric.
pub fn leapfrog<M: LogDensityGradient>(
    model: &M,
    theta: &[f64],
    momentum: &[f64],
    step_size: f64,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(theta.len(), model.dim(), "position length mismatch");
    assert_eq!(momentum.len(), model.dim(), "momentum length mismatch");
    let mut grad = vec![0.0; theta.len()];
    let logp = model.log_density_gradient(theta, &mut grad);
    let mut point = PhasePoint {
        theta: theta.to_vec(),
        momentum: momentum.to_vec(),
        grad,
        logp,
    };
    let inv_mass = vec![1.0; theta.len()];
    step_in_place(model, &mut point, step_size, &inv_mass);
    (point.theta, point.momentum)
}
