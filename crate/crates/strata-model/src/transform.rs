//! Bijections between the sampler's unconstrained space and constrained
//! parameter space.
//!
//! Each block maps a contiguous run of coordinates. `constrain` returns the
//! log-Jacobian of the map (added to the target density so the sampler
//! explores the correctly reweighted unconstrained posterior), and
//! `chain_gradient` pushes a constrained-space gradient back through the
//! map, adding the Jacobian's own gradient term.

/// One contiguous transform block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockTransform {
    /// Unbounded coordinates, mapped as-is.
    Identity { len: usize },
    /// Positive coordinates via `x = exp(θ)`.
    Log { len: usize },
    /// (0, 1) coordinates via the logistic function.
    Logit { len: usize },
    /// Strictly increasing positive coordinates: `x₁ = exp(θ₁)`,
    /// `xₘ = xₘ₋₁ + exp(θₘ)`.
    PositiveOrdered { len: usize },
}

impl BlockTransform {
    pub fn len(&self) -> usize {
        match *self {
            BlockTransform::Identity { len }
            | BlockTransform::Log { len }
            | BlockTransform::Logit { len }
            | BlockTransform::PositiveOrdered { len } => len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ordered sequence of blocks covering the full parameter vector.
#[derive(Debug, Clone)]
pub struct TransformPipeline {
    blocks: Vec<BlockTransform>,
    dim: usize,
}

impl TransformPipeline {
    pub fn new(blocks: Vec<BlockTransform>) -> Self {
        let dim = blocks.iter().map(|b| b.len()).sum();
        TransformPipeline { blocks, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[BlockTransform] {
        &self.blocks
    }

    /// Maps unconstrained `theta` to constrained `x`, returning the
    /// log-Jacobian. Overflow in `exp` surfaces as non-finite entries in
    /// `x`; callers treat any non-finite output as off-support.
    pub fn constrain(&self, theta: &[f64], x: &mut [f64]) -> f64 {
        assert_eq!(theta.len(), self.dim);
        assert_eq!(x.len(), self.dim);
        let mut log_jac = 0.0;
        let mut at = 0;
        for block in &self.blocks {
            let n = block.len();
            let (t, out) = (&theta[at..at + n], &mut x[at..at + n]);
            match block {
                BlockTransform::Identity { .. } => out.copy_from_slice(t),
                BlockTransform::Log { .. } => {
                    for (o, &th) in out.iter_mut().zip(t) {
                        *o = th.exp();
                        log_jac += th;
                    }
                }
                BlockTransform::Logit { .. } => {
                    for (o, &th) in out.iter_mut().zip(t) {
                        let v = 1.0 / (1.0 + (-th).exp());
                        *o = v;
                        // log x + log(1-x) = -θ - 2·log(1 + e^{-θ}), stable
                        // for both signs via the softplus identity.
                        log_jac += -th.abs() - 2.0 * (-th.abs()).exp().ln_1p();
                    }
                }
                BlockTransform::PositiveOrdered { .. } => {
                    let mut prev = 0.0;
                    for (o, &th) in out.iter_mut().zip(t) {
                        prev += th.exp();
                        *o = prev;
                        log_jac += th;
                    }
                }
            }
            at += n;
        }
        log_jac
    }

    /// Inverse of `constrain`. Panics if `x` violates a block's support
    /// (non-positive where positivity is required, non-increasing where
    /// ordering is required); inputs come from validated specs.
    pub fn unconstrain(&self, x: &[f64], theta: &mut [f64]) {
        assert_eq!(theta.len(), self.dim);
        assert_eq!(x.len(), self.dim);
        let mut at = 0;
        for block in &self.blocks {
            let n = block.len();
            let (v, out) = (&x[at..at + n], &mut theta[at..at + n]);
            match block {
                BlockTransform::Identity { .. } => out.copy_from_slice(v),
                BlockTransform::Log { .. } => {
                    for (o, &xv) in out.iter_mut().zip(v) {
                        assert!(xv > 0.0, "log-transform input must be positive, got {xv}");
                        *o = xv.ln();
                    }
                }
                BlockTransform::Logit { .. } => {
                    for (o, &xv) in out.iter_mut().zip(v) {
                        assert!(
                            xv > 0.0 && xv < 1.0,
                            "logit-transform input must lie in (0,1), got {xv}"
                        );
                        *o = (xv / (1.0 - xv)).ln();
                    }
                }
                BlockTransform::PositiveOrdered { .. } => {
                    let mut prev = 0.0;
                    for (o, &xv) in out.iter_mut().zip(v) {
                        assert!(xv > prev, "ordered input must increase, got {xv} after {prev}");
                        *o = (xv - prev).ln();
                        prev = xv;
                    }
                }
            }
            at += n;
        }
    }

    /// Converts a constrained-space gradient into the unconstrained-space
    /// gradient of `log p(x(θ)) + log|J(θ)|`:
    /// `g_u = g_c · dx/dθ + d log|J| / dθ`, written into `grad_out`.
    pub fn chain_gradient(&self, x: &[f64], grad_c: &[f64], grad_out: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(grad_c.len(), self.dim);
        assert_eq!(grad_out.len(), self.dim);
        let mut at = 0;
        for block in &self.blocks {
            let n = block.len();
            match block {
                BlockTransform::Identity { .. } => {
                    grad_out[at..at + n].copy_from_slice(&grad_c[at..at + n]);
                }
                BlockTransform::Log { .. } => {
                    for i in at..at + n {
                        grad_out[i] = grad_c[i] * x[i] + 1.0;
                    }
                }
                BlockTransform::Logit { .. } => {
                    for i in at..at + n {
                        let v = x[i];
                        grad_out[i] = grad_c[i] * v * (1.0 - v) + (1.0 - 2.0 * v);
                    }
                }
                BlockTransform::PositiveOrdered { .. } => {
                    // ∂x_j/∂θ_m = e^{θ_m} = x_m - x_{m-1} for j ≥ m, so each
                    // θ_m sees the suffix sum of downstream gradients.
                    let mut suffix = 0.0;
                    for i in (at..at + n).rev() {
                        suffix += grad_c[i];
                        let increment = if i == at { x[i] } else { x[i] - x[i - 1] };
                        grad_out[i] = suffix * increment + 1.0;
                    }
                }
            }
            at += n;
        }
    }
}
