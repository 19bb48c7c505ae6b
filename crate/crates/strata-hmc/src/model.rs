/// A differentiable unnormalised log density over `R^dim`.
///
/// Implementations must be thread-safe: chains evaluate the model
/// concurrently. The density may be improper or unnormalised; only
/// differences of log density matter to the sampler.
pub trait LogDensityGradient: Sync {
    /// Number of coordinates of the sample space.
    fn dim(&self) -> usize;

    /// Evaluates the log density at `theta` and writes the gradient into
    /// `grad` (length `dim`). A return of `-inf` or NaN marks `theta` as
    /// outside the support; the gradient content is then ignored and the
    /// proposal treated as divergent.
    fn log_density_gradient(&self, theta: &[f64], grad: &mut [f64]) -> f64;

    /// Starting point for the chains in the sampled (unconstrained) space.
    /// Chains jitter this point independently. Defaults to the origin.
    fn initial_point(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }
}
