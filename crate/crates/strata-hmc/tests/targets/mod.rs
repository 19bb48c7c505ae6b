use strata_hmc::LogDensityGradient;

/// Independent standard normal coordinates.
pub struct StdGaussian(pub usize);

impl LogDensityGradient for StdGaussian {
    fn dim(&self) -> usize {
        self.0
    }

    fn log_density_gradient(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let mut lp = 0.0;
        for (g, t) in grad.iter_mut().zip(theta) {
            lp -= 0.5 * t * t;
            *g = -t;
        }
        lp
    }
}

/// Zero-mean bivariate Gaussian, unit variances, correlation `rho`.
pub struct CorrelatedGaussian(pub f64);

impl LogDensityGradient for CorrelatedGaussian {
    fn dim(&self) -> usize {
        2
    }

    fn log_density_gradient(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let rho = self.0;
        let d = 1.0 - rho * rho;
        let (x, y) = (theta[0], theta[1]);
        grad[0] = -(x - rho * y) / d;
        grad[1] = -(y - rho * x) / d;
        -0.5 * (x * x - 2.0 * rho * x * y + y * y) / d
    }
}

/// One-dimensional Student-t with `nu` degrees of freedom.
pub struct StudentT(pub f64);

impl LogDensityGradient for StudentT {
    fn dim(&self) -> usize {
        1
    }

    fn log_density_gradient(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let nu = self.0;
        let t = theta[0];
        grad[0] = -(nu + 1.0) * t / (nu + t * t);
        -0.5 * (nu + 1.0) * (1.0 + t * t / nu).ln()
    }
}

/// Light-tailed quartic well `log p = -theta^4`. Oversized steps
/// overshoot into the stiff tails and blow the energy up, so divergence
/// counts rise sharply with the step size.
pub struct Quartic;

impl LogDensityGradient for Quartic {
    fn dim(&self) -> usize {
        1
    }

    fn log_density_gradient(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let t = theta[0];
        grad[0] = -4.0 * t * t * t;
        -t * t * t * t
    }
}

/// Flat density reporting a constant gradient. With `slope == 0` it is a
/// genuine flat target; a huge slope is deliberately inconsistent with
/// the density and drives every trajectory divergent even at the tiny
/// step sizes adaptation retreats to, probing the sampler's failure
/// paths.
pub struct ConstantGradient {
    pub dim: usize,
    pub slope: f64,
}

impl LogDensityGradient for ConstantGradient {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density_gradient(&self, _theta: &[f64], grad: &mut [f64]) -> f64 {
        for g in grad.iter_mut() {
            *g = self.slope;
        }
        0.0
    }
}

/// Empty support: every point reports `-inf`.
pub struct OffSupport;

impl LogDensityGradient for OffSupport {
    fn dim(&self) -> usize {
        1
    }

    fn log_density_gradient(&self, _theta: &[f64], grad: &mut [f64]) -> f64 {
        grad[0] = 0.0;
        f64::NEG_INFINITY
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}
