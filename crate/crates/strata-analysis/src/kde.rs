//! Gaussian kernel density estimation with Silverman's bandwidth.

use crate::AnalysisError;

/// A density estimate on an evenly spaced support grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeCurve {
    grid: Vec<f64>,
    density: Vec<f64>,
    bandwidth: f64,
}

impl KdeCurve {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Trapezoid integral over the grid; 1 up to rounding by construction.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.density)
    }

    /// Grid point of the highest density value.
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (i, d) in self.density.iter().enumerate() {
            if *d > self.density[best] {
                best = i;
            }
        }
        self.grid[best]
    }
}

pub(crate) fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Gaussian KDE on `grid_points` evenly spaced points spanning the samples
/// ± 3 bandwidths. Bandwidth is Silverman's 0.9·min(sd, IQR/1.34)·n^(-1/5),
/// falling back to the standard deviation when the IQR degenerates to zero.
/// The curve is renormalised so its trapezoid integral is exactly one.
pub fn kde(samples: &[f64], grid_points: usize) -> Result<KdeCurve, AnalysisError> {
    if samples.len() < 2 {
        return Err(AnalysisError::TooFewSamples);
    }
    if grid_points < 2 {
        return Err(AnalysisError::TooFewGridPoints);
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFiniteInput);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    if sd == 0.0 {
        return Err(AnalysisError::ConstantSamples);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let iqr = crate::diagnostics::quantile(&sorted, 0.75) - crate::diagnostics::quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let bandwidth = 0.9 * spread * n.powf(-0.2);

    let lo = sorted[0] - 3.0 * bandwidth;
    let hi = sorted[sorted.len() - 1] + 3.0 * bandwidth;
    let step = (hi - lo) / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points).map(|i| lo + step * i as f64).collect();

    let norm = 1.0 / (n * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let mut density: Vec<f64> = grid
        .iter()
        .map(|&g| {
            samples
                .iter()
                .map(|&s| {
                    let d = (g - s) / bandwidth;
                    (-0.5 * d * d).exp()
                })
                .sum::<f64>()
                * norm
        })
        .collect();
    let integral = trapezoid(&grid, &density);
    for d in density.iter_mut() {
        *d /= integral;
    }
    Ok(KdeCurve { grid, density, bandwidth })
}
