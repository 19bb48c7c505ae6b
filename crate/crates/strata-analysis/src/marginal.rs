//! Population-level marginals from hyper-parameter draws.
//!
//! For each posterior draw of a parent distribution's parameters, one value
//! is drawn from that distribution; the pooled values are then smoothed
//! with a KDE. This two-stage procedure turns hyper-level uncertainty into
//! a single population density.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

use crate::kde::{kde, KdeCurve};
use crate::AnalysisError;

/// Posterior draws of one parent distribution's parameters.
#[derive(Debug, Clone, Copy)]
pub enum PopulationFamily<'a> {
    /// Normal parent sampled as (mean, variance) pairs.
    Gaussian { means: &'a [f64], variances: &'a [f64] },
    /// Beta parent sampled as (alpha, beta) shape pairs.
    Beta { alphas: &'a [f64], betas: &'a [f64] },
}

pub fn population_marginal(
    family: PopulationFamily,
    grid_points: usize,
    seed: u64,
) -> Result<KdeCurve, AnalysisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = match family {
        PopulationFamily::Gaussian { means, variances } => {
            check_lengths(means, variances)?;
            means
                .iter()
                .zip(variances)
                .map(|(&mu, &var)| {
                    if !(mu.is_finite() && var.is_finite() && var >= 0.0) {
                        return Err(AnalysisError::BadFamilyParameter);
                    }
                    let dist = rand_distr::Normal::new(mu, var.sqrt())
                        .map_err(|_| AnalysisError::BadFamilyParameter)?;
                    Ok(dist.sample(&mut rng))
                })
                .collect::<Result<Vec<f64>, _>>()?
        }
        PopulationFamily::Beta { alphas, betas } => {
            check_lengths(alphas, betas)?;
            alphas
                .iter()
                .zip(betas)
                .map(|(&a, &b)| {
                    if !(a.is_finite() && b.is_finite()) {
                        return Err(AnalysisError::BadFamilyParameter);
                    }
                    let dist = rand_distr::Beta::new(a, b)
                        .map_err(|_| AnalysisError::BadFamilyParameter)?;
                    Ok(dist.sample(&mut rng))
                })
                .collect::<Result<Vec<f64>, _>>()?
        }
    };
    kde(&draws, grid_points)
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<(), AnalysisError> {
    if a.is_empty() {
        return Err(AnalysisError::EmptyTrace);
    }
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}
