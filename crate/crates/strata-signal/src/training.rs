use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::SignalError;

/// Uniformly random subset of `keep` observations without replacement,
/// deterministic under `seed`. Input order is preserved.
pub fn decimate_spectral_lines<T: Clone>(
    observations: &[T],
    keep: usize,
    seed: u64,
) -> Result<Vec<T>, SignalError> {
    if keep == 0 || keep > observations.len() {
        return Err(SignalError::KeepOutOfRange { keep, len: observations.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = rand::seq::index::sample(&mut rng, observations.len(), keep).into_vec();
    indices.sort_unstable();
    Ok(indices.into_iter().map(|i| observations[i].clone()).collect())
}

/// Adds zero-mean Gaussian noise with standard deviation
/// `fraction × max|value|` to each observation value, deterministic under
/// `seed`. Pairs are `(frequency, value)`; frequencies pass through.
pub fn add_training_noise(
    observations: &[(f64, f64)],
    fraction: f64,
    seed: u64,
) -> Result<Vec<(f64, f64)>, SignalError> {
    if observations.is_empty() {
        return Err(SignalError::EmptyObservations);
    }
    if !fraction.is_finite() || fraction < 0.0 {
        return Err(SignalError::NoiseFraction { value: fraction });
    }
    let peak = observations.iter().map(|(_, v)| v.abs()).fold(0.0f64, f64::max);
    let sigma = fraction * peak;
    if sigma == 0.0 {
        return Ok(observations.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma is positive and finite");
    Ok(observations
        .iter()
        .map(|&(f, v)| (f, v + normal.sample(&mut rng)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimate_full_keep_is_identity() {
        let obs: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, (i * i) as f64)).collect();
        assert_eq!(decimate_spectral_lines(&obs, 10, 1).unwrap(), obs);
    }

    #[test]
    fn decimate_single_keep_is_member() {
        let obs: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, -(i as f64))).collect();
        let kept = decimate_spectral_lines(&obs, 1, 99).unwrap();
        assert_eq!(kept.len(), 1);
        assert!(obs.contains(&kept[0]));
    }

    #[test]
    fn decimate_deterministic_and_ordered() {
        let obs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let a = decimate_spectral_lines(&obs, 17, 42).unwrap();
        let b = decimate_spectral_lines(&obs, 17, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] < w[1]), "subset preserves input order");
        let c = decimate_spectral_lines(&obs, 17, 43).unwrap();
        assert_ne!(a, c, "different seed selects a different subset");
    }

    #[test]
    fn decimate_rejects_bad_keep() {
        let obs = [1.0, 2.0];
        assert!(decimate_spectral_lines(&obs, 0, 1).is_err());
        assert!(decimate_spectral_lines(&obs, 3, 1).is_err());
    }

    #[test]
    fn noise_zero_fraction_is_identity() {
        let obs = vec![(1.0, 0.5), (2.0, -0.25)];
        assert_eq!(add_training_noise(&obs, 0.0, 7).unwrap(), obs);
    }

    #[test]
    fn noise_sample_std_matches_request() {
        let obs: Vec<(f64, f64)> = (0..10_000).map(|i| (i as f64, 2.0)).collect();
        let noisy = add_training_noise(&obs, 0.05, 123).unwrap();
        let diffs: Vec<f64> = noisy.iter().zip(&obs).map(|(n, o)| n.1 - o.1).collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / diffs.len() as f64;
        let want = 0.05 * 2.0;
        assert!(
            (var.sqrt() - want).abs() < 0.05 * want,
            "sample std {} vs requested {}",
            var.sqrt(),
            want
        );
    }

    #[test]
    fn noise_deterministic_under_seed() {
        let obs = vec![(1.0, 1.0), (2.0, -3.0), (3.0, 0.5)];
        assert_eq!(
            add_training_noise(&obs, 0.05, 11).unwrap(),
            add_training_noise(&obs, 0.05, 11).unwrap()
        );
    }

    #[test]
    fn noise_rejects_empty_and_negative() {
        assert!(add_training_noise(&[], 0.05, 1).is_err());
        assert!(add_training_noise(&[(1.0, 1.0)], -0.1, 1).is_err());
    }
}
