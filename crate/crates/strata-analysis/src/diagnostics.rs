//! Multi-chain convergence diagnostics for one scalar parameter.
//!
//! R-hat is the split form: each chain is halved and the classic
//! between/within variance ratio is taken over the halves. ESS is the
//! rank-normalised bulk effective sample size: pooled draws are replaced by
//! normal scores of their fractional ranks, then the autocorrelation time
//! is estimated per split chain with FFT autocovariances combined through
//! Geyer's initial monotone positive sequence.

use rustfft::{num_complex::Complex, FftPlanner};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::AnalysisError;

/// Split R-hat and rank-normalised bulk ESS for one parameter.
///
/// Chains are truncated to the shortest length before splitting, so ragged
/// inputs are tolerated. Errors on fewer than two chains, fewer than four
/// draws in any chain, non-finite draws, or a constant chain.
pub fn rhat_ess(chains: &[Vec<f64>]) -> Result<(f64, f64), AnalysisError> {
    let halves = split_chains(chains)?;
    Ok((split_rhat(&halves), bulk_ess(&halves)))
}

/// Posterior summary of one parameter across chains.
#[derive(Debug, Clone)]
pub struct ScalarSummary {
    pub mean: f64,
    /// Sample standard deviation of the pooled draws.
    pub sd: f64,
    pub q025: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q975: f64,
    pub rhat: f64,
    pub ess: f64,
    /// Monte Carlo standard error of the mean, sd/√ESS.
    pub mcse: f64,
}

pub fn summarize_parameter(chains: &[Vec<f64>]) -> Result<ScalarSummary, AnalysisError> {
    let (rhat, ess) = rhat_ess(chains)?;
    let mut pooled: Vec<f64> = chains.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let mean = pooled.iter().sum::<f64>() / n;
    let ss = pooled.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    let sd = (ss / (n - 1.0)).sqrt();
    pooled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ScalarSummary {
        mean,
        sd,
        q025: quantile(&pooled, 0.025),
        q25: quantile(&pooled, 0.25),
        median: quantile(&pooled, 0.5),
        q75: quantile(&pooled, 0.75),
        q975: quantile(&pooled, 0.975),
        rhat,
        ess,
        mcse: sd / ess.sqrt(),
    })
}

/// Linearly interpolated quantile of an ascending-sorted slice.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Validate and halve each chain (middle draw dropped when odd), after
/// truncating all chains to the shortest one.
fn split_chains(chains: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, AnalysisError> {
    if chains.len() < 2 {
        return Err(AnalysisError::TooFewChains);
    }
    let n_min = chains.iter().map(|c| c.len()).min().unwrap();
    if n_min < 4 {
        return Err(AnalysisError::TooFewDraws);
    }
    let half = n_min / 2;
    let mut out = Vec::with_capacity(2 * chains.len());
    for chain in chains {
        if chain.iter().any(|v| !v.is_finite()) {
            return Err(AnalysisError::NonFiniteInput);
        }
        if chain.iter().all(|v| *v == chain[0]) {
            return Err(AnalysisError::ConstantChain);
        }
        out.push(chain[..half].to_vec());
        out.push(chain[n_min - half..n_min].to_vec());
    }
    Ok(out)
}

fn chain_mean(chain: &[f64]) -> f64 {
    chain.iter().sum::<f64>() / chain.len() as f64
}

/// Classic potential scale reduction over equally long chains.
fn split_rhat(halves: &[Vec<f64>]) -> f64 {
    let m = halves.len() as f64;
    let n = halves[0].len() as f64;
    let means: Vec<f64> = halves.iter().map(|h| chain_mean(h)).collect();
    let grand = means.iter().sum::<f64>() / m;
    let b = n / (m - 1.0) * means.iter().map(|v| (v - grand) * (v - grand)).sum::<f64>();
    let w = halves
        .iter()
        .zip(&means)
        .map(|(h, mu)| h.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (n - 1.0))
        .sum::<f64>()
        / m;
    let var_plus = (n - 1.0) / n * w + b / n;
    (var_plus / w).sqrt()
}

/// Replace every draw by the normal score of its fractional rank over the
/// pooled draws (ties averaged), preserving the chain structure.
fn rank_normalize(halves: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let total: usize = halves.iter().map(|h| h.len()).sum();
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(total);
    for (c, h) in halves.iter().enumerate() {
        for i in 0..h.len() {
            order.push((c, i));
        }
    }
    order.sort_by(|a, b| halves[a.0][a.1].partial_cmp(&halves[b.0][b.1]).unwrap());

    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let mut z: Vec<Vec<f64>> = halves.iter().map(|h| vec![0.0; h.len()]).collect();
    let mut start = 0;
    while start < total {
        let mut stop = start + 1;
        let value = halves[order[start].0][order[start].1];
        while stop < total && halves[order[stop].0][order[stop].1] == value {
            stop += 1;
        }
        // Average 1-based rank of the tie run [start, stop).
        let rank = (start + stop + 1) as f64 / 2.0;
        let score = std_normal.inverse_cdf((rank - 0.375) / (total as f64 + 0.25));
        for &(c, i) in &order[start..stop] {
            z[c][i] = score;
        }
        start = stop;
    }
    z
}

/// Biased (divisor n) autocovariance sequence via FFT.
fn autocovariance(x: &[f64], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let n = x.len();
    let mean = chain_mean(x);
    let len = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); len];
    for (b, v) in buf.iter_mut().zip(x) {
        b.re = v - mean;
    }
    planner.plan_fft_forward(len).process(&mut buf);
    for b in buf.iter_mut() {
        *b = Complex::new(b.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let scale = 1.0 / (len as f64 * n as f64);
    buf[..n].iter().map(|b| b.re * scale).collect()
}

/// Effective sample size of equally long chains from combined-chain
/// autocorrelations truncated by Geyer's initial monotone positive
/// sequence, capped at total·log10(total).
fn combined_ess(chains: &[Vec<f64>]) -> f64 {
    let m = chains.len();
    let n = chains[0].len();
    let mut planner = FftPlanner::new();
    let acov: Vec<Vec<f64>> = chains.iter().map(|c| autocovariance(c, &mut planner)).collect();
    let means: Vec<f64> = chains.iter().map(|c| chain_mean(c)).collect();
    let grand = means.iter().sum::<f64>() / m as f64;
    let mean_var =
        acov.iter().map(|a| a[0]).sum::<f64>() / m as f64 * n as f64 / (n as f64 - 1.0);
    let var_plus = mean_var * (n as f64 - 1.0) / n as f64
        + means.iter().map(|v| (v - grand) * (v - grand)).sum::<f64>() / (m as f64 - 1.0);

    let lag_mean = |t: usize| acov.iter().map(|a| a[t]).sum::<f64>() / m as f64;
    let mut rho = vec![0.0; n + 2];
    rho[0] = 1.0;
    rho[1] = 1.0 - (mean_var - lag_mean(1)) / var_plus;
    let mut rho_even = rho[0];
    let mut rho_odd = rho[1];
    let mut s = 1;
    while s < n.saturating_sub(4) && rho_even + rho_odd > 0.0 {
        rho_even = 1.0 - (mean_var - lag_mean(s + 1)) / var_plus;
        rho_odd = 1.0 - (mean_var - lag_mean(s + 2)) / var_plus;
        if rho_even + rho_odd >= 0.0 {
            rho[s + 1] = rho_even;
            rho[s + 2] = rho_odd;
        }
        s += 2;
    }
    let max_s = s;
    // Carrying a final positive even term reduces variance for antithetic
    // chains.
    if rho_even > 0.0 {
        rho[max_s + 1] = rho_even;
    }
    let mut t = 1;
    while t + 3 <= max_s {
        if rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t] {
            rho[t + 1] = (rho[t - 1] + rho[t]) / 2.0;
            rho[t + 2] = rho[t + 1];
        }
        t += 2;
    }
    let total = (m * n) as f64;
    let tau = -1.0 + 2.0 * rho[..max_s].iter().sum::<f64>() + rho[max_s + 1];
    (total / tau).min(total * total.log10())
}

fn bulk_ess(halves: &[Vec<f64>]) -> f64 {
    combined_ess(&rank_normalize(halves))
}
