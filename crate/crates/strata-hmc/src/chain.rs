use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adapt::{find_reasonable_step_size, DualAveraging, RunningVariance, WarmupSchedule};
use crate::nuts::{transition, Candidate};
use crate::trace::{AdaptationRecord, ChainRecord, Trace};
use crate::{LogDensityGradient, SamplerConfig, SamplerError};

/// Runs all configured chains and collects their draws.
///
/// Every chain derives its randomness from `config.seed` on its own
/// counter stream, so runs are reproducible bit for bit independent of
/// thread scheduling, and permuting `chain_streams` permutes the chains.
/// Chains start from the model's initial point under independent jitter.
pub fn adapt_and_sample<M: LogDensityGradient>(
    model: &M,
    config: &SamplerConfig,
) -> Result<Trace, SamplerError> {
    config.validate()?;
    if model.dim() == 0 {
        return Err(SamplerError::ZeroDim);
    }
    let results: Vec<Result<ChainRecord, SamplerError>> = (0..config.chains)
        .into_par_iter()
        .map(|chain| run_chain(model, config, chain))
        .collect();
    let mut chains = Vec::with_capacity(config.chains);
    for r in results {
        chains.push(r?);
    }
    Ok(Trace::new(model.dim(), chains))
}

fn run_chain<M: LogDensityGradient>(
    model: &M,
    config: &SamplerConfig,
    chain: usize,
) -> Result<ChainRecord, SamplerError> {
    let dim = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(config.stream_for_chain(chain));

    let mut theta = model.initial_point();
    assert_eq!(theta.len(), dim, "initial point length mismatch");
    if config.initial_jitter > 0.0 {
        let j = config.initial_jitter;
        for t in theta.iter_mut() {
            let u = rng.gen_range(-j..=j);
            // Relative jitter, additive at exact zeros so those
            // coordinates still spread across chains.
            *t = if *t == 0.0 { u } else { *t * (1.0 + u) };
        }
    }
    let mut grad = vec![0.0; dim];
    let logp = model.log_density_gradient(&theta, &mut grad);
    if !logp.is_finite() {
        return Err(SamplerError::BadInit { chain, logp });
    }
    let mut current = Candidate {
        theta,
        logp,
        grad,
        energy: f64::NAN,
    };

    let mut inv_mass = vec![1.0; dim];
    let mut step_size = match config.initial_step_size {
        Some(s) => s,
        None => find_reasonable_step_size(model, &current.theta, &inv_mass, &mut rng),
    };

    let warmup = config.warmup_draws;
    let schedule = WarmupSchedule::new(warmup);
    let mut da = DualAveraging::new(config.target_accept, step_size);
    let mut variance = RunningVariance::new(dim);
    let mut warmup_draws = Vec::with_capacity(warmup * dim);
    let mut warmup_divergent = Vec::with_capacity(warmup);

    for t in 1..=warmup {
        let tr = transition(
            model,
            &current,
            step_size,
            &inv_mass,
            config.max_tree_depth,
            config.divergence_energy_threshold,
            &mut rng,
        );
        current = tr.candidate;
        da.update(tr.accept_stat);
        step_size = da.current();
        if schedule.collects_at(t) {
            variance.push(&current.theta);
            if schedule.window_closes_at(t) {
                if let Some(var) = variance.regularized() {
                    inv_mass = var;
                }
                variance = RunningVariance::new(dim);
                // Fresh metric invalidates the step size; re-bracket and
                // restart dual averaging around the new value.
                step_size =
                    find_reasonable_step_size(model, &current.theta, &inv_mass, &mut rng);
                da = DualAveraging::new(config.target_accept, step_size);
            }
        }
        warmup_draws.extend_from_slice(&current.theta);
        warmup_divergent.push(tr.divergent);
    }
    if warmup > 0 {
        step_size = da.averaged();
        if warmup_divergent.iter().all(|d| *d) {
            return Err(SamplerError::AllDivergentWarmup { chain, step_size });
        }
    }

    let n = config.sampling_draws;
    let mut draws = Vec::with_capacity(n * dim);
    let mut divergent = Vec::with_capacity(n);
    let mut tree_depth = Vec::with_capacity(n);
    let mut energy = Vec::with_capacity(n);
    let mut accept_stat = Vec::with_capacity(n);
    for _ in 0..n {
        let tr = transition(
            model,
            &current,
            step_size,
            &inv_mass,
            config.max_tree_depth,
            config.divergence_energy_threshold,
            &mut rng,
        );
        current = tr.candidate;
        draws.extend_from_slice(&current.theta);
        divergent.push(tr.divergent);
        tree_depth.push(tr.depth);
        energy.push(current.energy);
        accept_stat.push(tr.accept_stat);
    }

    Ok(ChainRecord::new(
        dim,
        draws,
        warmup_draws,
        divergent,
        tree_depth,
        energy,
        accept_stat,
        warmup_divergent,
        AdaptationRecord {
            step_size,
            inv_mass_diag: inv_mass,
        },
    ))
}
