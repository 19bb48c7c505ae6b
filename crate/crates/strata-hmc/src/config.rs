use crate::SamplerError;

/// Run settings for [`adapt_and_sample`](crate::adapt_and_sample).
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    /// Number of independent chains.
    pub chains: usize,
    /// Adaptation draws per chain, discarded from the posterior arrays.
    pub warmup_draws: usize,
    /// Retained draws per chain.
    pub sampling_draws: usize,
    /// Dual-averaging target for the mean acceptance statistic, in (0, 1).
    pub target_accept: f64,
    /// Trajectory doubling cap. At least one doubling is always performed,
    /// so 0 degenerates to a single-leapfrog Metropolis kernel.
    pub max_tree_depth: usize,
    /// Energy error above which a trajectory is flagged divergent.
    pub divergence_energy_threshold: f64,
    /// Base seed shared by all chains.
    pub seed: u64,
    /// RNG stream id per chain; defaults to the chain index. The draw of
    /// chain `c` depends only on `(seed, chain_streams[c])`, so permuting
    /// the ids permutes the chains draw-for-draw.
    pub chain_streams: Option<Vec<u64>>,
    /// Fixed initial step size. `None` starts from a coarse search that
    /// brackets an acceptance statistic of 0.8. With `warmup_draws == 0`
    /// the value is used unadapted.
    pub initial_step_size: Option<f64>,
    /// Relative jitter applied per chain to the model's initial point,
    /// drawn uniformly from `[-jitter, jitter]` per coordinate (additive
    /// for coordinates at zero). Zero disables jittering.
    pub initial_jitter: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            chains: 4,
            warmup_draws: 1000,
            sampling_draws: 1000,
            target_accept: 0.8,
            max_tree_depth: 10,
            divergence_energy_threshold: 1000.0,
            seed: 0,
            chain_streams: None,
            initial_step_size: None,
            initial_jitter: 0.1,
        }
    }
}

impl SamplerConfig {
    pub(crate) fn validate(&self) -> Result<(), SamplerError> {
        if self.chains == 0 {
            return Err(SamplerError::NoChains);
        }
        if self.sampling_draws == 0 {
            return Err(SamplerError::NoDraws);
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(SamplerError::TargetAccept(self.target_accept));
        }
        if let Some(eps) = self.initial_step_size {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(SamplerError::StepSize(eps));
            }
        }
        if let Some(streams) = &self.chain_streams {
            if streams.len() != self.chains {
                return Err(SamplerError::StreamCount {
                    got: streams.len(),
                    chains: self.chains,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn stream_for_chain(&self, chain: usize) -> u64 {
        match &self.chain_streams {
            Some(streams) => streams[chain],
            None => chain as u64,
        }
    }
}
