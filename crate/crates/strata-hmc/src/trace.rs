/// Kernel settings a chain finished warm-up with.
#[derive(Debug, Clone)]
pub struct AdaptationRecord {
    pub step_size: f64,
    pub inv_mass_diag: Vec<f64>,
}

/// Draws and transition statistics of one chain. Posterior arrays hold
/// sampling draws only; warm-up draws are kept apart for adaptation
/// diagnostics and never mix into the posterior.
#[derive(Debug, Clone)]
pub struct ChainRecord {
    dim: usize,
    /// Row-major `[draw][coordinate]`, sampling phase only.
    draws: Vec<f64>,
    /// Row-major warm-up draws.
    warmup: Vec<f64>,
    pub divergent: Vec<bool>,
    pub tree_depth: Vec<u32>,
    pub energy: Vec<f64>,
    pub accept_stat: Vec<f64>,
    pub warmup_divergent: Vec<bool>,
    pub adaptation: AdaptationRecord,
}

impl ChainRecord {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        dim: usize,
        draws: Vec<f64>,
        warmup: Vec<f64>,
        divergent: Vec<bool>,
        tree_depth: Vec<u32>,
        energy: Vec<f64>,
        accept_stat: Vec<f64>,
        warmup_divergent: Vec<bool>,
        adaptation: AdaptationRecord,
    ) -> Self {
        assert_eq!(draws.len() % dim, 0);
        assert_eq!(warmup.len() % dim, 0);
        assert_eq!(draws.len() / dim, divergent.len());
        assert_eq!(warmup.len() / dim, warmup_divergent.len());
        Self {
            dim,
            draws,
            warmup,
            divergent,
            tree_depth,
            energy,
            accept_stat,
            warmup_divergent,
            adaptation,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sampling draws in this chain.
    pub fn n_draws(&self) -> usize {
        self.draws.len() / self.dim
    }

    pub fn n_warmup(&self) -> usize {
        self.warmup.len() / self.dim
    }

    pub fn draw(&self, i: usize) -> &[f64] {
        &self.draws[i * self.dim..(i + 1) * self.dim]
    }

    pub fn warmup_draw(&self, i: usize) -> &[f64] {
        &self.warmup[i * self.dim..(i + 1) * self.dim]
    }

    /// Sampling-phase column of one coordinate.
    pub fn parameter(&self, coord: usize) -> Vec<f64> {
        assert!(coord < self.dim);
        self.draws
            .iter()
            .skip(coord)
            .step_by(self.dim)
            .copied()
            .collect()
    }

    pub fn divergence_count(&self) -> usize {
        self.divergent.iter().filter(|d| **d).count()
    }

    pub fn mean_accept_stat(&self) -> f64 {
        if self.accept_stat.is_empty() {
            return f64::NAN;
        }
        self.accept_stat.iter().sum::<f64>() / self.accept_stat.len() as f64
    }
}

/// Joint output of all chains of one run.
#[derive(Debug, Clone)]
pub struct Trace {
    dim: usize,
    chains: Vec<ChainRecord>,
}

impl Trace {
    pub(crate) fn new(dim: usize, chains: Vec<ChainRecord>) -> Self {
        assert!(chains.iter().all(|c| c.dim == dim));
        Self { dim, chains }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn chains(&self) -> &[ChainRecord] {
        &self.chains
    }

    pub fn chain(&self, i: usize) -> &ChainRecord {
        &self.chains[i]
    }

    /// One coordinate's sampling draws, one vector per chain, for
    /// convergence diagnostics.
    pub fn parameter_by_chain(&self, coord: usize) -> Vec<Vec<f64>> {
        self.chains.iter().map(|c| c.parameter(coord)).collect()
    }

    /// One coordinate's sampling draws pooled over chains in chain order.
    pub fn pooled_parameter(&self, coord: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for c in &self.chains {
            out.extend(c.parameter(coord));
        }
        out
    }

    /// Fraction of divergent sampling transitions over all chains.
    pub fn divergence_rate(&self) -> f64 {
        let total: usize = self.chains.iter().map(|c| c.n_draws()).sum();
        if total == 0 {
            return 0.0;
        }
        let div: usize = self.chains.iter().map(|c| c.divergence_count()).sum();
        div as f64 / total as f64
    }
}
