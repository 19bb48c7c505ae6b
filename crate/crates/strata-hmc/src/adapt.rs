use rand::Rng;

use crate::leapfrog::{kinetic, step_in_place, PhasePoint};
use crate::LogDensityGradient;

/// Dual-averaging step-size adaptation towards a target acceptance
/// statistic. `current` is the noisy iterate used while adapting;
/// `averaged` is the Polyak average used once adaptation stops.
#[derive(Debug, Clone)]
pub struct DualAveraging {
    mu: f64,
    target: f64,
    gamma: f64,
    t0: f64,
    kappa: f64,
    count: u64,
    h_bar: f64,
    log_step: f64,
    log_step_avg: f64,
}

impl DualAveraging {
    /// Starts adaptation from `initial_step`, shrinking towards ten times
    /// it so early iterations explore step sizes above the seed value.
    pub fn new(target: f64, initial_step: f64) -> Self {
        Self {
            mu: (10.0 * initial_step).ln(),
            target,
            gamma: 0.05,
            t0: 10.0,
            kappa: 0.75,
            count: 0,
            h_bar: 0.0,
            log_step: initial_step.ln(),
            log_step_avg: initial_step.ln(),
        }
    }

    pub fn update(&mut self, accept_stat: f64) {
        self.count += 1;
        let t = self.count as f64;
        let w = 1.0 / (t + self.t0);
        self.h_bar = (1.0 - w) * self.h_bar + w * (self.target - accept_stat);
        self.log_step = self.mu - t.sqrt() / self.gamma * self.h_bar;
        let eta = t.powf(-self.kappa);
        self.log_step_avg = eta * self.log_step + (1.0 - eta) * self.log_step_avg;
    }

    pub fn current(&self) -> f64 {
        self.log_step.exp()
    }

    pub fn averaged(&self) -> f64 {
        self.log_step_avg.exp()
    }
}

/// Welford accumulator for per-coordinate posterior variances.
pub(crate) struct RunningVariance {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl RunningVariance {
    pub fn new(dim: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    pub fn push(&mut self, theta: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for i in 0..theta.len() {
            let delta = theta[i] - self.mean[i];
            self.mean[i] += delta / n;
            self.m2[i] += delta * (theta[i] - self.mean[i]);
        }
    }

    /// Sample variances shrunk towards a small constant, which keeps the
    /// metric positive and sane when a window saw little movement:
    /// `(n / (n + 5)) var + (5 / (n + 5)) 1e-3`. `None` below two draws.
    pub fn regularized(&self) -> Option<Vec<f64>> {
        if self.count < 2 {
            return None;
        }
        let n = self.count as f64;
        let shrink = n / (n + 5.0);
        Some(
            self.m2
                .iter()
                .map(|m2| shrink * (m2 / (n - 1.0)) + (1.0 - shrink) * 1e-3)
                .collect(),
        )
    }
}

/// Warm-up phase layout (draw indices are 1-based within warm-up):
/// a step-size-only initial buffer, a sequence of doubling variance
/// windows each ending in a metric update, and a step-size-only terminal
/// buffer. Short warm-ups (< 40 draws) adapt the step size only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarmupSchedule {
    /// Draws `1..=init_buffer_end` adapt the step size only.
    pub init_buffer_end: usize,
    /// Last draw that feeds variance collection; the terminal buffer runs
    /// after it.
    pub collection_end: usize,
    /// Window close points, strictly increasing; the last equals
    /// `collection_end`.
    pub window_ends: Vec<usize>,
}

impl WarmupSchedule {
    pub fn new(warmup_draws: usize) -> Self {
        const BASE_WINDOW: usize = 25;
        if warmup_draws < 40 {
            return Self {
                init_buffer_end: warmup_draws,
                collection_end: warmup_draws,
                window_ends: Vec::new(),
            };
        }
        let init = (0.15 * warmup_draws as f64).round() as usize;
        let term = (0.10 * warmup_draws as f64).round() as usize;
        let collection_end = warmup_draws - term;
        let mut window_ends = Vec::new();
        let mut start = init;
        let mut size = BASE_WINDOW;
        loop {
            let end = start + size;
            // The last window absorbs the remainder once the next doubled
            // window would no longer fit.
            if end >= collection_end || end + 2 * size > collection_end {
                window_ends.push(collection_end);
                break;
            }
            window_ends.push(end);
            start = end;
            size *= 2;
        }
        Self {
            init_buffer_end: init,
            collection_end,
            window_ends,
        }
    }

    pub fn collects_at(&self, draw: usize) -> bool {
        draw > self.init_buffer_end && draw <= self.collection_end
    }

    pub fn window_closes_at(&self, draw: usize) -> bool {
        self.window_ends.contains(&draw)
    }
}

/// Coarse bracketing search for a step size whose single-step acceptance
/// crosses 0.8: doubles while acceptance stays above, halves while below.
/// The result seeds dual averaging, which refines it.
pub fn find_reasonable_step_size<M, R>(
    model: &M,
    theta: &[f64],
    inv_mass_diag: &[f64],
    rng: &mut R,
) -> f64
where
    M: LogDensityGradient,
    R: Rng,
{
    const CROSSING: f64 = 0.8;
    let mut grad = vec![0.0; theta.len()];
    let logp = model.log_density_gradient(theta, &mut grad);
    debug_assert!(logp.is_finite());

    let probe = |step: f64, rng: &mut R| -> f64 {
        let momentum: Vec<f64> = inv_mass_diag
            .iter()
            .map(|im| rng.sample::<f64, _>(rand_distr::StandardNormal) / im.sqrt())
            .collect();
        let h0 = -logp + kinetic(&momentum, inv_mass_diag);
        let mut point = PhasePoint {
            theta: theta.to_vec(),
            momentum,
            grad: grad.clone(),
            logp,
        };
        step_in_place(model, &mut point, step, inv_mass_diag);
        let h = point.energy(inv_mass_diag);
        // h may be infinite; the acceptance is then zero.
        (h0 - h).exp().min(1.0)
    };

    let mut step = 1.0_f64;
    let grow = probe(step, rng) > CROSSING;
    let factor = if grow { 2.0 } else { 0.5 };
    for _ in 0..64 {
        step *= factor;
        let accept = probe(step, rng);
        if grow && accept <= CROSSING {
            break;
        }
        if !grow && accept >= CROSSING {
            break;
        }
    }
    step.clamp(1e-10, 1e7)
}
