//! Hamiltonian Monte Carlo with no-U-turn trajectory adaptation.
//!
//! The sampler targets an arbitrary differentiable log density supplied
//! through the [`LogDensityGradient`] trait and produces a [`Trace`] of
//! posterior draws. The transition kernel is multinomial NUTS: each draw
//! simulates Hamiltonian dynamics with the leapfrog integrator, doubling
//! the trajectory in a random direction until the path turns back on
//! itself, and samples a state from the trajectory weighted by the
//! Boltzmann factor `exp(H0 - H)`.
//!
//! Warm-up interleaves two adaptations:
//!
//! * step size, by dual averaging towards a target acceptance statistic;
//! * a diagonal mass matrix, from posterior variance estimates collected
//!   over a schedule of doubling windows (15% initial step-size-only
//!   buffer, variance windows of 25, 50, 100, ... draws, 10% terminal
//!   buffer). Each window close re-estimates the mass matrix, re-seeds
//!   the step size, and restarts dual averaging.
//!
//! Chains run independently (in parallel) on counter-based RNG streams of
//! a single seed, so results are reproducible regardless of thread
//! scheduling, and permuting stream assignments permutes the chains.
//!
//! Divergences are flagged when the energy error along a trajectory
//! exceeds a configurable threshold; diverging subtrees are discarded and
//! never contribute candidate states.

mod adapt;
mod chain;
mod config;
mod leapfrog;
mod model;
mod nuts;
mod trace;

pub use adapt::{find_reasonable_step_size, DualAveraging, WarmupSchedule};
pub use chain::adapt_and_sample;
pub use config::SamplerConfig;
pub use leapfrog::leapfrog;
pub use model::LogDensityGradient;
pub use nuts::{nuts_draw, NutsDraw};
pub use trace::{AdaptationRecord, ChainRecord, Trace};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("sampler requires at least one chain")]
    NoChains,
    #[error("sampler requires at least one post-warm-up draw per chain")]
    NoDraws,
    #[error("target acceptance must lie strictly between 0 and 1, got {0}")]
    TargetAccept(f64),
    #[error("step size override must be positive and finite, got {0}")]
    StepSize(f64),
    #[error("chain_streams overrides {got} stream ids for {chains} chains")]
    StreamCount { got: usize, chains: usize },
    #[error(
        "model dimension is zero; the target must have at least one parameter"
    )]
    ZeroDim,
    #[error(
        "initial point of chain {chain} has non-finite log density {logp}; \
         adjust the initialisation"
    )]
    BadInit { chain: usize, logp: f64 },
    #[error(
        "chain {chain} diverged on every warm-up draw; the step size could \
         not be stabilised (final step size {step_size:.3e}). The target may \
         be improper or the gradient inconsistent with the density"
    )]
    AllDivergentWarmup { chain: usize, step_size: f64 },
}
