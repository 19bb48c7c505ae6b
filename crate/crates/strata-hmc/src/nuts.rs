use rand::Rng;

use crate::leapfrog::{kinetic, step_in_place, PhasePoint};
use crate::LogDensityGradient;

/// State selected by a transition, with enough cached to seed the next
/// one without re-evaluating the model.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub theta: Vec<f64>,
    pub logp: f64,
    pub grad: Vec<f64>,
    /// Total energy of the phase point the state was selected from.
    pub energy: f64,
}

/// Summary of a single NUTS transition.
#[derive(Debug, Clone)]
pub struct NutsDraw {
    pub theta: Vec<f64>,
    pub logp: f64,
    /// Energy of the selected phase point.
    pub energy: f64,
    pub divergent: bool,
    /// Trajectory doublings performed.
    pub tree_depth: u32,
    /// Mean Metropolis statistic `min(1, exp(H0 - H))` over the leapfrog
    /// steps of the trajectory; drives step-size adaptation.
    pub accept_stat: f64,
    pub n_leapfrog: u32,
}

pub(crate) struct Transition {
    pub candidate: Candidate,
    pub divergent: bool,
    pub depth: u32,
    pub accept_stat: f64,
    pub n_leapfrog: u32,
}

struct TreeStats {
    sum_accept: f64,
    n_leapfrog: u32,
    divergent: bool,
}

/// A contiguous trajectory segment. `beg`/`end` are its extreme states in
/// integration order and `rho` the sum of momenta over all its states.
struct SubTree {
    beg: PhasePoint,
    end: PhasePoint,
    rho: Vec<f64>,
    candidate: Candidate,
    log_weight: f64,
}

/// Borrowed view of a segment, for U-turn checks across two of them.
#[derive(Clone, Copy)]
struct Span<'a> {
    beg: &'a PhasePoint,
    end: &'a PhasePoint,
    rho: &'a [f64],
}

impl SubTree {
    fn span(&self) -> Span<'_> {
        Span {
            beg: &self.beg,
            end: &self.end,
            rho: &self.rho,
        }
    }
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// No-U-turn criterion for a segment: the velocities at both extremes
/// must keep a positive projection onto the segment's momentum sum.
fn segment_open(beg_p: &[f64], end_p: &[f64], rho: &[f64], inv_mass: &[f64]) -> bool {
    let mut front = 0.0;
    let mut back = 0.0;
    for i in 0..rho.len() {
        back += beg_p[i] * inv_mass[i] * rho[i];
        front += end_p[i] * inv_mass[i] * rho[i];
    }
    back > 0.0 && front > 0.0
}

/// U-turn check across two adjacent segments: the joined span plus the
/// two one-state extensions across the boundary, which catch turns that a
/// check of the full span alone misses.
fn joined_open(left: Span<'_>, right: Span<'_>, inv_mass: &[f64]) -> bool {
    let n = inv_mass.len();
    let mut rho = vec![0.0; n];
    for i in 0..n {
        rho[i] = left.rho[i] + right.rho[i];
    }
    if !segment_open(&left.beg.momentum, &right.end.momentum, &rho, inv_mass) {
        return false;
    }
    for i in 0..n {
        rho[i] = left.rho[i] + right.beg.momentum[i];
    }
    if !segment_open(&left.beg.momentum, &right.beg.momentum, &rho, inv_mass) {
        return false;
    }
    for i in 0..n {
        rho[i] = left.end.momentum[i] + right.rho[i];
    }
    segment_open(&left.end.momentum, &right.end.momentum, &rho, inv_mass)
}

/// Builds a trajectory segment of `2^depth` fresh states beyond `from`.
/// Returns `None` when the segment diverges or turns on itself; its
/// candidate is then discarded by the caller.
#[allow(clippy::too_many_arguments)]
fn build_tree<M, R>(
    model: &M,
    depth: usize,
    from: &PhasePoint,
    step: f64,
    inv_mass: &[f64],
    h0: f64,
    divergence_threshold: f64,
    rng: &mut R,
    stats: &mut TreeStats,
) -> Option<SubTree>
where
    M: LogDensityGradient,
    R: Rng,
{
    if depth == 0 {
        let mut point = from.clone();
        step_in_place(model, &mut point, step, inv_mass);
        stats.n_leapfrog += 1;
        let h = point.energy(inv_mass);
        let log_weight = h0 - h;
        stats.sum_accept += log_weight.min(0.0).exp();
        // NaN energy errors compare false and count as divergent.
        if !(h - h0 <= divergence_threshold) {
            stats.divergent = true;
            return None;
        }
        let candidate = Candidate {
            theta: point.theta.clone(),
            logp: point.logp,
            grad: point.grad.clone(),
            energy: h,
        };
        return Some(SubTree {
            beg: point.clone(),
            rho: point.momentum.clone(),
            candidate,
            log_weight,
            end: point,
        });
    }

    let left = build_tree(
        model,
        depth - 1,
        from,
        step,
        inv_mass,
        h0,
        divergence_threshold,
        rng,
        stats,
    )?;
    let right = build_tree(
        model,
        depth - 1,
        &left.end,
        step,
        inv_mass,
        h0,
        divergence_threshold,
        rng,
        stats,
    )?;

    // Unbiased multinomial choice between the halves.
    let log_weight = log_sum_exp(left.log_weight, right.log_weight);
    let take_right = rng.gen::<f64>() < (right.log_weight - log_weight).exp();

    if !joined_open(left.span(), right.span(), inv_mass) {
        return None;
    }

    let candidate = if take_right {
        right.candidate
    } else {
        left.candidate
    };
    let mut rho = left.rho;
    for (r, p) in rho.iter_mut().zip(&right.rho) {
        *r += p;
    }
    Some(SubTree {
        beg: left.beg,
        end: right.end,
        rho,
        candidate,
        log_weight,
    })
}

/// One NUTS transition from a state with cached density and gradient.
/// The trajectory doubles in a random direction per iteration; each new
/// half may replace the running selection with probability
/// `min(1, W_new / W_old)`, after which the weights merge. Expansion
/// stops on divergence, on a U-turn, or at the doubling cap (at least one
/// doubling always runs, so a cap of zero is a single-step Metropolis
/// kernel).
pub(crate) fn transition<M, R>(
    model: &M,
    current: &Candidate,
    step_size: f64,
    inv_mass: &[f64],
    max_tree_depth: usize,
    divergence_threshold: f64,
    rng: &mut R,
) -> Transition
where
    M: LogDensityGradient,
    R: Rng,
{
    debug_assert!(current.logp.is_finite());
    let momentum: Vec<f64> = inv_mass
        .iter()
        .map(|im| rng.sample::<f64, _>(rand_distr::StandardNormal) / im.sqrt())
        .collect();
    let h0 = -current.logp + kinetic(&momentum, inv_mass);

    let init = PhasePoint {
        theta: current.theta.clone(),
        momentum,
        grad: current.grad.clone(),
        logp: current.logp,
    };
    // Whole-tree bookkeeping in temporal order: `tree_beg` is the
    // backward extreme, `tree_end` the forward extreme.
    let mut tree_beg = init.clone();
    let mut tree_end = init.clone();
    let mut rho = init.momentum;
    let mut log_weight = 0.0_f64;
    let mut candidate = Candidate {
        theta: current.theta.clone(),
        logp: current.logp,
        grad: current.grad.clone(),
        energy: h0,
    };
    let mut stats = TreeStats {
        sum_accept: 0.0,
        n_leapfrog: 0,
        divergent: false,
    };
    let mut depth = 0u32;

    for _ in 0..max_tree_depth.max(1) {
        let forward = rng.gen::<bool>();
        let signed_step = if forward { step_size } else { -step_size };
        let from = if forward { &tree_end } else { &tree_beg };
        let built = build_tree(
            model,
            depth as usize,
            from,
            signed_step,
            inv_mass,
            h0,
            divergence_threshold,
            rng,
            &mut stats,
        );
        let Some(mut sub) = built else { break };
        if !forward {
            // Backward segments are built in reverse time; reorient so
            // beg/end are temporal extremes before merging.
            std::mem::swap(&mut sub.beg, &mut sub.end);
        }
        depth += 1;

        // Biased progressive sampling favours the fresh half.
        let swap_p = (sub.log_weight - log_weight).exp();
        if rng.gen::<f64>() < swap_p {
            candidate = sub.candidate.clone();
        }
        log_weight = log_sum_exp(log_weight, sub.log_weight);

        let tree_span = Span {
            beg: &tree_beg,
            end: &tree_end,
            rho: &rho,
        };
        let open = if forward {
            joined_open(tree_span, sub.span(), inv_mass)
        } else {
            joined_open(sub.span(), tree_span, inv_mass)
        };
        for (r, p) in rho.iter_mut().zip(&sub.rho) {
            *r += p;
        }
        if forward {
            tree_end = sub.end;
        } else {
            tree_beg = sub.beg;
        }
        if !open {
            break;
        }
    }

    let accept_stat = if stats.n_leapfrog == 0 {
        0.0
    } else {
        stats.sum_accept / stats.n_leapfrog as f64
    };
    Transition {
        candidate,
        divergent: stats.divergent,
        depth,
        accept_stat,
        n_leapfrog: stats.n_leapfrog,
    }
}

/// A single NUTS transition from `theta`, for callers driving the kernel
/// draw by draw. Panics if the density at `theta` is not finite.
pub fn nuts_draw<M, R>(
    model: &M,
    theta: &[f64],
    step_size: f64,
    inv_mass_diag: &[f64],
    max_tree_depth: usize,
    divergence_energy_threshold: f64,
    rng: &mut R,
) -> NutsDraw
where
    M: LogDensityGradient,
    R: Rng,
{
    assert_eq!(theta.len(), model.dim(), "position length mismatch");
    assert_eq!(inv_mass_diag.len(), model.dim(), "metric length mismatch");
    let mut grad = vec![0.0; theta.len()];
    let logp = model.log_density_gradient(theta, &mut grad);
    assert!(
        logp.is_finite(),
        "nuts_draw requires a starting point inside the support, got log density {logp}"
    );
    let current = Candidate {
        theta: theta.to_vec(),
        logp,
        grad,
        energy: f64::NAN,
    };
    let out = transition(
        model,
        &current,
        step_size,
        inv_mass_diag,
        max_tree_depth,
        divergence_energy_threshold,
        rng,
    );
    NutsDraw {
        theta: out.candidate.theta,
        logp: out.candidate.logp,
        energy: out.candidate.energy,
        divergent: out.divergent,
        tree_depth: out.depth,
        accept_stat: out.accept_stat,
        n_leapfrog: out.n_leapfrog,
    }
}
