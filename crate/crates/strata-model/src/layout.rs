//! Parameter vector layout: coordinate names, transform blocks, and slot
//! indices tying each named quantity to its position.

use crate::spec::{HierarchySpec, PoolingMode};
use crate::transform::{BlockTransform, TransformPipeline};

/// Names and transforms for one model's parameter vector. Coordinate `i` of
/// the unconstrained vector maps to the constrained quantity `names()[i]`.
#[derive(Debug, Clone)]
pub struct ParameterLayout {
    names: Vec<String>,
    pipeline: TransformPipeline,
}

impl ParameterLayout {
    pub(crate) fn new(names: Vec<String>, pipeline: TransformPipeline) -> Self {
        assert_eq!(names.len(), pipeline.dim());
        ParameterLayout { names, pipeline }
    }

    pub fn dim(&self) -> usize {
        self.pipeline.dim()
    }

    /// Dot-separated coordinate names with 1-based domain and mode indices
    /// (e.g. `omega_nat.2.1` for domain 2, mode 1). Index segments that
    /// would be constant across the layout are omitted.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn pipeline(&self) -> &TransformPipeline {
        &self.pipeline
    }

    /// Constrained view of an unconstrained draw (log-Jacobian discarded).
    pub fn constrain(&self, theta: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        self.pipeline.constrain(theta, &mut x);
        x
    }

    pub fn unconstrain(&self, x: &[f64]) -> Vec<f64> {
        let mut theta = vec![0.0; self.dim()];
        self.pipeline.unconstrain(x, &mut theta);
        theta
    }
}

/// Coordinate slots for one inference group: one independent copy of the
/// hierarchy. Partial pooling uses a single group whose member sets are the
/// domains; no pooling uses one single-set group per domain; complete
/// pooling uses a single group with a single member set.
#[derive(Debug, Clone)]
pub struct GroupSlots {
    /// `omega[set][mode]`: domain-level natural frequencies.
    pub omega: Vec<Vec<usize>>,
    /// `zeta[set][mode]`: domain-level damping ratios.
    pub zeta: Vec<Vec<usize>>,
    /// `residue[mode]`: residues shared across the group's member sets.
    pub residue: Vec<usize>,
    /// Noise variance shared across the group's member sets.
    pub sigma2_h: usize,
    pub mu_omega: Vec<usize>,
    pub sigma2_omega: Vec<usize>,
    pub alpha_zeta: Vec<usize>,
    pub beta_zeta: Vec<usize>,
    pub mu_residue: Vec<usize>,
    pub sigma2_residue: Vec<usize>,
    pub mu_sigma2: usize,
    pub sigma2_sigma2: usize,
}

impl GroupSlots {
    pub fn member_sets(&self) -> usize {
        self.omega.len()
    }
}

pub(crate) struct HierarchyLayout {
    pub layout: ParameterLayout,
    pub groups: Vec<GroupSlots>,
    /// `(group, member set)` serving each data domain.
    pub member_of_data: Vec<(usize, usize)>,
}

pub(crate) fn build_hierarchy_layout(spec: &HierarchySpec) -> HierarchyLayout {
    let m = spec.n_modes();
    let k = spec.n_domains;
    let (n_groups, sets_per_group, member_of_data): (usize, usize, Vec<(usize, usize)>) =
        match spec.pooling {
            PoolingMode::PartialPooling => (1, k, (0..k).map(|d| (0, d)).collect()),
            PoolingMode::NoPooling => (k, 1, (0..k).map(|d| (d, 0)).collect()),
            PoolingMode::CompletePooling => (1, 1, (0..k).map(|_| (0, 0)).collect()),
        };

    let mut names = Vec::new();
    let mut blocks = Vec::new();
    let mut groups = Vec::with_capacity(n_groups);
    let mut next = 0usize;

    // Index segments: member sets get their set index when a group has
    // several, otherwise the group index distinguishes coordinates (and a
    // lone group with a lone set needs neither).
    let set_tag = |g: usize, s: usize| -> String {
        if sets_per_group > 1 {
            format!(".{}", s + 1)
        } else if n_groups > 1 {
            format!(".{}", g + 1)
        } else {
            String::new()
        }
    };
    let group_tag =
        |g: usize| -> String { if n_groups > 1 { format!(".{}", g + 1) } else { String::new() } };

    for g in 0..n_groups {
        let mut omega = Vec::with_capacity(sets_per_group);
        let mut zeta = Vec::with_capacity(sets_per_group);
        for s in 0..sets_per_group {
            let tag = set_tag(g, s);
            let omega_block = if spec.ordered_frequencies {
                BlockTransform::PositiveOrdered { len: m }
            } else {
                BlockTransform::Log { len: m }
            };
            blocks.push(omega_block);
            let mut om = Vec::with_capacity(m);
            for mi in 0..m {
                names.push(format!("omega_nat{tag}.{}", mi + 1));
                om.push(next);
                next += 1;
            }
            omega.push(om);

            blocks.push(BlockTransform::Logit { len: m });
            let mut ze = Vec::with_capacity(m);
            for mi in 0..m {
                names.push(format!("zeta{tag}.{}", mi + 1));
                ze.push(next);
                next += 1;
            }
            zeta.push(ze);
        }

        let tag = group_tag(g);
        let mut mode_vec = |base: &str, block: BlockTransform| -> Vec<usize> {
            blocks.push(block);
            let mut idx = Vec::with_capacity(m);
            for mi in 0..m {
                names.push(format!("{base}{tag}.{}", mi + 1));
                idx.push(next);
                next += 1;
            }
            idx
        };

        let residue = mode_vec("residue", BlockTransform::Identity { len: m });
        let mu_omega = mode_vec("mu_omega", BlockTransform::Log { len: m });
        let sigma2_omega = mode_vec("sigma2_omega", BlockTransform::Log { len: m });
        let alpha_zeta = mode_vec("alpha_zeta", BlockTransform::Log { len: m });
        let beta_zeta = mode_vec("beta_zeta", BlockTransform::Log { len: m });
        let mu_residue = mode_vec("mu_residue", BlockTransform::Identity { len: m });
        let sigma2_residue = mode_vec("sigma2_residue", BlockTransform::Log { len: m });

        // Noise variance plus its two hyper-level nodes, all positive.
        blocks.push(BlockTransform::Log { len: 3 });
        names.push(format!("sigma2_h{tag}"));
        let sigma2_h = next;
        next += 1;
        names.push(format!("mu_sigma2{tag}"));
        let mu_sigma2 = next;
        next += 1;
        names.push(format!("sigma2_sigma2{tag}"));
        let sigma2_sigma2 = next;
        next += 1;

        groups.push(GroupSlots {
            omega,
            zeta,
            residue,
            sigma2_h,
            mu_omega,
            sigma2_omega,
            alpha_zeta,
            beta_zeta,
            mu_residue,
            sigma2_residue,
            mu_sigma2,
            sigma2_sigma2,
        });
    }

    HierarchyLayout {
        layout: ParameterLayout::new(names, TransformPipeline::new(blocks)),
        groups,
        member_of_data,
    }
}
