//! Transform invariants, checked both on bare pipelines and through the
//! layouts the model builders assemble.

use proptest::prelude::*;
use strata_modal::FrequencyGrid;
use strata_model::{
    build_hierarchical_model, BlockTransform, DomainObservations, FrfDataset, HierarchySpec,
    PoolingMode, PriorSpec, TransformPipeline,
};

fn mixed_pipeline() -> TransformPipeline {
    TransformPipeline::new(vec![
        BlockTransform::PositiveOrdered { len: 3 },
        BlockTransform::Logit { len: 2 },
        BlockTransform::Identity { len: 2 },
        BlockTransform::Log { len: 2 },
    ])
}

/// Content-free dataset; these tests only exercise the layout.
fn flat_dataset(n_domains: usize) -> FrfDataset {
    let domains = (0..n_domains)
        .map(|k| {
            let hz: Vec<f64> = (0..12).map(|i| 24.0 + 3.0 * i as f64).collect();
            let real: Vec<f64> = (0..12).map(|i| 0.01 * ((i + k) as f64 * 0.7).sin()).collect();
            DomainObservations::new(FrequencyGrid::from_hz(hz).unwrap(), real, None).unwrap()
        })
        .collect();
    FrfDataset::new(domains).unwrap()
}

proptest! {
    #[test]
    fn round_trip_recovers_unconstrained_values(
        theta in prop::collection::vec(-3.0f64..3.0, 9),
    ) {
        let pipeline = mixed_pipeline();
        let mut x = vec![0.0; 9];
        let log_jac = pipeline.constrain(&theta, &mut x);
        prop_assert!(log_jac.is_finite());
        let mut back = vec![0.0; 9];
        pipeline.unconstrain(&x, &mut back);
        for (a, b) in theta.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12, "{a} round-tripped to {b}");
        }
    }

    #[test]
    fn constrained_values_respect_block_supports(
        theta in prop::collection::vec(-15.0f64..15.0, 9),
    ) {
        let pipeline = mixed_pipeline();
        let mut x = vec![0.0; 9];
        pipeline.constrain(&theta, &mut x);
        prop_assert!(x[0] > 0.0 && x[1] > x[0] && x[2] > x[1], "ordered block: {:?}", &x[..3]);
        for &v in &x[3..5] {
            prop_assert!(v > 0.0 && v < 1.0, "logit output {v} outside (0, 1)");
        }
        for (i, &v) in x[5..7].iter().enumerate() {
            prop_assert!((v - theta[5 + i]).abs() == 0.0, "identity must copy");
        }
        for &v in &x[7..9] {
            prop_assert!(v > 0.0, "log output {v} not positive");
        }
    }

    /// Any unconstrained point a sampler can propose maps to an ordered,
    /// in-support constrained vector under the model layout.
    #[test]
    fn model_layout_keeps_frequencies_ordered(
        theta in prop::collection::vec(-5.0f64..5.0, 36),
    ) {
        let spec = HierarchySpec::new(
            2,
            PriorSpec::with_mode_centers(&[150.0, 190.0, 335.0]),
            PoolingMode::PartialPooling,
        );
        let model = build_hierarchical_model(flat_dataset(2), spec).unwrap();
        prop_assert_eq!(model.layout().dim(), 36);
        let x = model.layout().constrain(&theta);
        for slots in model.groups() {
            for set in &slots.omega {
                for pair in set.windows(2) {
                    prop_assert!(
                        x[pair[1]] > x[pair[0]],
                        "frequencies out of order: {} then {}",
                        x[pair[0]],
                        x[pair[1]],
                    );
                }
            }
            for set in &slots.zeta {
                for &i in set {
                    prop_assert!(x[i] > 0.0 && x[i] < 1.0);
                }
            }
            for &i in slots.sigma2_omega.iter().chain(&slots.sigma2_residue) {
                prop_assert!(x[i] > 0.0);
            }
            prop_assert!(x[slots.sigma2_h] > 0.0);
        }
    }
}

#[test]
fn layout_round_trip_preserves_the_initial_point() {
    let spec = HierarchySpec::new(
        3,
        PriorSpec::with_mode_centers(&[190.0, 335.0]),
        PoolingMode::PartialPooling,
    );
    let model = build_hierarchical_model(flat_dataset(3), spec).unwrap();
    let layout = model.layout();
    let theta = strata_hmc::LogDensityGradient::initial_point(&model);
    let x = layout.constrain(&theta);
    let back = layout.unconstrain(&x);
    for (a, b) in theta.iter().zip(&back) {
        assert!((a - b).abs() <= 1e-12);
    }
}
