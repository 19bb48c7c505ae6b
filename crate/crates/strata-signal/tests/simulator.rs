//! Simulator contracts: linearity, steady-state agreement with the analytic
//! FRF, the warm-up guard, and the noise-level calibration.

use strata_modal::{frf_complex, FrequencyGrid, ModalParameterSet, Mode};
use strata_signal::{simulate_mdof_response, TimeSeries};

fn blade_like() -> ModalParameterSet {
    ModalParameterSet::new(
        vec![Mode::new(190.0, 0.006, -0.004).unwrap(), Mode::new(335.0, 0.006, -0.004).unwrap()],
        0,
    )
    .unwrap()
}

#[test]
fn zero_excitation_zero_response() {
    let params = blade_like();
    let excitation = TimeSeries::new(vec![0.0; 4096], 256.0).unwrap();
    let response = simulate_mdof_response(&params, &excitation, 0.0, 1).unwrap();
    assert!(response.samples().iter().all(|&y| y == 0.0));
}

#[test]
fn doubling_excitation_doubles_response() {
    let params = blade_like();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let q: Vec<f64> = (0..4096).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let q2: Vec<f64> = q.iter().map(|x| 2.0 * x).collect();
    let y1 = simulate_mdof_response(&params, &TimeSeries::new(q, 256.0).unwrap(), 0.0, 1).unwrap();
    let y2 =
        simulate_mdof_response(&params, &TimeSeries::new(q2, 256.0).unwrap(), 0.0, 1).unwrap();
    for (a, b) in y1.samples().iter().zip(y2.samples()) {
        assert!((2.0 * a - b).abs() <= 1e-12 * b.abs().max(1e-300));
    }
}

#[test]
fn sine_steady_state_matches_analytic_magnitude() {
    let params = blade_like();
    // High sample rate: the simulator's aliasing floor (~Σ|A|ω_nat²·π²/3ω_s²)
    // must sit well below |H| at the drive frequency for a 1% comparison.
    let fs = 8192.0;
    let omega = 50.0; // rad/s, well below the first mode at 190
    let n = (8.0 * fs) as usize;
    let q: Vec<f64> = (0..n).map(|i| (omega * i as f64 / fs).sin()).collect();
    let response =
        simulate_mdof_response(&params, &TimeSeries::new(q, fs).unwrap(), 0.0, 1).unwrap();

    // discard the first half (transient), measure amplitude via RMS·√2
    let tail = &response.samples()[n / 2..];
    let rms = (tail.iter().map(|y| y * y).sum::<f64>() / tail.len() as f64).sqrt();
    let amplitude = rms * std::f64::consts::SQRT_2;

    let grid = FrequencyGrid::from_rad_per_sec(vec![omega]).unwrap();
    let want = frf_complex(&params, &grid).unwrap()[0].norm();
    assert!(
        (amplitude - want).abs() <= 0.01 * want,
        "steady-state amplitude ratio {amplitude} vs |H| {want}"
    );
}

#[test]
fn excitation_shorter_than_warmup_errors() {
    let params = blade_like();
    // slowest mode decays over ln(100)/(0.006·190) ≈ 4.04 s; 1 s is too short
    let excitation = TimeSeries::new(vec![1.0; 256], 256.0).unwrap();
    let err = simulate_mdof_response(&params, &excitation, 0.0, 1).unwrap_err();
    assert!(
        matches!(err, strata_signal::SignalError::ExcitationShorterThanWarmup { .. }),
        "got {err:?}"
    );
}

#[test]
fn noise_rms_is_fraction_of_clean_rms() {
    let params = blade_like();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let q: Vec<f64> = (0..65_536).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let excitation = TimeSeries::new(q, 256.0).unwrap();
    let clean = simulate_mdof_response(&params, &excitation, 0.0, 9).unwrap();
    let noisy = simulate_mdof_response(&params, &excitation, 0.05, 9).unwrap();
    let diff: Vec<f64> =
        noisy.samples().iter().zip(clean.samples()).map(|(n, c)| n - c).collect();
    let noise_rms = (diff.iter().map(|d| d * d).sum::<f64>() / diff.len() as f64).sqrt();
    let want = 0.05 * clean.rms();
    assert!(
        (noise_rms - want).abs() <= 0.03 * want,
        "noise RMS {noise_rms} vs requested {want}"
    );
}

#[test]
fn deterministic_under_seed() {
    let params = blade_like();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let q: Vec<f64> = (0..8192).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let excitation = TimeSeries::new(q, 256.0).unwrap();
    let a = simulate_mdof_response(&params, &excitation, 0.05, 77).unwrap();
    let b = simulate_mdof_response(&params, &excitation, 0.05, 77).unwrap();
    assert_eq!(a.samples(), b.samples());
    let c = simulate_mdof_response(&params, &excitation, 0.05, 78).unwrap();
    assert_ne!(a.samples(), c.samples());
}
