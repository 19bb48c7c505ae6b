//! Dual-route checks: the real-arithmetic implementation against a direct
//! complex-division oracle, and analytic gradients against central finite
//! differences.

use num_complex::Complex64;
use proptest::prelude::*;
use strata_modal::{
    frf_complex, frf_imag, frf_real, frf_real_gradient, FrequencyGrid, ModalParameterSet, Mode,
};

/// Independent oracle: per-mode complex division in the e^{−iωt} convention,
/// H = −ω² Σ A / (ω_nat² − ω² − 2iζωω_nat), summed in complex arithmetic.
fn oracle_complex(modes: &[Mode], omega: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for m in modes {
        let den = Complex64::new(
            m.natural_frequency * m.natural_frequency - omega * omega,
            -2.0 * m.damping_ratio * omega * m.natural_frequency,
        );
        acc += Complex64::new(m.residue, 0.0) / den;
    }
    Complex64::new(-omega * omega, 0.0) * acc
}

fn mode_strategy() -> impl Strategy<Value = (f64, f64, f64)> {
    (10.0f64..2000.0, 0.001f64..0.5, -10.0f64..10.0)
}

fn params_from(raw: Vec<(f64, f64, f64)>) -> ModalParameterSet {
    let mut raw = raw;
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // collapse duplicate frequencies so the ordering invariant holds
    let mut modes: Vec<Mode> = Vec::new();
    for (wn, zeta, a) in raw {
        let wn = match modes.last() {
            Some(prev) if wn <= prev.natural_frequency => prev.natural_frequency * 1.01,
            _ => wn,
        };
        modes.push(Mode::new(wn, zeta, a).unwrap());
    }
    ModalParameterSet::new(modes, 0).unwrap()
}

proptest! {
    #[test]
    fn real_imag_match_complex_oracle(
        raw in prop::collection::vec(mode_strategy(), 1..4),
        omegas in prop::collection::vec(0.0f64..4000.0, 1..20),
    ) {
        let params = params_from(raw);
        let mut omegas = omegas;
        omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        omegas.dedup();
        let grid = FrequencyGrid::from_rad_per_sec(omegas).unwrap();

        let re = frf_real(&params, &grid).unwrap();
        let im = frf_imag(&params, &grid).unwrap();
        let cx = frf_complex(&params, &grid).unwrap();

        for i in 0..grid.len() {
            let oracle = oracle_complex(&params.modes, grid.values()[i]);
            let scale = oracle.norm().max(1e-300);
            prop_assert!((cx[i].re - oracle.re).abs() / scale < 1e-12,
                "complex re mismatch at ω={}", grid.values()[i]);
            prop_assert!((cx[i].im - oracle.im).abs() / scale < 1e-12,
                "complex im mismatch at ω={}", grid.values()[i]);
            prop_assert!((re[i] - oracle.re).abs() / scale < 1e-12,
                "real-part mismatch at ω={}", grid.values()[i]);
            prop_assert!((im[i] - oracle.im).abs() / scale < 1e-12,
                "imag-part mismatch at ω={}", grid.values()[i]);
        }
    }

    #[test]
    fn pointwise_consistency(
        raw in prop::collection::vec(mode_strategy(), 1..4),
        omega in 0.0f64..4000.0,
    ) {
        let params = params_from(raw);
        let grid = FrequencyGrid::from_rad_per_sec(vec![omega]).unwrap();
        let re = frf_real(&params, &grid).unwrap()[0];
        let im = frf_imag(&params, &grid).unwrap()[0];
        let cx = frf_complex(&params, &grid).unwrap()[0];
        let scale = cx.norm().max(1e-300);
        prop_assert!((re - cx.re).abs() / scale < 1e-12);
        prop_assert!((im - cx.im).abs() / scale < 1e-12);
    }

    #[test]
    fn mode_additivity(
        m1 in mode_strategy(),
        m2 in mode_strategy(),
        omega in 0.0f64..4000.0,
    ) {
        let (lo, hi) = if m1.0 < m2.0 { (m1, m2) } else { (m2, m1) };
        let hi = if hi.0 <= lo.0 { (lo.0 * 1.5, hi.1, hi.2) } else { hi };
        let a = ModalParameterSet::new(vec![Mode::new(lo.0, lo.1, lo.2).unwrap()], 0).unwrap();
        let b = ModalParameterSet::new(vec![Mode::new(hi.0, hi.1, hi.2).unwrap()], 0).unwrap();
        let both = ModalParameterSet::new(
            vec![Mode::new(lo.0, lo.1, lo.2).unwrap(), Mode::new(hi.0, hi.1, hi.2).unwrap()],
            0,
        )
        .unwrap();
        let grid = FrequencyGrid::from_rad_per_sec(vec![omega]).unwrap();
        let sum = frf_complex(&a, &grid).unwrap()[0] + frf_complex(&b, &grid).unwrap()[0];
        let joint = frf_complex(&both, &grid).unwrap()[0];
        // Eq. is a plain sum over modes; only summation order differs.
        let scale = joint.norm().max(1e-300);
        prop_assert!((sum - joint).norm() / scale < 1e-15);
    }

    #[test]
    fn residue_scaling_linearity(
        raw in prop::collection::vec(mode_strategy(), 1..4),
        omega in 0.0f64..4000.0,
        c in -5.0f64..5.0,
    ) {
        let params = params_from(raw);
        let mut scaled = params.clone();
        for mode in &mut scaled.modes {
            mode.residue *= c;
        }
        let grid = FrequencyGrid::from_rad_per_sec(vec![omega]).unwrap();
        let base = frf_complex(&params, &grid).unwrap()[0];
        let got = frf_complex(&scaled, &grid).unwrap()[0];
        let want = Complex64::new(c, 0.0) * base;
        let scale = want.norm().max(1e-12);
        prop_assert!((got - want).norm() / scale < 1e-12);
    }

    #[test]
    fn real_part_changes_sign_at_resonance(
        wn in 50.0f64..1000.0,
        zeta in 0.001f64..0.3,
        a in -10.0f64..-0.01,
    ) {
        let params = ModalParameterSet::new(vec![Mode::new(wn, zeta, a).unwrap()], 0).unwrap();
        let eps = wn * 1e-4;
        let grid = FrequencyGrid::from_rad_per_sec(vec![wn - eps, wn, wn + eps]).unwrap();
        let re = frf_real(&params, &grid).unwrap();
        // A < 0: real part −ω²Au/D is positive below resonance (u>0), zero at
        // it, negative above.
        prop_assert!(re[0] > 0.0);
        prop_assert!(re[1].abs() < 1e-9 * re[0].abs().max(re[2].abs()));
        prop_assert!(re[2] < 0.0);
    }
}

#[test]
fn analytic_gradient_matches_central_differences() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.gen_range(1..=3);
        let mut wns: Vec<f64> = (0..m).map(|_| rng.gen_range(20.0..1500.0)).collect();
        wns.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for i in 1..wns.len() {
            if wns[i] <= wns[i - 1] {
                wns[i] = wns[i - 1] * 1.05;
            }
        }
        let modes: Vec<Mode> = wns
            .iter()
            .map(|&wn| {
                Mode::new(wn, rng.gen_range(0.002..0.3), rng.gen_range(-5.0..5.0)).unwrap()
            })
            .collect();
        let params = ModalParameterSet::new(modes, 0).unwrap();
        let omega = rng.gen_range(1.0..2000.0);
        let grid = FrequencyGrid::from_rad_per_sec(vec![omega]).unwrap();
        let jac = frf_real_gradient(&params, &grid).unwrap();

        for mi in 0..m {
            for field in 0..3 {
                let scale = match field {
                    0 => params.modes[mi].natural_frequency,
                    1 => params.modes[mi].damping_ratio,
                    _ => params.modes[mi].residue.abs().max(1.0),
                };
                let h = 1e-6 * scale;
                let mut plus = params.clone();
                let mut minus = params.clone();
                match field {
                    0 => {
                        plus.modes[mi].natural_frequency += h;
                        minus.modes[mi].natural_frequency -= h;
                    }
                    1 => {
                        plus.modes[mi].damping_ratio += h;
                        minus.modes[mi].damping_ratio -= h;
                    }
                    _ => {
                        plus.modes[mi].residue += h;
                        minus.modes[mi].residue -= h;
                    }
                }
                let mut fp = [0.0];
                let mut fm = [0.0];
                strata_modal::eval_real_into(&plus.modes, grid.values(), &mut fp);
                strata_modal::eval_real_into(&minus.modes, grid.values(), &mut fm);
                let fd = (fp[0] - fm[0]) / (2.0 * h);
                let got = jac.row(0)[3 * mi + field];
                // The difference fp − fm cancels to ~eps·|f| before division
                // by 2h; below that floor the FD oracle carries no signal.
                let fd_noise = 16.0 * f64::EPSILON * fp[0].abs().max(fm[0].abs()) / (2.0 * h);
                let err = (got - fd).abs();
                let tol = 1e-5 * fd.abs().max(got.abs()).max(1e-8) + fd_noise;
                worst = worst.max(err / tol.max(1e-300));
                assert!(
                    err <= tol,
                    "mode {mi} field {field}: analytic {got} vs central difference {fd} \
                     (err {err:.2e}, tol {tol:.2e}) at ω={omega} params={:?}",
                    params.modes
                );
            }
        }
    }
    println!("worst gradient error vs central differences: {worst:.3e} of tolerance");
}

#[test]
fn frozen_two_mode_value_from_extended_precision() {
    // ω_nat = {190, 335} rad/s, ζ = 0.006, A = −0.004 at ω = 250 rad/s,
    // evaluated independently at 60 decimal digits.
    let params = ModalParameterSet::new(
        vec![Mode::new(190.0, 0.006, -0.004).unwrap(), Mode::new(335.0, 0.006, -0.004).unwrap()],
        0,
    )
    .unwrap();
    let grid = FrequencyGrid::from_rad_per_sec(vec![250.0]).unwrap();
    let h = frf_complex(&params, &grid).unwrap()[0];
    assert!((h.re - (-4.439685388805369e-3)).abs() < 1e-17);
    assert!((h.im - 3.0593729449953507e-4).abs() < 1e-18);
}
