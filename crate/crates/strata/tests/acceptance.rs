//! Pinned acceptance suite. One test per criterion, each ending in a
//! single `acceptance <name>: PASS` line with the measured runtime, so a
//! full run reads as a checklist. Functional assertions come first; the
//! runtime budget is asserted last.
//!
//! The suite covers, in order: the closed-form forward model against an
//! independent complex-arithmetic oracle, log-posterior gradients against
//! central finite differences, sampler calibration on analytic targets,
//! H1 estimator fidelity, the two end-to-end synthetic study protocols
//! (multi-structure shrinkage, temperature extrapolation), extrapolation
//! arithmetic, the NMSE contract, and byte-level rerun determinism.

use std::f64::consts::TAU;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strata::config::{ModeTruth, RunConfig, TemperatureSim};
use strata::csv;
use strata::{diagnose, fit, predict, simulate};
use strata_analysis::{
    extrapolate_temperature, nmse, posterior_predictive_frf, summarize_parameter, BandComposition,
    ModalTrend, ScalarSummary,
};
use strata_hmc::{adapt_and_sample, LogDensityGradient, SamplerConfig, Trace};
use strata_modal::{
    eval_real_into, frf_imag, frf_real, FrequencyGrid, ModalParameterSet, Mode,
};
use strata_model::{
    build_hierarchical_model, build_temperature_model, DomainObservations, FrfDataset,
    HierarchySpec, ParameterLayout, PoolingMode, PriorSpec, TemperatureSpec,
};
use tempfile::TempDir;

fn report(name: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("acceptance {name}: PASS in {elapsed:.2}s (budget {budget_s:.0}s)");
    assert!(
        elapsed < budget_s,
        "{name} exceeded its runtime budget: {elapsed:.2}s >= {budget_s:.0}s"
    );
}

// ---------------------------------------------------------------- forward model

/// Independent oracle: per-mode complex division in the e^{-i omega t}
/// convention, summed in complex arithmetic.
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

#[test]
fn forward_model_matches_complex_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for point in 0..10_000 {
        let n_modes = rng.gen_range(1..=3);
        let mut freqs: Vec<f64> = (0..n_modes).map(|_| rng.gen_range(10.0..2000.0)).collect();
        freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for i in 1..n_modes {
            if freqs[i] <= freqs[i - 1] {
                freqs[i] = freqs[i - 1] * 1.01;
            }
        }
        let modes: Vec<Mode> = freqs
            .iter()
            .map(|&f| {
                Mode::new(f, rng.gen_range(0.001..0.5), rng.gen_range(-10.0..10.0)).unwrap()
            })
            .collect();
        let params = ModalParameterSet::new(modes, 0).unwrap();
        let omega = rng.gen_range(0.0..4000.0);
        let grid = FrequencyGrid::from_rad_per_sec(vec![omega]).unwrap();
        let re = frf_real(&params, &grid).unwrap()[0];
        let im = frf_imag(&params, &grid).unwrap()[0];
        let oracle = oracle_complex(&params.modes, omega);
        let scale = oracle.norm().max(1e-300);
        assert!(
            (re - oracle.re).abs() / scale <= 1e-12,
            "point {point}: real part off by {:.3e} relative at omega {omega}",
            (re - oracle.re).abs() / scale
        );
        assert!(
            (im - oracle.im).abs() / scale <= 1e-12,
            "point {point}: imaginary part off by {:.3e} relative at omega {omega}",
            (im - oracle.im).abs() / scale
        );
    }
    report("forward model vs complex oracle (10^4 points)", started, 1.0);
}

// ------------------------------------------------------------------- gradients

/// Central finite differences over every coordinate, at the model's
/// initial point and at jittered copies of it, compared on the full
/// gradient vector relative to its norm.
fn check_gradients<M: LogDensityGradient>(model: &M, n_points: usize, seed: u64) {
    let dim = model.dim();
    let init = model.initial_point();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grad = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    for point in 0..n_points {
        let theta: Vec<f64> = if point == 0 {
            init.clone()
        } else {
            init.iter()
                .map(|&t| t * (1.0 + rng.gen_range(-0.02..0.02)) + rng.gen_range(-1e-4..1e-4))
                .collect()
        };
        let logp = model.log_density_gradient(&theta, &mut grad);
        assert!(logp.is_finite(), "point {point} fell off support");

        let mut probe = theta.clone();
        let mut err_sq = 0.0;
        let mut norm_sq = 0.0;
        for i in 0..dim {
            let h = 3e-6 * theta[i].abs().max(1.0);
            let up = theta[i] + h;
            let dn = theta[i] - h;
            probe[i] = up;
            let hi = model.log_density_gradient(&probe, &mut scratch);
            probe[i] = dn;
            let lo = model.log_density_gradient(&probe, &mut scratch);
            probe[i] = theta[i];
            let fd = (hi - lo) / (up - dn);
            err_sq += (fd - grad[i]) * (fd - grad[i]);
            norm_sq += grad[i] * grad[i];
        }
        let rel = err_sq.sqrt() / norm_sq.sqrt().max(1.0);
        assert!(rel <= 1e-5, "point {point}: gradient mismatch, relative norm error {rel:.3e}");
    }
}

/// Four domains, two sharp modes each, with domain-to-domain scatter and
/// deterministic pseudo-noise.
fn two_mode_dataset() -> FrfDataset {
    let hz: Vec<f64> = (0..30).map(|i| 24.0 + 37.0 * i as f64 / 29.0).collect();
    let grid = FrequencyGrid::from_hz(hz).unwrap();
    let rad = grid.clone().in_rad_per_sec();
    let domains = (0..4)
        .map(|k| {
            let kf = k as f64;
            let modes = [
                Mode {
                    natural_frequency: 188.0 + 1.5 * kf,
                    damping_ratio: 0.0055 + 0.0004 * kf,
                    residue: -0.0042,
                },
                Mode {
                    natural_frequency: 333.0 + 1.0 * kf,
                    damping_ratio: 0.0063 - 0.0003 * kf,
                    residue: -0.0038,
                },
            ];
            let mut real = vec![0.0; grid.len()];
            eval_real_into(&modes, rad.values(), &mut real);
            for (i, v) in real.iter_mut().enumerate() {
                *v += 0.8 * (0.7 * i as f64 + 1.3 * kf).sin();
            }
            DomainObservations::new(grid.clone(), real, None).unwrap()
        })
        .collect();
    FrfDataset::new(domains).unwrap()
}

/// Single-mode data generated from the temperature model's own initial
/// parameters plus pseudo-noise, so every probe point stays on support.
fn temperature_dataset(spec: &TemperatureSpec) -> FrfDataset {
    let hz: Vec<f64> = (0..30).map(|i| 135.0 + 20.0 * i as f64 / 29.0).collect();
    let grid = FrequencyGrid::from_hz(hz).unwrap();
    let rad = grid.clone().in_rad_per_sec();
    let placeholder: Vec<DomainObservations> = spec
        .temperatures_c
        .iter()
        .map(|&t| DomainObservations::new(grid.clone(), vec![0.0; grid.len()], Some(t)).unwrap())
        .collect();
    let provisional =
        build_temperature_model(FrfDataset::new(placeholder).unwrap(), spec.clone()).unwrap();
    let x = provisional.layout().constrain(&provisional.initial_point());
    let domains = spec
        .temperatures_c
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let (omega_k, zeta_k) = provisional.modal_parameters_at(&x, t);
            let modes = [Mode {
                natural_frequency: omega_k,
                damping_ratio: zeta_k,
                residue: provisional.residue(&x),
            }];
            let mut real = vec![0.0; grid.len()];
            eval_real_into(&modes, rad.values(), &mut real);
            for (i, v) in real.iter_mut().enumerate() {
                *v += 0.01 * (0.9 * i as f64 + 2.0 * k as f64).sin();
            }
            DomainObservations::new(grid.clone(), real, Some(t)).unwrap()
        })
        .collect();
    FrfDataset::new(domains).unwrap()
}

#[test]
fn log_posterior_gradients_match_finite_differences() {
    let started = Instant::now();

    let hier = build_hierarchical_model(
        two_mode_dataset(),
        HierarchySpec::new(4, PriorSpec::with_mode_centers(&[190.0, 335.0]), PoolingMode::PartialPooling),
    )
    .unwrap();
    assert_eq!(hier.dim(), 33);
    check_gradients(&hier, 50, 211);

    let mut spec = TemperatureSpec::new(vec![-10.0, -5.0, 10.0, 25.0]);
    spec.sample_residue_hyperpriors = false;
    let temp = build_temperature_model(temperature_dataset(&spec), spec).unwrap();
    assert_eq!(temp.dim(), 7);
    check_gradients(&temp, 50, 212);

    report("gradients vs finite differences (33-dim and 7-dim, 50 points each)", started, 10.0);
}

// ------------------------------------------------------------ sampler calibration

struct CorrelatedGaussian {
    rho: f64,
}

impl LogDensityGradient for CorrelatedGaussian {
    fn dim(&self) -> usize {
        2
    }

    fn log_density_gradient(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let d = 1.0 - self.rho * self.rho;
        let (x, y) = (theta[0], theta[1]);
        grad[0] = -(x - self.rho * y) / d;
        grad[1] = -(y - self.rho * x) / d;
        -0.5 * (x * x - 2.0 * self.rho * x * y + y * y) / d
    }
}

/// One global mean, four group effects, one observation per group. The
/// joint posterior over (mu, theta_1..4) is Gaussian; its exact moments
/// come from the precision matrix assembled in `reference_moments`.
struct ConjugateHierarchy {
    y: [f64; 4],
    tau0_sq: f64,
    tau_sq: f64,
    sigma_sq: f64,
}

impl LogDensityGradient for ConjugateHierarchy {
    fn dim(&self) -> usize {
        5
    }

    fn log_density_gradient(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let mu = theta[0];
        let mut lp = -0.5 * mu * mu / self.tau0_sq;
        grad[0] = -mu / self.tau0_sq;
        for j in 0..4 {
            let th = theta[1 + j];
            let dev = th - mu;
            let res = self.y[j] - th;
            lp += -0.5 * dev * dev / self.tau_sq - 0.5 * res * res / self.sigma_sq;
            grad[0] += dev / self.tau_sq;
            grad[1 + j] = -dev / self.tau_sq + res / self.sigma_sq;
        }
        lp
    }
}

impl ConjugateHierarchy {
    /// Posterior mean vector and covariance diagonal via Gauss-Jordan
    /// inversion of the 5x5 precision matrix.
    fn reference_moments(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lambda = [[0.0f64; 5]; 5];
        let mut b = [0.0f64; 5];
        lambda[0][0] = 1.0 / self.tau0_sq + 4.0 / self.tau_sq;
        for j in 1..5 {
            lambda[0][j] = -1.0 / self.tau_sq;
            lambda[j][0] = -1.0 / self.tau_sq;
            lambda[j][j] = 1.0 / self.tau_sq + 1.0 / self.sigma_sq;
            b[j] = self.y[j - 1] / self.sigma_sq;
        }
        // augmented [lambda | I] elimination with partial pivoting
        let mut aug = [[0.0f64; 10]; 5];
        for i in 0..5 {
            aug[i][..5].copy_from_slice(&lambda[i]);
            aug[i][5 + i] = 1.0;
        }
        for col in 0..5 {
            let pivot = (col..5).max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap()).unwrap();
            aug.swap(col, pivot);
            let p = aug[col][col];
            for v in aug[col].iter_mut() {
                *v /= p;
            }
            for row in 0..5 {
                if row != col {
                    let f = aug[row][col];
                    for j in 0..10 {
                        aug[row][j] -= f * aug[col][j];
                    }
                }
            }
        }
        let mut mean = vec![0.0; 5];
        let mut var = vec![0.0; 5];
        for i in 0..5 {
            var[i] = aug[i][5 + i];
            for j in 0..5 {
                mean[i] += aug[i][5 + j] * b[j];
            }
        }
        (mean, var)
    }
}

/// Means within 3 MCSE, variances within 5%, R-hat under 1.01, and
/// per-chain mean acceptance inside [target - 0.04, 1].
fn check_calibration<M: LogDensityGradient>(
    label: &str,
    model: &M,
    truth_mean: &[f64],
    truth_var: &[f64],
    seed: u64,
) {
    let config = SamplerConfig {
        chains: 4,
        warmup_draws: 1000,
        sampling_draws: 10_000,
        target_accept: 0.9,
        seed,
        ..SamplerConfig::default()
    };
    let trace = adapt_and_sample(model, &config).unwrap();
    for coord in 0..model.dim() {
        let s = summarize_parameter(&trace.parameter_by_chain(coord)).unwrap();
        let err = (s.mean - truth_mean[coord]).abs();
        assert!(
            err <= 3.0 * s.mcse,
            "{label} coordinate {coord}: mean error {err:.4e} exceeds 3 MCSE {:.4e}",
            3.0 * s.mcse
        );
        let var = s.sd * s.sd;
        assert!(
            (var - truth_var[coord]).abs() <= 0.05 * truth_var[coord],
            "{label} coordinate {coord}: variance {var:.4} vs {:.4}",
            truth_var[coord]
        );
        assert!(s.rhat < 1.01, "{label} coordinate {coord}: R-hat {:.4}", s.rhat);
    }
    for (c, chain) in trace.chains().iter().enumerate() {
        let a = chain.mean_accept_stat();
        assert!(
            a >= config.target_accept - 0.04 && a <= 1.0,
            "{label} chain {c}: mean acceptance {a:.3} outside [{:.2}, 1]",
            config.target_accept - 0.04
        );
    }
}

#[test]
fn sampler_recovers_analytic_targets() {
    let started = Instant::now();

    let gauss = CorrelatedGaussian { rho: 0.9 };
    check_calibration("correlated Gaussian", &gauss, &[0.0, 0.0], &[1.0, 1.0], 301);

    let hier = ConjugateHierarchy {
        y: [0.3, -0.6, 1.1, 0.4],
        tau0_sq: 4.0,
        tau_sq: 1.0,
        sigma_sq: 0.25,
    };
    let (mean, var) = hier.reference_moments();
    check_calibration("conjugate hierarchy", &hier, &mean, &var, 302);

    report("sampler calibration on analytic targets (4 chains x 10^4 draws)", started, 120.0);
}

// ------------------------------------------------------------------ H1 estimator

#[test]
fn h1_estimator_tracks_the_analytic_frf() {
    use strata_modal::frf_complex;
    use strata_signal::{h1_estimate, simulate_mdof_response, TimeSeries, WindowKind};

    let started = Instant::now();
    let params = ModalParameterSet::new(
        vec![Mode::new(190.0, 0.02, -1.0).unwrap(), Mode::new(335.0, 0.02, -0.7).unwrap()],
        0,
    )
    .unwrap();
    let fs = 256.0;
    let blocks = 20;
    let block_len = 32_768;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let force = TimeSeries::new(
        (0..block_len * blocks).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        fs,
    )
    .unwrap();
    let response = simulate_mdof_response(&params, &force, 0.0, 0).unwrap();
    let (grid_hz, h1) = h1_estimate(&force, &response, blocks, WindowKind::Hann).unwrap();
    let analytic = frf_complex(&params, &grid_hz.in_rad_per_sec()).unwrap();

    let band: Vec<usize> = grid_hz
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &f)| (24.0..=61.0).contains(&f))
        .map(|(k, _)| k)
        .collect();
    assert!(!band.is_empty());
    let peak = band.iter().map(|&k| analytic[k].norm()).fold(0.0f64, f64::max);
    let worst = band.iter().map(|&k| (h1[k] - analytic[k]).norm()).fold(0.0f64, f64::max) / peak;
    assert!(worst <= 0.02, "H1 error {:.3}% of peak exceeds 2%", 100.0 * worst);

    report("H1 estimator within 2% of the analytic FRF", started, 30.0);
}

// --------------------------------------------- multi-structure shrinkage protocol

/// Data seeds for the shrinkage panel. The first is the canonical run for
/// the accuracy and coverage checks. At the reduced draw budget a panel
/// seed occasionally hits a stuck chain, which the 4-of-5 rule absorbs.
const PANEL_SEEDS: [u64; 5] = [40, 42, 43, 45, 46];

const DATA_POOR: [usize; 2] = [2, 3];

fn constrained_chains(trace: &Trace, layout: &ParameterLayout) -> Vec<Vec<Vec<f64>>> {
    trace
        .chains()
        .iter()
        .map(|c| (0..c.n_draws()).map(|i| layout.constrain(c.draw(i))).collect())
        .collect()
}

fn coord_summary(chains: &[Vec<Vec<f64>>], coord: usize) -> ScalarSummary {
    let per_chain: Vec<Vec<f64>> =
        chains.iter().map(|c| c.iter().map(|d| d[coord]).collect()).collect();
    summarize_parameter(&per_chain).unwrap()
}

fn read_domains(dir: &Path, n: usize) -> Vec<DomainObservations> {
    (0..n)
        .map(|k| {
            let t = csv::read_frf_csv(&dir.join(format!("train_{k}.csv"))).unwrap();
            DomainObservations::new(FrequencyGrid::from_hz(t.freq_hz).unwrap(), t.real, None)
                .unwrap()
        })
        .collect()
}

#[test]
fn multi_structure_fit_shrinks_data_poor_domains() {
    let started = Instant::now();
    let prior = PriorSpec::with_mode_centers(&[TAU * 30.2, TAU * 53.3]);
    let mut shrinkage_passes = 0;
    let mut outcomes = Vec::new();

    for (panel_idx, &seed) in PANEL_SEEDS.iter().enumerate() {
        let dir = TempDir::new().unwrap();
        let mut cfg = RunConfig::default();
        cfg.seed = seed;
        cfg.out_dir = dir.path().to_path_buf();
        simulate::run(&cfg).unwrap();

        let domains = read_domains(dir.path(), 4);
        let model = build_hierarchical_model(
            FrfDataset::new(domains.clone()).unwrap(),
            HierarchySpec::new(4, prior.clone(), PoolingMode::PartialPooling),
        )
        .unwrap();
        let sampler = SamplerConfig {
            chains: 4,
            warmup_draws: 1000,
            sampling_draws: 2000,
            target_accept: 0.99,
            seed,
            ..SamplerConfig::default()
        };
        let trace = adapt_and_sample(&model, &sampler).unwrap();
        let chains = constrained_chains(&trace, model.layout());

        // Independent single-domain reference fits for the data-poor
        // domains: identical posterior marginals to a joint unpooled fit,
        // at a fraction of the dimension.
        let mut seed_shrinks = true;
        for &k in &DATA_POOR {
            let np_model = build_hierarchical_model(
                FrfDataset::new(vec![domains[k].clone()]).unwrap(),
                HierarchySpec::new(1, prior.clone(), PoolingMode::NoPooling),
            )
            .unwrap();
            let np_sampler = SamplerConfig {
                chains: 2,
                warmup_draws: 1000,
                sampling_draws: 2000,
                target_accept: 0.99,
                seed,
                ..SamplerConfig::default()
            };
            let np_trace = adapt_and_sample(&np_model, &np_sampler).unwrap();
            let np_chains = constrained_chains(&np_trace, np_model.layout());
            for m in 0..2 {
                let pp_idx =
                    model.layout().index_of(&format!("omega_nat.{}.{}", k + 1, m + 1)).unwrap();
                let np_idx =
                    np_model.layout().index_of(&format!("omega_nat.{}", m + 1)).unwrap();
                let sd_pp = coord_summary(&chains, pp_idx).sd;
                let sd_np = coord_summary(&np_chains, np_idx).sd;
                if sd_pp > sd_np {
                    seed_shrinks = false;
                }
            }
        }
        if seed_shrinks {
            shrinkage_passes += 1;
        }
        outcomes.push(format!("seed {seed}: {}", if seed_shrinks { "shrinks" } else { "no" }));

        // Accuracy and coverage on the canonical seed only.
        if panel_idx == 0 {
            let truth: serde_json::Value = serde_json::from_str(
                &std::fs::read_to_string(dir.path().join("ground_truth.json")).unwrap(),
            )
            .unwrap();
            for &k in &DATA_POOR {
                for m in 0..2 {
                    let idx = model
                        .layout()
                        .index_of(&format!("omega_nat.{}.{}", k + 1, m + 1))
                        .unwrap();
                    let mean_hz = coord_summary(&chains, idx).mean / TAU;
                    let truth_hz =
                        truth["domains"][k]["modes"][m]["freq_hz"].as_f64().unwrap();
                    let rel = (mean_hz - truth_hz).abs() / truth_hz;
                    assert!(
                        rel <= 0.01,
                        "domain {k} mode {m}: posterior mean {mean_hz:.3} Hz is {:.2}% from truth {truth_hz:.3} Hz",
                        100.0 * rel
                    );
                }
            }

            let pooled: Vec<Vec<f64>> = chains.iter().flatten().cloned().collect();
            let mut covered = 0usize;
            let mut total = 0usize;
            for k in 0..4 {
                let t = csv::read_frf_csv(&dir.path().join(format!("truth_{k}.csv"))).unwrap();
                let grid = FrequencyGrid::from_hz(t.freq_hz).unwrap();
                let band = posterior_predictive_frf(
                    &model,
                    &pooled,
                    &grid,
                    k,
                    BandComposition::StdPlusNoiseSd,
                )
                .unwrap();
                for (i, &y) in t.real.iter().enumerate() {
                    total += 1;
                    if y >= band.lower[i] && y <= band.upper[i] {
                        covered += 1;
                    }
                }
            }
            let coverage = covered as f64 / total as f64;
            assert!(
                coverage >= 0.99,
                "3-sigma band covers only {:.2}% of the noise-free truth",
                100.0 * coverage
            );
        }
    }

    assert!(
        shrinkage_passes >= 4,
        "partial pooling narrowed the data-poor posteriors on only {shrinkage_passes}/5 seeds: {}",
        outcomes.join(", ")
    );
    report(
        "multi-structure protocol: shrinkage 4+/5 seeds, data-poor means within 1%, 99% band coverage",
        started,
        900.0,
    );
}

// ------------------------------------------------- temperature extrapolation protocol

#[test]
fn temperature_fit_extrapolates_across_the_sweep() {
    let started = Instant::now();
    let dir = TempDir::new().unwrap();
    let mut cfg = RunConfig::default();
    cfg.seed = 21;
    cfg.out_dir = dir.path().to_path_buf();
    cfg.simulate.modes =
        vec![ModeTruth { freq_hz: 145.1, damping: 0.0099, residue: -0.0042 }];
    cfg.simulate.band_hz = [135.0, 155.0];
    cfg.simulate.training_points = vec![100, 100, 100, 100];
    cfg.simulate.temperature = Some(TemperatureSim::default());
    cfg.fit.temperature_model = true;
    cfg.sampler.chains = 4;
    cfg.sampler.draws = 5000;
    cfg.sampler.warmup = 2500;

    simulate::run(&cfg).unwrap();
    fit::run(&cfg).unwrap();
    predict::run(&cfg).unwrap();

    let table = std::fs::read_to_string(dir.path().join("nmse.csv")).unwrap();
    let mut rows = table.lines();
    assert_eq!(rows.next().unwrap(), "temperature_c,nmse_percent,points");
    let train = &cfg.simulate.temperature.as_ref().unwrap().train_temperatures_c;
    let mut seen = 0;
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        let t: f64 = cols[0].parse().unwrap();
        let score: f64 = cols[1].parse().unwrap();
        let points: usize = cols[2].parse().unwrap();
        let trained = train.iter().any(|&tt| (tt - t).abs() < 1e-9);
        assert_eq!(points, if trained { 100 } else { 200 }, "scored points at {t} C");
        assert!(score < 5.0, "NMSE {score:.3}% at {t} C breaches the 5% bar");
        seen += 1;
    }
    assert_eq!(seen, 11, "expected one NMSE row per sweep temperature");

    report("temperature protocol: NMSE under 5% at all 11 sweep temperatures", started, 600.0);
}

// ----------------------------------------------------------- extrapolation arithmetic

#[test]
fn extrapolation_arithmetic_is_exact() {
    let started = Instant::now();
    let trend = ModalTrend {
        freq_mean: 145.1,
        freq_slope: -0.5319,
        freq_curvature: 0.0066,
        damping_mean: 0.0099,
        damping_slope: -8.278e-5,
    };
    let predictions = extrapolate_temperature(&[trend], &[10.0, 25.0]).unwrap();
    assert!((predictions[0].frequency - 140.441).abs() <= 1e-9);
    assert!((predictions[1].damping - 0.0078305).abs() <= 1e-9);
    // single trend: no spread
    assert_eq!(predictions[0].frequency_sd, 0.0);
    assert_eq!(predictions[1].damping_sd, 0.0);

    report("extrapolation arithmetic (140.441 Hz at 10 C, 0.0078305 at 25 C)", started, 5.0);
}

// ----------------------------------------------------------------- NMSE contract

#[test]
fn nmse_contract_holds() {
    let started = Instant::now();
    let y: Vec<f64> = (0..100).map(|i| (0.3 * i as f64).sin() * 2.5 + 0.4).collect();

    assert_eq!(nmse(&y, &y).unwrap(), 0.0);

    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mean_pred = vec![mean; y.len()];
    assert!((nmse(&y, &mean_pred).unwrap() - 100.0).abs() < 1e-12);

    let pred: Vec<f64> = y.iter().map(|v| v + 0.1 * (v * 3.0).cos()).collect();
    let y2: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
    let pred2: Vec<f64> = pred.iter().map(|v| 2.0 * v).collect();
    assert_eq!(nmse(&y, &pred).unwrap().to_bits(), nmse(&y2, &pred2).unwrap().to_bits());

    assert_eq!(nmse(&[0.0, 2.0], &[1.0, 3.0]).unwrap(), 100.0);

    report("NMSE contract (identity, mean predictor, scaling, hand example)", started, 5.0);
}

// ------------------------------------------------------------------ determinism

fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries
}

#[test]
fn pipeline_reruns_are_byte_identical() {
    let started = Instant::now();

    // population pipeline: simulate, fit, diagnose
    let population = |out: &Path| {
        let mut cfg = RunConfig::default();
        cfg.seed = 7;
        cfg.out_dir = out.to_path_buf();
        cfg.simulate.n_domains = 2;
        cfg.simulate.grid_points = 60;
        cfg.simulate.training_points = vec![40, 10];
        cfg.sampler.chains = 2;
        cfg.sampler.draws = 300;
        cfg.sampler.warmup = 300;
        cfg.sampler.target_accept = 0.9;
        cfg.fit.kde_grid_points = 64;
        cfg.fit.band_grid_points = 50;
        simulate::run(&cfg).unwrap();
        fit::run(&cfg).unwrap();
        diagnose::run(&cfg).unwrap();
    };
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    population(a.path());
    population(b.path());
    let (ta, tb) = (tree_bytes(a.path()), tree_bytes(b.path()));
    assert!(ta.len() > 10, "population pipeline produced too few files");
    assert_eq!(ta, tb, "population pipeline reruns differ");

    // temperature pipeline: simulate, fit, predict
    let temperature = |out: &Path| {
        let mut cfg = RunConfig::default();
        cfg.seed = 9;
        cfg.out_dir = out.to_path_buf();
        cfg.simulate.modes =
            vec![ModeTruth { freq_hz: 145.1, damping: 0.0099, residue: -0.0042 }];
        cfg.simulate.band_hz = [135.0, 155.0];
        cfg.simulate.grid_points = 40;
        cfg.simulate.training_points = vec![30, 30, 30, 30];
        cfg.simulate.temperature = Some(TemperatureSim::default());
        cfg.fit.temperature_model = true;
        cfg.fit.write_kde = false;
        cfg.fit.write_bands = false;
        cfg.sampler.chains = 2;
        cfg.sampler.draws = 300;
        cfg.sampler.warmup = 300;
        cfg.sampler.target_accept = 0.9;
        simulate::run(&cfg).unwrap();
        // a reduced-draw fit may trip the convergence gate; the artifacts
        // are written either way, which is all determinism needs
        let _ = fit::run(&cfg);
        predict::run(&cfg).unwrap();
    };
    let (c, d) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    temperature(c.path());
    temperature(d.path());
    let (tc, td) = (tree_bytes(c.path()), tree_bytes(d.path()));
    assert!(tc.len() > 10, "temperature pipeline produced too few files");
    assert_eq!(tc, td, "temperature pipeline reruns differ");

    report("byte-identical reruns of both pipelines", started, 300.0);
}
