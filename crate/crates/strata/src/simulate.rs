//! `simulate`: synthetic ground truth plus degraded training sets.
//!
//! Population mode writes, per domain k, a noise-free `truth_<k>.csv` on
//! the full grid and a decimated, noise-corrupted `train_<k>.csv`, with
//! the exact generating parameters in `ground_truth.json`. Temperature
//! mode instead derives one domain per training temperature from a
//! quadratic-frequency / linear-damping law and adds noise-free, fully
//! sampled `test_<i>.csv` files at the held-out temperatures.
//!
//! Noise is added to the full curve (so its scale is set by the true peak
//! magnitude) before decimation. With a zero noise fraction and a keep
//! count equal to the grid size, `train_<k>.csv` is byte-identical to
//! `truth_<k>.csv`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use strata_modal::{eval_real_into, FrequencyGrid, Mode, ModalParameterSet};
use strata_signal::{add_training_noise, decimate_spectral_lines};

use crate::config::{ModeTruth, RunConfig, SimulateConfig, TemperatureSim};
use crate::csv::{write_frf_csv, write_json};
use crate::error::{data_err, CliError};

#[derive(Debug, Serialize)]
struct DomainTruth {
    index: usize,
    truth_file: String,
    train_file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    temperature_c: Option<f64>,
    training_points: usize,
    noise_sd: f64,
    modes: Vec<ModeTruth>,
}

#[derive(Debug, Serialize)]
struct GroundTruth {
    seed: u64,
    band_hz: [f64; 2],
    grid_points: usize,
    noise_fraction: f64,
    domains: Vec<DomainTruth>,
    #[serde(skip_serializing_if = "Option::is_none")]
    temperature_law: Option<TemperatureSim>,
    test_files: Vec<String>,
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| data_err(cfg.out_dir.display(), e))?;
    let sim = &cfg.simulate;
    let grid = uniform_grid(sim)?;

    let domains = match &sim.temperature {
        None => jittered_population(sim, cfg.seed)?,
        Some(law) => temperature_population(sim, law)?,
    };

    let mut truth = GroundTruth {
        seed: cfg.seed,
        band_hz: sim.band_hz,
        grid_points: sim.grid_points,
        noise_fraction: sim.noise_fraction,
        domains: Vec::with_capacity(domains.len()),
        temperature_law: sim.temperature.clone(),
        test_files: Vec::new(),
    };

    let rad = grid.in_rad_per_sec();
    let mut curve = vec![0.0; grid.len()];
    for (k, (modes, temperature_c)) in domains.iter().enumerate() {
        eval_real_into(modes, rad.values(), &mut curve);
        let truth_file = format!("truth_{k}.csv");
        write_frf_csv(&cfg.out_dir.join(&truth_file), grid.values(), &curve, None, *temperature_c)?;

        let observations: Vec<(f64, f64)> =
            grid.values().iter().copied().zip(curve.iter().copied()).collect();
        let noisy = add_training_noise(&observations, sim.noise_fraction, cfg.seed + 2000 + k as u64)
            .map_err(|e| data_err("training noise", e))?;
        let peak = observations.iter().map(|(_, v)| v.abs()).fold(0.0f64, f64::max);
        let kept = decimate_spectral_lines(&noisy, sim.training_points[k], cfg.seed + 1000 + k as u64)
            .map_err(|e| data_err("decimation", e))?;
        let (train_freq, train_real): (Vec<f64>, Vec<f64>) = kept.into_iter().unzip();
        let train_file = format!("train_{k}.csv");
        write_frf_csv(&cfg.out_dir.join(&train_file), &train_freq, &train_real, None, *temperature_c)?;

        truth.domains.push(DomainTruth {
            index: k,
            truth_file,
            train_file,
            temperature_c: *temperature_c,
            training_points: sim.training_points[k],
            noise_sd: sim.noise_fraction * peak,
            modes: modes
                .iter()
                .map(|m| ModeTruth {
                    freq_hz: m.natural_frequency / std::f64::consts::TAU,
                    damping: m.damping_ratio,
                    residue: m.residue,
                })
                .collect(),
        });
    }

    if let Some(law) = &sim.temperature {
        for (i, &t) in law.test_temperatures_c.iter().enumerate() {
            let modes = modes_at_temperature(&sim.modes[0], law, t)?;
            eval_real_into(&modes, rad.values(), &mut curve);
            let file = format!("test_{i}.csv");
            write_frf_csv(&cfg.out_dir.join(&file), grid.values(), &curve, None, Some(t))?;
            truth.test_files.push(file);
        }
    }

    write_json(&cfg.out_dir.join("ground_truth.json"), &truth)
}

/// Evenly spaced Hz grid over a band, inclusive of both edges.
pub fn uniform_hz_grid(lo: f64, hi: f64, n: usize) -> Result<FrequencyGrid, CliError> {
    let step = (hi - lo) / (n - 1) as f64;
    let hz: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    FrequencyGrid::from_hz(hz).map_err(|e| CliError::Usage(format!("frequency grid: {e}")))
}

fn uniform_grid(sim: &SimulateConfig) -> Result<FrequencyGrid, CliError> {
    uniform_hz_grid(sim.band_hz[0], sim.band_hz[1], sim.grid_points)
}

/// One mode set per domain, natural frequencies independently jittered by
/// a uniform relative factor. The jitter stream depends only on the seed
/// and the (domain, mode) visiting order.
fn jittered_population(
    sim: &SimulateConfig,
    seed: u64,
) -> Result<Vec<(Vec<Mode>, Option<f64>)>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let j = sim.freq_jitter_fraction;
    let mut domains = Vec::with_capacity(sim.n_domains);
    for k in 0..sim.n_domains {
        let mut modes = Vec::with_capacity(sim.modes.len());
        for t in &sim.modes {
            let factor = if j > 0.0 { 1.0 + rng.gen_range(-j..j) } else { 1.0 };
            let mode = Mode::new(
                t.freq_hz * factor * std::f64::consts::TAU,
                t.damping,
                t.residue,
            )
            .map_err(|e| CliError::Usage(format!("simulate: domain {k}: {e}")))?;
            modes.push(mode);
        }
        // Catches jitter collapsing the frequency ordering.
        ModalParameterSet::new(modes.clone(), k)
            .map_err(|e| CliError::Usage(format!("simulate: domain {k}: {e}")))?;
        domains.push((modes, None));
    }
    Ok(domains)
}

fn temperature_population(
    sim: &SimulateConfig,
    law: &TemperatureSim,
) -> Result<Vec<(Vec<Mode>, Option<f64>)>, CliError> {
    law.train_temperatures_c
        .iter()
        .map(|&t| Ok((modes_at_temperature(&sim.modes[0], law, t)?, Some(t))))
        .collect()
}

fn modes_at_temperature(
    base: &ModeTruth,
    law: &TemperatureSim,
    t: f64,
) -> Result<Vec<Mode>, CliError> {
    let freq_hz =
        base.freq_hz + law.freq_slope_hz_per_c * t + law.freq_curvature_hz_per_c2 * t * t;
    let damping = base.damping + law.damping_slope_per_c * t;
    let mode = Mode::new(freq_hz * std::f64::consts::TAU, damping, base.residue)
        .map_err(|e| CliError::Usage(format!("simulate: law invalid at {t} degC: {e}")))?;
    Ok(vec![mode])
}
