//! `predict`: score a temperature-model posterior at held-out
//! temperatures.
//!
//! Reads back a trace written by `fit` with the temperature model, builds
//! one modal curve per posterior draw at each test file's temperature,
//! and writes a 3-sigma predicted band per file, an NMSE table, and a
//! modal-parameter extrapolation table. Test rows that coincide with a
//! training observation (same temperature, same spectral line, within a
//! relative tolerance) are excluded from the NMSE score but still appear
//! in the predicted curve.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use strata_analysis::{extrapolate_temperature, nmse, predictive_band, ModalTrend};
use strata_modal::{FrequencyGrid, Mode};

use crate::config::RunConfig;
use crate::csv::{read_frf_csv, read_trace_csv, TraceTable};
use crate::error::{data_err, CliError};
use crate::fit::{resolve_inputs, write_band_csv};

/// Trace column indices of the temperature-model parameters.
struct TrendSlots {
    mu_omega: usize,
    mu_zeta: usize,
    omega_slope: usize,
    omega_curvature: usize,
    zeta_slope: usize,
    residue: usize,
    sigma2_h: usize,
}

impl TrendSlots {
    fn locate(trace: &TraceTable) -> Result<Self, CliError> {
        let find = |name: &str| {
            trace.index_of(name).ok_or_else(|| {
                CliError::Data(format!(
                    "predict: trace has no '{name}' column; a temperature-model fit is required"
                ))
            })
        };
        Ok(TrendSlots {
            mu_omega: find("mu_omega")?,
            mu_zeta: find("mu_zeta")?,
            omega_slope: find("omega_slope")?,
            omega_curvature: find("omega_curvature")?,
            zeta_slope: find("zeta_slope")?,
            residue: find("residue")?,
            sigma2_h: find("sigma2_h")?,
        })
    }

    fn trend(&self, draw: &[f64]) -> ModalTrend {
        ModalTrend {
            freq_mean: draw[self.mu_omega],
            freq_slope: draw[self.omega_slope],
            freq_curvature: draw[self.omega_curvature],
            damping_mean: draw[self.mu_zeta],
            damping_slope: draw[self.zeta_slope],
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| data_err(cfg.out_dir.display(), e))?;
    let pred = &cfg.predict;
    let composition = pred.band_composition()?;
    let trace = read_trace_csv(&cfg.out_dir.join(&pred.trace_path))?;
    let slots = TrendSlots::locate(&trace)?;
    let draws = trace.pooled_draws();

    let test_paths = resolve_inputs(&cfg.out_dir, &pred.test_paths, "test_")?;
    let train_paths = resolve_inputs(&cfg.out_dir, &pred.train_paths, "train_")?;
    let mut trained: Vec<(f64, Vec<f64>)> = Vec::new();
    for path in &train_paths {
        let table = read_frf_csv(path)?;
        if let Some(t) = table.temperature_c {
            trained.push((t, table.freq_hz));
        }
    }

    let mut nmse_text = String::from("temperature_c,nmse_percent,points\n");
    let mut temperatures = Vec::new();
    for (i, path) in test_paths.iter().enumerate() {
        let table = read_frf_csv(path)?;
        let t = table.temperature_c.ok_or_else(|| {
            CliError::Data(format!("{}: missing temperature tag", path.display()))
        })?;
        temperatures.push(t);

        // Modal curves are evaluated per draw with the law applied at t;
        // extrapolated draws are used as-is, without range validation.
        let curves: Vec<(Vec<Mode>, f64)> = draws
            .iter()
            .map(|d| {
                let trend = slots.trend(d);
                let (omega, zeta) = trend.at(t);
                let mode = Mode {
                    natural_frequency: omega,
                    damping_ratio: zeta,
                    residue: d[slots.residue],
                };
                (vec![mode], d[slots.sigma2_h])
            })
            .collect();
        let grid = FrequencyGrid::from_hz(table.freq_hz.clone())
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let band = predictive_band(&curves, &grid, composition)
            .map_err(|e| CliError::Data(format!("predict: {e}")))?;
        write_band_csv(&cfg.out_dir.join(format!("{}{i}.csv", pred.curve_prefix)), &band)?;

        let keep = scoring_mask(&table.freq_hz, t, &trained, pred.exclusion_tolerance);
        let test: Vec<f64> = pick(&table.real, &keep);
        let prediction: Vec<f64> = pick(&band.mean, &keep);
        let score = nmse(&test, &prediction)
            .map_err(|e| CliError::Data(format!("{}: NMSE: {e}", path.display())))?;
        let _ = writeln!(nmse_text, "{t:.16e},{score:.16e},{}", test.len());
    }
    let nmse_path = cfg.out_dir.join(&pred.nmse_output);
    std::fs::write(&nmse_path, nmse_text).map_err(|e| data_err(nmse_path.display(), e))?;

    write_extrapolation(cfg, &slots, &draws, &temperatures)
}

/// True for rows that enter the NMSE score; a row is excluded when some
/// training file shares the test temperature and contains the same
/// spectral line.
fn scoring_mask(
    freq_hz: &[f64],
    t: f64,
    trained: &[(f64, Vec<f64>)],
    tol: f64,
) -> Vec<bool> {
    let close = |a: f64, b: f64| (a - b).abs() <= tol * b.abs().max(1.0);
    freq_hz
        .iter()
        .map(|&f| {
            !trained.iter().any(|(t_train, lines)| {
                close(*t_train, t) && lines.iter().any(|&l| close(l, f))
            })
        })
        .collect()
}

fn pick(values: &[f64], keep: &[bool]) -> Vec<f64> {
    values.iter().zip(keep).filter(|(_, k)| **k).map(|(v, _)| *v).collect()
}

/// `temperature_c,freq_hz,freq_sd_hz,damping,damping_sd`, one row per
/// test temperature.
fn write_extrapolation(
    cfg: &RunConfig,
    slots: &TrendSlots,
    draws: &[Vec<f64>],
    temperatures: &[f64],
) -> Result<(), CliError> {
    let path = cfg.out_dir.join(&cfg.predict.extrapolation_output);
    let mut text = String::from("temperature_c,freq_hz,freq_sd_hz,damping,damping_sd\n");
    if !temperatures.is_empty() {
        let trends: Vec<ModalTrend> = draws.iter().map(|d| slots.trend(d)).collect();
        let predictions = extrapolate_temperature(&trends, temperatures)
            .map_err(|e| CliError::Data(format!("predict: extrapolation: {e}")))?;
        for p in predictions {
            let _ = writeln!(
                text,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.temperature_c,
                p.frequency / TAU,
                p.frequency_sd / TAU,
                p.damping,
                p.damping_sd
            );
        }
    }
    std::fs::write(&path, text).map_err(|e| data_err(path.display(), e))
}
