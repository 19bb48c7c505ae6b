//! `estimate-frf`: H1 spectral estimation from time-series CSVs.

use crate::config::RunConfig;
use crate::csv::{read_time_series_csv, write_frf_csv};
use crate::error::{data_err, CliError};

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| data_err(cfg.out_dir.display(), e))?;
    let est = &cfg.estimate;
    let force = read_time_series_csv(&est.force_path)?;
    let response = read_time_series_csv(&est.response_path)?;
    let (grid, h1) = strata_signal::h1_estimate(&force, &response, est.blocks, est.window_kind()?)
        .map_err(|e| data_err("h1 estimate", e))?;
    let hz = grid.in_hz();
    let real: Vec<f64> = h1.iter().map(|c| c.re).collect();
    let imag: Vec<f64> = h1.iter().map(|c| c.im).collect();
    write_frf_csv(&cfg.out_dir.join(&est.output), hz.values(), &real, Some(&imag), None)
}
