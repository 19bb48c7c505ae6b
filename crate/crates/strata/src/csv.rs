//! Readers/writers for the fixed CSV schemata, plus the JSON artefacts.
//!
//! All floating-point values are written as `{:.16e}` (17 significant
//! digits), which round-trips f64 exactly. Files are UTF-8 with LF line
//! endings. No quoting or escaping: every field is numeric.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use strata_signal::TimeSeries;

use crate::error::{data_err, CliError};

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| data_err(path.display(), e))
}

/// One FRF file: `freq_hz,real[,imag][,temperature_c]`.
#[derive(Debug, Clone)]
pub struct FrfTable {
    pub freq_hz: Vec<f64>,
    pub real: Vec<f64>,
    pub imag: Option<Vec<f64>>,
    /// Per-file temperature tag; every row must carry the same value.
    pub temperature_c: Option<f64>,
}

pub fn write_frf_csv(
    path: &Path,
    freq_hz: &[f64],
    real: &[f64],
    imag: Option<&[f64]>,
    temperature_c: Option<f64>,
) -> Result<(), CliError> {
    let mut text = String::from("freq_hz,real");
    if imag.is_some() {
        text.push_str(",imag");
    }
    if temperature_c.is_some() {
        text.push_str(",temperature_c");
    }
    text.push('\n');
    for i in 0..freq_hz.len() {
        let _ = write!(text, "{:.16e},{:.16e}", freq_hz[i], real[i]);
        if let Some(im) = imag {
            let _ = write!(text, ",{:.16e}", im[i]);
        }
        if let Some(t) = temperature_c {
            let _ = write!(text, ",{:.16e}", t);
        }
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| data_err(path.display(), e))
}

pub fn read_frf_csv(path: &Path) -> Result<FrfTable, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| data_err(path.display(), e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("{}: empty file", path.display())))?;
    let columns: Vec<&str> = header.split(',').collect();
    let find = |name: &str| columns.iter().position(|c| *c == name);
    let freq_col = find("freq_hz")
        .ok_or_else(|| CliError::Data(format!("{}: missing freq_hz column", path.display())))?;
    let real_col = find("real")
        .ok_or_else(|| CliError::Data(format!("{}: missing real column", path.display())))?;
    let imag_col = find("imag");
    let temp_col = find("temperature_c");

    let mut freq_hz = Vec::new();
    let mut real = Vec::new();
    let mut imag = imag_col.map(|_| Vec::new());
    let mut temperature_c: Option<f64> = None;
    for (row, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(CliError::Data(format!(
                "{}: row {} has {} fields, header has {}",
                path.display(),
                row + 2,
                fields.len(),
                columns.len()
            )));
        }
        let get = |col: usize| -> Result<f64, CliError> {
            fields[col].parse().map_err(|e| {
                CliError::Data(format!("{}: row {}: {e}", path.display(), row + 2))
            })
        };
        freq_hz.push(get(freq_col)?);
        real.push(get(real_col)?);
        if let (Some(col), Some(values)) = (imag_col, imag.as_mut()) {
            values.push(get(col)?);
        }
        if let Some(col) = temp_col {
            let t = get(col)?;
            match temperature_c {
                None => temperature_c = Some(t),
                Some(prev) if prev == t => {}
                Some(prev) => {
                    return Err(CliError::Data(format!(
                        "{}: inconsistent temperature tags {prev} and {t}",
                        path.display()
                    )));
                }
            }
        }
    }
    if freq_hz.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    Ok(FrfTable { freq_hz, real, imag, temperature_c })
}

pub fn write_time_series_csv(path: &Path, series: &TimeSeries) -> Result<(), CliError> {
    let dt = series.dt();
    let mut text = String::from("time_s,value\n");
    for (i, v) in series.samples().iter().enumerate() {
        let _ = writeln!(text, "{:.16e},{:.16e}", i as f64 * dt, v);
    }
    std::fs::write(path, text).map_err(|e| data_err(path.display(), e))
}

pub fn read_time_series_csv(path: &Path) -> Result<TimeSeries, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| data_err(path.display(), e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("{}: empty file", path.display())))?;
    if header != "time_s,value" {
        return Err(CliError::Data(format!(
            "{}: expected header time_s,value, got '{header}'",
            path.display()
        )));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let (t, v) = line.split_once(',').ok_or_else(|| {
            CliError::Data(format!("{}: row {} has no comma", path.display(), row + 2))
        })?;
        let parse = |s: &str| -> Result<f64, CliError> {
            s.parse()
                .map_err(|e| CliError::Data(format!("{}: row {}: {e}", path.display(), row + 2)))
        };
        times.push(parse(t)?);
        values.push(parse(v)?);
    }
    if times.len() < 2 {
        return Err(CliError::Data(format!(
            "{}: need at least two samples to infer the rate",
            path.display()
        )));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(CliError::Data(format!("{}: non-increasing time stamps", path.display())));
    }
    for i in 2..times.len() {
        let step = times[i] - times[i - 1];
        if (step - dt).abs() > 1e-9 * dt {
            return Err(CliError::Data(format!(
                "{}: non-uniform sampling at row {}",
                path.display(),
                i + 2
            )));
        }
    }
    TimeSeries::new(values, 1.0 / dt).map_err(|e| data_err(path.display(), e))
}

/// Posterior draws parsed back from a trace CSV, constrained space.
#[derive(Debug, Clone)]
pub struct TraceTable {
    pub names: Vec<String>,
    /// `[chain][draw][parameter]`.
    pub chains: Vec<Vec<Vec<f64>>>,
    pub divergent: Vec<Vec<bool>>,
}

impl TraceTable {
    pub fn pooled_draws(&self) -> Vec<Vec<f64>> {
        self.chains.iter().flatten().cloned().collect()
    }

    /// One series per chain for the named parameter.
    pub fn parameter_by_chain(&self, index: usize) -> Vec<Vec<f64>> {
        self.chains
            .iter()
            .map(|chain| chain.iter().map(|draw| draw[index]).collect())
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn divergence_rate(&self) -> f64 {
        let total: usize = self.divergent.iter().map(|c| c.len()).sum();
        if total == 0 {
            return 0.0;
        }
        let divergent: usize =
            self.divergent.iter().map(|c| c.iter().filter(|d| **d).count()).sum();
        divergent as f64 / total as f64
    }
}

/// Writes `chain,draw,divergent,energy,<parameter names…>` with constrained
/// parameter values.
pub fn write_trace_csv(
    path: &Path,
    names: &[String],
    constrained: &[Vec<Vec<f64>>],
    divergent: &[Vec<bool>],
    energy: &[Vec<f64>],
) -> Result<(), CliError> {
    let mut text = String::from("chain,draw,divergent,energy");
    for name in names {
        text.push(',');
        text.push_str(name);
    }
    text.push('\n');
    for (c, chain) in constrained.iter().enumerate() {
        for (i, draw) in chain.iter().enumerate() {
            let _ = write!(
                text,
                "{c},{i},{},{:.16e}",
                u8::from(divergent[c][i]),
                energy[c][i]
            );
            for v in draw {
                let _ = write!(text, ",{:.16e}", v);
            }
            text.push('\n');
        }
    }
    std::fs::write(path, text).map_err(|e| data_err(path.display(), e))
}

pub fn read_trace_csv(path: &Path) -> Result<TraceTable, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| data_err(path.display(), e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("{}: empty file", path.display())))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 5
        || columns[0] != "chain"
        || columns[1] != "draw"
        || columns[2] != "divergent"
        || columns[3] != "energy"
    {
        return Err(CliError::Data(format!(
            "{}: expected header chain,draw,divergent,energy,<parameters…>",
            path.display()
        )));
    }
    let names: Vec<String> = columns[4..].iter().map(|s| s.to_string()).collect();
    let dim = names.len();
    let mut chains: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut divergent: Vec<Vec<bool>> = Vec::new();
    for (row, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 + dim {
            return Err(CliError::Data(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                row + 2,
                fields.len(),
                4 + dim
            )));
        }
        let chain: usize = fields[0].parse().map_err(|e| {
            CliError::Data(format!("{}: row {}: {e}", path.display(), row + 2))
        })?;
        while chains.len() <= chain {
            chains.push(Vec::new());
            divergent.push(Vec::new());
        }
        let mut draw = Vec::with_capacity(dim);
        for f in &fields[4..] {
            draw.push(f.parse::<f64>().map_err(|e| {
                CliError::Data(format!("{}: row {}: {e}", path.display(), row + 2))
            })?);
        }
        chains[chain].push(draw);
        divergent[chain].push(fields[2] == "1");
    }
    if chains.iter().any(|c| c.is_empty()) {
        return Err(CliError::Data(format!(
            "{}: missing draws for at least one chain",
            path.display()
        )));
    }
    Ok(TraceTable { names, chains, divergent })
}
