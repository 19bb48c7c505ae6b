//! `fit`: build the posterior, run the sampler, write every artefact.
//!
//! Outputs (all under the output directory): `trace.csv` with constrained
//! draws, `adaptation.json` with per-chain step sizes and mass matrices,
//! `summary.json` with per-parameter statistics and convergence metadata,
//! and for hierarchy fits optional population-marginal KDE curves and
//! per-domain posterior-predictive bands. Everything is written before
//! the convergence gates are checked, so a failing run (exit code 3)
//! still leaves its full diagnostics on disk.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::Serialize;
use strata_analysis::{
    population_marginal, posterior_predictive_frf, summarize_parameter, PopulationFamily,
    ScalarSummary,
};
use strata_hmc::{adapt_and_sample, LogDensityGradient, Trace};
use strata_model::{
    build_hierarchical_model, build_temperature_model, DomainObservations, FrfDataset,
    ParameterLayout,
};
use strata_modal::FrequencyGrid;

use crate::config::{FitConfig, RunConfig};
use crate::csv::{read_frf_csv, write_json, write_trace_csv, FrfTable};
use crate::error::{data_err, CliError};
use crate::simulate::uniform_hz_grid;

#[derive(Debug, Serialize)]
struct ParameterSummary {
    name: String,
    mean: f64,
    sd: f64,
    q025: f64,
    q25: f64,
    median: f64,
    q75: f64,
    q975: f64,
    rhat: f64,
    ess: f64,
    mcse: f64,
}

impl ParameterSummary {
    fn new(name: &str, s: &ScalarSummary) -> Self {
        ParameterSummary {
            name: name.to_string(),
            mean: s.mean,
            sd: s.sd,
            q025: s.q025,
            q25: s.q25,
            median: s.median,
            q75: s.q75,
            q975: s.q975,
            rhat: s.rhat,
            ess: s.ess,
            mcse: s.mcse,
        }
    }
}

#[derive(Debug, Serialize)]
struct FitSummary {
    model: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pooling: Option<String>,
    seed: u64,
    chains: usize,
    draws_per_chain: usize,
    warmup_per_chain: usize,
    divergence_rate: f64,
    mean_accept: f64,
    max_rhat: f64,
    min_ess: f64,
    parameters: Vec<ParameterSummary>,
}

#[derive(Debug, Serialize)]
struct ChainAdaptation {
    chain: usize,
    step_size: f64,
    inv_mass_diag: Vec<f64>,
    divergences: usize,
    mean_accept: f64,
}

#[derive(Debug, Serialize)]
struct AdaptationSummary {
    chains: Vec<ChainAdaptation>,
}

/// Training tables plus the frequency range each covers (Hz).
struct TrainingData {
    dataset: FrfDataset,
    ranges: Vec<(f64, f64)>,
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| data_err(cfg.out_dir.display(), e))?;
    let fit = &cfg.fit;
    let paths = resolve_inputs(&cfg.out_dir, &fit.train_paths, "train_")?;
    if paths.is_empty() {
        return Err(CliError::Data(format!(
            "fit: no training files given and no train_<k>.csv found in {}",
            cfg.out_dir.display()
        )));
    }
    let training = load_training(&paths, fit)?;

    if fit.temperature_model {
        fit_temperature(cfg, training)
    } else {
        fit_hierarchy(cfg, training)
    }
}

/// Resolves explicit paths against the output directory, or scans it for
/// `<prefix><k>.csv` files ordered by k.
pub fn resolve_inputs(
    out_dir: &Path,
    explicit: &[PathBuf],
    prefix: &str,
) -> Result<Vec<PathBuf>, CliError> {
    if !explicit.is_empty() {
        return Ok(explicit.iter().map(|p| out_dir.join(p)).collect());
    }
    let mut found: Vec<(usize, PathBuf)> = Vec::new();
    let entries = std::fs::read_dir(out_dir).map_err(|e| data_err(out_dir.display(), e))?;
    for entry in entries {
        let entry = entry.map_err(|e| data_err(out_dir.display(), e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(index) = name
            .strip_prefix(prefix)
            .and_then(|rest| rest.strip_suffix(".csv"))
            .and_then(|k| k.parse::<usize>().ok())
        else {
            continue;
        };
        found.push((index, entry.path()));
    }
    found.sort_by_key(|(k, _)| *k);
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

fn load_training(paths: &[PathBuf], fit: &FitConfig) -> Result<TrainingData, CliError> {
    let mut domains = Vec::with_capacity(paths.len());
    let mut ranges = Vec::with_capacity(paths.len());
    for path in paths {
        let table = read_frf_csv(path)?;
        let (freq, real) = band_filter(&table, fit.band_hz, path)?;
        ranges.push((freq[0], freq[freq.len() - 1]));
        let grid = FrequencyGrid::from_hz(freq)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let domain = DomainObservations::new(grid, real, table.temperature_c)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        domains.push(domain);
    }
    let dataset = FrfDataset::new(domains).map_err(|e| data_err("fit", e))?;
    Ok(TrainingData { dataset, ranges })
}

fn band_filter(
    table: &FrfTable,
    band_hz: Option<[f64; 2]>,
    path: &Path,
) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let keep = |f: f64| match band_hz {
        Some([lo, hi]) => lo <= f && f <= hi,
        None => true,
    };
    let mut freq = Vec::new();
    let mut real = Vec::new();
    for (i, &f) in table.freq_hz.iter().enumerate() {
        if keep(f) {
            freq.push(f);
            real.push(table.real[i]);
        }
    }
    if freq.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no rows remain inside the fit band",
            path.display()
        )));
    }
    Ok((freq, real))
}

fn fit_hierarchy(cfg: &RunConfig, training: TrainingData) -> Result<(), CliError> {
    let fit = &cfg.fit;
    let spec = fit.hierarchy_spec(training.dataset.n_domains())?;
    let model = build_hierarchical_model(training.dataset, spec)
        .map_err(|e| CliError::Data(format!("fit: {e}")))?;
    let (trace, constrained) = sample(cfg, &model, model.layout())?;
    let summaries = write_common_outputs(
        cfg,
        model.layout(),
        &trace,
        &constrained,
        "hierarchical",
        Some(fit.pooling.clone()),
    )?;

    let pooled: Vec<Vec<f64>> = constrained.iter().flatten().cloned().collect();
    if fit.write_kde {
        write_kde_curves(cfg, &model, &pooled)?;
    }
    if fit.write_bands {
        write_band_curves(cfg, &model, &pooled, &training.ranges)?;
    }
    check_gates(cfg, &trace, &summaries)
}

fn fit_temperature(cfg: &RunConfig, training: TrainingData) -> Result<(), CliError> {
    let temps = training.dataset.temperatures().map_err(|e| {
        CliError::Data(format!(
            "fit: {e} (the temperature model needs a temperature_c column in every training file)"
        ))
    })?;
    let spec = cfg.fit.temperature_spec(temps);
    let model = build_temperature_model(training.dataset, spec)
        .map_err(|e| CliError::Data(format!("fit: {e}")))?;
    let (trace, constrained) = sample(cfg, &model, model.layout())?;
    let summaries =
        write_common_outputs(cfg, model.layout(), &trace, &constrained, "temperature", None)?;
    check_gates(cfg, &trace, &summaries)
}

/// Runs the sampler and maps every draw to constrained space,
/// `[chain][draw][coordinate]`.
fn sample<M: LogDensityGradient>(
    cfg: &RunConfig,
    model: &M,
    layout: &ParameterLayout,
) -> Result<(Trace, Vec<Vec<Vec<f64>>>), CliError> {
    let sampler_cfg = cfg.sampler.to_sampler_config(cfg.seed);
    let trace = adapt_and_sample(model, &sampler_cfg)
        .map_err(|e| CliError::Convergence(format!("sampler: {e}")))?;
    let constrained: Vec<Vec<Vec<f64>>> = trace
        .chains()
        .iter()
        .map(|c| (0..c.n_draws()).map(|i| layout.constrain(c.draw(i))).collect())
        .collect();
    Ok((trace, constrained))
}

fn write_common_outputs(
    cfg: &RunConfig,
    layout: &ParameterLayout,
    trace: &Trace,
    constrained: &[Vec<Vec<f64>>],
    model_name: &'static str,
    pooling: Option<String>,
) -> Result<Vec<ScalarSummary>, CliError> {
    let fit = &cfg.fit;
    let names = layout.names();

    let divergent: Vec<Vec<bool>> =
        trace.chains().iter().map(|c| c.divergent.clone()).collect();
    let energy: Vec<Vec<f64>> = trace.chains().iter().map(|c| c.energy.clone()).collect();
    write_trace_csv(&cfg.out_dir.join(&fit.trace_output), names, constrained, &divergent, &energy)?;

    let adaptation = AdaptationSummary {
        chains: trace
            .chains()
            .iter()
            .enumerate()
            .map(|(i, c)| ChainAdaptation {
                chain: i,
                step_size: c.adaptation.step_size,
                inv_mass_diag: c.adaptation.inv_mass_diag.clone(),
                divergences: c.divergence_count(),
                mean_accept: c.mean_accept_stat(),
            })
            .collect(),
    };
    write_json(&cfg.out_dir.join(&fit.adaptation_output), &adaptation)?;

    let summaries = summarize_all(names, constrained)?;
    let max_rhat = summaries.iter().map(|s| s.rhat).fold(f64::NEG_INFINITY, f64::max);
    let min_ess = summaries.iter().map(|s| s.ess).fold(f64::INFINITY, f64::min);
    let mean_accept = trace.chains().iter().map(|c| c.mean_accept_stat()).sum::<f64>()
        / trace.n_chains() as f64;
    let summary = FitSummary {
        model: model_name,
        pooling,
        seed: cfg.seed,
        chains: trace.n_chains(),
        draws_per_chain: trace.chains()[0].n_draws(),
        warmup_per_chain: trace.chains()[0].n_warmup(),
        divergence_rate: trace.divergence_rate(),
        mean_accept,
        max_rhat,
        min_ess,
        parameters: names
            .iter()
            .zip(&summaries)
            .map(|(n, s)| ParameterSummary::new(n, s))
            .collect(),
    };
    write_json(&cfg.out_dir.join(&fit.summary_output), &summary)?;
    Ok(summaries)
}

fn summarize_all(
    names: &[String],
    constrained: &[Vec<Vec<f64>>],
) -> Result<Vec<ScalarSummary>, CliError> {
    let mut summaries = Vec::with_capacity(names.len());
    for (p, name) in names.iter().enumerate() {
        let chains: Vec<Vec<f64>> = constrained
            .iter()
            .map(|chain| chain.iter().map(|draw| draw[p]).collect())
            .collect();
        let summary = summarize_parameter(&chains).map_err(|e| {
            CliError::Convergence(format!("parameter {name} is not summarisable: {e}"))
        })?;
        summaries.push(summary);
    }
    Ok(summaries)
}

/// Population-marginal KDE curves, one file per hyper-distribution. The
/// natural-frequency marginal is converted to Hz; damping is unitless.
fn write_kde_curves(
    cfg: &RunConfig,
    model: &strata_model::HierarchicalFrfModel,
    pooled: &[Vec<f64>],
) -> Result<(), CliError> {
    let fit = &cfg.fit;
    for (g, slots) in model.groups().iter().enumerate() {
        let n_modes = slots.residue.len();
        for m in 0..n_modes {
            let means: Vec<f64> =
                pooled.iter().map(|d| d[slots.mu_omega[m]] / TAU).collect();
            let variances: Vec<f64> =
                pooled.iter().map(|d| d[slots.sigma2_omega[m]] / (TAU * TAU)).collect();
            let curve = population_marginal(
                PopulationFamily::Gaussian { means: &means, variances: &variances },
                fit.kde_grid_points,
                cfg.seed.wrapping_add(9000 + (g * n_modes + m) as u64),
            )
            .map_err(|e| CliError::Data(format!("fit: frequency KDE: {e}")))?;
            write_kde_csv(&cfg.out_dir.join(format!("kde_omega_hz_g{g}_m{m}.csv")), &curve)?;

            let alphas: Vec<f64> = pooled.iter().map(|d| d[slots.alpha_zeta[m]]).collect();
            let betas: Vec<f64> = pooled.iter().map(|d| d[slots.beta_zeta[m]]).collect();
            let curve = population_marginal(
                PopulationFamily::Beta { alphas: &alphas, betas: &betas },
                fit.kde_grid_points,
                cfg.seed.wrapping_add(9500 + (g * n_modes + m) as u64),
            )
            .map_err(|e| CliError::Data(format!("fit: damping KDE: {e}")))?;
            write_kde_csv(&cfg.out_dir.join(format!("kde_zeta_g{g}_m{m}.csv")), &curve)?;
        }
    }
    Ok(())
}

fn write_kde_csv(path: &Path, curve: &strata_analysis::KdeCurve) -> Result<(), CliError> {
    use std::fmt::Write as _;
    let mut text = String::from("value,density\n");
    for (v, d) in curve.grid().iter().zip(curve.density()) {
        let _ = writeln!(text, "{v:.16e},{d:.16e}");
    }
    std::fs::write(path, text).map_err(|e| data_err(path.display(), e))
}

/// Per-domain posterior-predictive 3-sigma bands on a uniform grid over
/// the fit band (or the domain's own data range).
fn write_band_curves(
    cfg: &RunConfig,
    model: &strata_model::HierarchicalFrfModel,
    pooled: &[Vec<f64>],
    ranges: &[(f64, f64)],
) -> Result<(), CliError> {
    let fit = &cfg.fit;
    let composition = fit.band_composition()?;
    for (k, &(data_lo, data_hi)) in ranges.iter().enumerate() {
        let (lo, hi) = match fit.band_hz {
            Some([lo, hi]) => (lo, hi),
            None => (data_lo, data_hi),
        };
        if !(lo < hi) {
            continue; // single-line domain, no band to draw
        }
        let grid = uniform_hz_grid(lo, hi, fit.band_grid_points)?;
        let band = posterior_predictive_frf(model, pooled, &grid, k, composition)
            .map_err(|e| CliError::Data(format!("fit: predictive band: {e}")))?;
        write_band_csv(&cfg.out_dir.join(format!("band_{k}.csv")), &band)?;
    }
    Ok(())
}

pub fn write_band_csv(
    path: &Path,
    band: &strata_analysis::PredictiveBand,
) -> Result<(), CliError> {
    use std::fmt::Write as _;
    let hz = band.frequencies.in_hz();
    let mut text = String::from("freq_hz,mean,lower,upper\n");
    for (i, f) in hz.values().iter().enumerate() {
        let _ = writeln!(
            text,
            "{f:.16e},{:.16e},{:.16e},{:.16e}",
            band.mean[i], band.lower[i], band.upper[i]
        );
    }
    std::fs::write(path, text).map_err(|e| data_err(path.display(), e))
}

/// Exit-code-3 gates, evaluated after all artefacts are on disk.
fn check_gates(
    cfg: &RunConfig,
    trace: &Trace,
    summaries: &[ScalarSummary],
) -> Result<(), CliError> {
    let gates = &cfg.convergence;
    let mut breaches = Vec::new();
    let max_rhat = summaries.iter().map(|s| s.rhat).fold(f64::NEG_INFINITY, f64::max);
    if !(max_rhat <= gates.max_rhat) {
        breaches.push(format!("max R-hat {max_rhat:.4} exceeds {}", gates.max_rhat));
    }
    let rate = trace.divergence_rate();
    if rate > gates.max_divergence_rate {
        breaches.push(format!(
            "divergence rate {:.3}% exceeds {:.3}%",
            100.0 * rate,
            100.0 * gates.max_divergence_rate
        ));
    }
    if breaches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Convergence(breaches.join("; ")))
    }
}
