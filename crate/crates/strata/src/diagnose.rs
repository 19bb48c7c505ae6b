//! `diagnose`: convergence report for an existing trace.
//!
//! Writes per-parameter summaries (split R-hat, rank-normalised bulk ESS,
//! quantiles) to a CSV, prints a compact table, and applies the same
//! convergence gates as `fit`: exit code 3 when any R-hat or the
//! divergence rate breaches its threshold.

use std::fmt::Write as _;

use strata_analysis::{summarize_parameter, AnalysisError, ScalarSummary};

use crate::config::RunConfig;
use crate::csv::read_trace_csv;
use crate::error::{data_err, CliError};

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| data_err(cfg.out_dir.display(), e))?;
    let trace = read_trace_csv(&cfg.out_dir.join(&cfg.diagnose.trace_path))?;

    let mut summaries: Vec<ScalarSummary> = Vec::with_capacity(trace.names.len());
    for (p, name) in trace.names.iter().enumerate() {
        let chains = trace.parameter_by_chain(p);
        let summary = summarize_parameter(&chains).map_err(|e| match e {
            AnalysisError::ConstantChain => {
                CliError::Convergence(format!("parameter {name} is constant across draws"))
            }
            other => CliError::Data(format!("diagnose: parameter {name}: {other}")),
        })?;
        summaries.push(summary);
    }

    let mut text =
        String::from("parameter,mean,sd,q025,q25,median,q75,q975,rhat,ess,mcse\n");
    for (name, s) in trace.names.iter().zip(&summaries) {
        let _ = writeln!(
            text,
            "{name},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.mean, s.sd, s.q025, s.q25, s.median, s.q75, s.q975, s.rhat, s.ess, s.mcse
        );
    }
    let out = cfg.out_dir.join(&cfg.diagnose.output);
    std::fs::write(&out, text).map_err(|e| data_err(out.display(), e))?;

    let rate = trace.divergence_rate();
    println!("{:<24} {:>12} {:>12} {:>8} {:>10}", "parameter", "mean", "sd", "rhat", "ess");
    for (name, s) in trace.names.iter().zip(&summaries) {
        println!(
            "{:<24} {:>12.5e} {:>12.5e} {:>8.4} {:>10.1}",
            name, s.mean, s.sd, s.rhat, s.ess
        );
    }
    println!(
        "chains {} draws/chain {} divergence rate {:.3}%",
        trace.chains.len(),
        trace.chains[0].len(),
        100.0 * rate
    );

    let gates = &cfg.convergence;
    let max_rhat = summaries.iter().map(|s| s.rhat).fold(f64::NEG_INFINITY, f64::max);
    let mut breaches = Vec::new();
    if !(max_rhat <= gates.max_rhat) {
        breaches.push(format!("max R-hat {max_rhat:.4} exceeds {}", gates.max_rhat));
    }
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
