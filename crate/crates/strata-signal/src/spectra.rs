use num_complex::Complex64;
use rustfft::FftPlanner;
use strata_modal::FrequencyGrid;

use crate::{window_values, SignalError, TimeSeries, WindowKind};

/// Averaged block spectra of one force/response record pair.
///
/// `cross[k] = mean_b conj(S_response_b[k]) · S_force_b[k]` and
/// `auto[k] = mean_b |S_force_b[k]|²` on the one-sided grid (DC and Nyquist
/// retained). The FFT is unscaled; H1 is a ratio, so any common scale
/// cancels.
#[derive(Debug, Clone)]
pub struct SpectralRecord {
    frequencies: FrequencyGrid,
    cross: Vec<Complex64>,
    auto: Vec<f64>,
    block_count: usize,
}

impl SpectralRecord {
    /// Splits both series into `block_count` non-overlapping blocks (any
    /// remainder samples are dropped), windows each, and averages the block
    /// spectra.
    pub fn estimate(
        force: &TimeSeries,
        response: &TimeSeries,
        block_count: usize,
        window: WindowKind,
    ) -> Result<Self, SignalError> {
        if force.len() != response.len() {
            return Err(SignalError::MismatchedLengths {
                input: force.len(),
                output: response.len(),
            });
        }
        if force.sample_rate() != response.sample_rate() {
            return Err(SignalError::MismatchedRates {
                input: force.sample_rate(),
                output: response.sample_rate(),
            });
        }
        if block_count == 0 {
            return Err(SignalError::ZeroBlocks);
        }
        let block_len = force.len() / block_count;
        if block_len < 2 {
            return Err(SignalError::BlocksTooShort { block_count, block_len });
        }
        let w = window_values(window, block_len)?;

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(block_len);
        let n_lines = block_len / 2 + 1;
        let mut cross = vec![Complex64::new(0.0, 0.0); n_lines];
        let mut auto = vec![0.0; n_lines];
        let mut buf_force = vec![Complex64::new(0.0, 0.0); block_len];
        let mut buf_resp = vec![Complex64::new(0.0, 0.0); block_len];

        for b in 0..block_count {
            let start = b * block_len;
            for i in 0..block_len {
                buf_force[i] = Complex64::new(w[i] * force.samples()[start + i], 0.0);
                buf_resp[i] = Complex64::new(w[i] * response.samples()[start + i], 0.0);
            }
            fft.process(&mut buf_force);
            fft.process(&mut buf_resp);
            for k in 0..n_lines {
                cross[k] += buf_resp[k].conj() * buf_force[k];
                auto[k] += buf_force[k].norm_sqr();
            }
        }
        let scale = 1.0 / block_count as f64;
        for k in 0..n_lines {
            cross[k] *= scale;
            auto[k] *= scale;
        }

        let df = force.sample_rate() / block_len as f64;
        let freqs: Vec<f64> = (0..n_lines).map(|k| k as f64 * df).collect();
        Ok(SpectralRecord {
            frequencies: FrequencyGrid::from_hz(freqs).expect("FFT grid is increasing"),
            cross,
            auto,
            block_count,
        })
    }

    pub fn frequencies(&self) -> &FrequencyGrid {
        &self.frequencies
    }

    pub fn cross_spectrum(&self) -> &[Complex64] {
        &self.cross
    }

    pub fn auto_spectrum(&self) -> &[f64] {
        &self.auto
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    /// H1 = cross/auto per retained line. Errors on an exactly-zero force
    /// auto-spectrum line, naming it.
    pub fn h1(&self) -> Result<Vec<Complex64>, SignalError> {
        let mut h1 = Vec::with_capacity(self.auto.len());
        for (k, (&g_auto, &g_cross)) in self.auto.iter().zip(&self.cross).enumerate() {
            if g_auto == 0.0 {
                return Err(SignalError::ZeroAutoSpectrum {
                    line: k,
                    freq_hz: self.frequencies.values()[k],
                });
            }
            h1.push(g_cross / g_auto);
        }
        Ok(h1)
    }
}

/// H1 frequency response estimate of `response` relative to `force`.
///
/// Returns the one-sided frequency grid (Hz) and the complex H1 values, in
/// the modal-model convention (imag −A/(2ζ) at resonance; see the crate
/// docs).
pub fn h1_estimate(
    force: &TimeSeries,
    response: &TimeSeries,
    block_count: usize,
    window: WindowKind,
) -> Result<(FrequencyGrid, Vec<Complex64>), SignalError> {
    let record = SpectralRecord::estimate(force, response, block_count, window)?;
    let h1 = record.h1()?;
    Ok((record.frequencies, h1))
}
