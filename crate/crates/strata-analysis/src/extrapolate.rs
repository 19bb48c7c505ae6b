//! Temperature extrapolation of modal parameters and NMSE scoring.

use crate::AnalysisError;

/// Polynomial temperature laws for one mode: frequency quadratic in
/// temperature, damping linear. Unit-agnostic — outputs follow whatever
/// unit the coefficients carry.
#[derive(Debug, Clone, Copy)]
pub struct ModalTrend {
    pub freq_mean: f64,
    pub freq_slope: f64,
    pub freq_curvature: f64,
    pub damping_mean: f64,
    pub damping_slope: f64,
}

impl ModalTrend {
    /// `(natural frequency, damping ratio)` at temperature `t_c`.
    pub fn at(&self, t_c: f64) -> (f64, f64) {
        (
            self.freq_mean + self.freq_slope * t_c + self.freq_curvature * t_c * t_c,
            self.damping_mean + self.damping_slope * t_c,
        )
    }
}

/// Point prediction (from expectation coefficients) plus per-draw scatter
/// at one temperature.
#[derive(Debug, Clone, Copy)]
pub struct TemperaturePrediction {
    pub temperature_c: f64,
    pub frequency: f64,
    pub damping: f64,
    /// Pointwise standard deviations over the supplied trend draws
    /// (population divisor; zero for a single trend).
    pub frequency_sd: f64,
    pub damping_sd: f64,
}

impl TemperaturePrediction {
    /// Frequency band at ±3 standard deviations.
    pub fn frequency_band(&self) -> (f64, f64) {
        (self.frequency - 3.0 * self.frequency_sd, self.frequency + 3.0 * self.frequency_sd)
    }

    pub fn damping_band(&self) -> (f64, f64) {
        (self.damping - 3.0 * self.damping_sd, self.damping + 3.0 * self.damping_sd)
    }
}

/// Evaluates the temperature laws at each requested temperature. The point
/// prediction substitutes coefficient expectations into the polynomial;
/// the spread comes from evaluating each draw's law separately.
pub fn extrapolate_temperature(
    trends: &[ModalTrend],
    temperatures: &[f64],
) -> Result<Vec<TemperaturePrediction>, AnalysisError> {
    if trends.is_empty() {
        return Err(AnalysisError::EmptyTrace);
    }
    let n = trends.len() as f64;
    let mean_trend = ModalTrend {
        freq_mean: trends.iter().map(|t| t.freq_mean).sum::<f64>() / n,
        freq_slope: trends.iter().map(|t| t.freq_slope).sum::<f64>() / n,
        freq_curvature: trends.iter().map(|t| t.freq_curvature).sum::<f64>() / n,
        damping_mean: trends.iter().map(|t| t.damping_mean).sum::<f64>() / n,
        damping_slope: trends.iter().map(|t| t.damping_slope).sum::<f64>() / n,
    };
    Ok(temperatures
        .iter()
        .map(|&t_c| {
            let (frequency, damping) = mean_trend.at(t_c);
            let mut freq_ss = 0.0;
            let mut damp_ss = 0.0;
            for trend in trends {
                let (f, d) = trend.at(t_c);
                freq_ss += (f - frequency) * (f - frequency);
                damp_ss += (d - damping) * (d - damping);
            }
            TemperaturePrediction {
                temperature_c: t_c,
                frequency,
                damping,
                frequency_sd: (freq_ss / n).sqrt(),
                damping_sd: (damp_ss / n).sqrt(),
            }
        })
        .collect())
}

/// Normalised mean-squared error as a percentage:
/// 100·Σ(y−y*)² / (N·σ²_y) with σ²_y the population variance of the test
/// data. Values under 5 indicate a good fit.
pub fn nmse(test: &[f64], prediction: &[f64]) -> Result<f64, AnalysisError> {
    if test.is_empty() {
        return Err(AnalysisError::EmptyData);
    }
    if test.len() != prediction.len() {
        return Err(AnalysisError::LengthMismatch { left: test.len(), right: prediction.len() });
    }
    if test.iter().chain(prediction).any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFiniteInput);
    }
    let n = test.len() as f64;
    let mean = test.iter().sum::<f64>() / n;
    let ss_dev = test.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>();
    if ss_dev == 0.0 {
        return Err(AnalysisError::ConstantTestData);
    }
    let ss_err = test.iter().zip(prediction).map(|(y, p)| (y - p) * (y - p)).sum::<f64>();
    // N·σ²_y = ss_dev exactly, so the ratio needs no variance round-trip.
    Ok(100.0 * ss_err / ss_dev)
}
