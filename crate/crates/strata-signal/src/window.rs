use crate::SignalError;

/// Taper applied to each block before its FFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Rectangular,
    Hann,
}

/// Symmetric Hann window, `w[i] = 0.5(1 − cos(2πi/(n−1)))`, endpoints zero.
pub fn hann_window(n: usize) -> Result<Vec<f64>, SignalError> {
    if n < 2 {
        return Err(SignalError::WindowLength { n });
    }
    let denom = (n - 1) as f64;
    Ok((0..n)
        .map(|i| 0.5 * (1.0 - (std::f64::consts::TAU * i as f64 / denom).cos()))
        .collect())
}

/// Window coefficients for `kind` at length `n`.
pub fn window_values(kind: WindowKind, n: usize) -> Result<Vec<f64>, SignalError> {
    match kind {
        WindowKind::Rectangular => {
            if n < 2 {
                return Err(SignalError::WindowLength { n });
            }
            Ok(vec![1.0; n])
        }
        WindowKind::Hann => hann_window(n),
    }
}
