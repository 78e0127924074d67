//! Time series to power spectrum.

use super::AnalysisError;
use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Window {
    #[default]
    None,
    Hann,
}

/// One-sided power spectrum of a real time series.
///
/// Frequencies are in cycles per time unit (with c = 1 and lengths in nm,
/// a frequency f corresponds to a vacuum wavelength of 1/f nm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub frequency: Vec<f64>,
    pub power: Vec<f64>,
    pub window: Window,
}

impl Spectrum {
    pub fn wavelength_nm(&self, idx: usize) -> f64 {
        1.0 / self.frequency[idx]
    }

    /// Indices whose frequency falls inside `[f_lo, f_hi]`.
    pub fn band_indices(&self, f_lo: f64, f_hi: f64) -> Vec<usize> {
        self.frequency
            .iter()
            .enumerate()
            .filter(|(_, &f)| f >= f_lo && f <= f_hi)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Discrete Fourier transform of an (optionally windowed) probe series.
///
/// The amplitude convention approximates the continuous transform: each bin
/// holds `sum_n x_n w_n exp(i 2 pi f t_n) dt`, and power is its squared
/// magnitude. `t0` is the time of the first sample.
pub fn time_to_spectrum(
    series: &[f64],
    dt: f64,
    t0: f64,
    window: Window,
) -> Result<Spectrum, AnalysisError> {
    let n = series.len();
    if n < 16 {
        return Err(AnalysisError::SeriesTooShort { len: n });
    }
    let mut buf: Vec<Complex<f64>> = match window {
        Window::None => series.iter().map(|&x| Complex::new(x, 0.0)).collect(),
        Window::Hann => series
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let w = 0.5
                    * (1.0
                        - (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos());
                Complex::new(x * w, 0.0)
            })
            .collect(),
    };
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // The FFT computes sum_n x_n exp(-2 pi i k n / N); bin k of the forward
    // transform therefore corresponds to exp(+i 2 pi f t) at f = -k/(N dt).
    // For a real series the positive-frequency content sits in the mirrored
    // bins, so take bin N - k (k >= 1) and fold in the t0 phase via magnitude
    // invariance (power only).
    let half = n / 2;
    let mut frequency = Vec::with_capacity(half);
    let mut power = Vec::with_capacity(half);
    let _ = t0; // phase reference does not affect power
    for k in 0..half {
        let f = k as f64 / (n as f64 * dt);
        let amp = if k == 0 { buf[0] } else { buf[n - k] } * dt;
        frequency.push(f);
        power.push(amp.norm_sqr());
    }
    Ok(Spectrum { frequency, power, window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pure_sinusoid_concentrates_in_one_bin() {
        let n = 256;
        let dt = 1.0;
        let cycles = 16.0; // integer number of periods: no leakage
        let series: Vec<f64> =
            (0..n).map(|i| (2.0 * PI * cycles * i as f64 / n as f64).sin()).collect();
        let spec = time_to_spectrum(&series, dt, 0.0, Window::None).unwrap();
        let peak = spec
            .power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        assert_eq!(peak, 16);
        let rest: f64 =
            spec.power.iter().enumerate().filter(|(i, _)| *i != 16).map(|(_, p)| p).sum();
        assert!(rest < 1e-18 * spec.power[16] * spec.power.len() as f64);
    }

    #[test]
    fn zero_series_gives_zero_spectrum() {
        let spec = time_to_spectrum(&[0.0; 64], 0.5, 0.0, Window::Hann).unwrap();
        assert!(spec.power.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn short_series_is_rejected() {
        let err = time_to_spectrum(&[1.0; 8], 1.0, 0.0, Window::None).unwrap_err();
        assert!(matches!(err, AnalysisError::SeriesTooShort { len: 8 }));
    }

    #[test]
    fn damped_sinusoid_has_lorentzian_width() {
        // x(t) = exp(-t/tau) sin(2 pi f0 t): power FWHM = 1/(pi tau).
        let n = 16384;
        let dt = 1.0;
        let f0 = 0.05;
        let tau = 400.0;
        let series: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                (-t / tau).exp() * (2.0 * PI * f0 * t).sin()
            })
            .collect();
        let spec = time_to_spectrum(&series, dt, 0.0, Window::None).unwrap();
        // Measure FWHM around the peak by scanning half-maximum crossings.
        let (pk, &pmax) =
            spec.power.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let half = pmax / 2.0;
        let mut lo = pk;
        while lo > 0 && spec.power[lo] > half {
            lo -= 1;
        }
        let mut hi = pk;
        while hi < spec.power.len() - 1 && spec.power[hi] > half {
            hi += 1;
        }
        // Linear interpolation at the crossings.
        let f_lo = spec.frequency[lo]
            + (half - spec.power[lo]) / (spec.power[lo + 1] - spec.power[lo])
                * (spec.frequency[lo + 1] - spec.frequency[lo]);
        let f_hi = spec.frequency[hi - 1]
            + (half - spec.power[hi - 1]) / (spec.power[hi] - spec.power[hi - 1])
                * (spec.frequency[hi] - spec.frequency[hi - 1]);
        let fwhm = f_hi - f_lo;
        let expected = 1.0 / (PI * tau);
        assert!(
            (fwhm - expected).abs() / expected < 0.05,
            "fwhm {fwhm} vs expected {expected}"
        );
    }
}
