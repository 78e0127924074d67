//! Source waveforms.

use serde::{Deserialize, Serialize};

/// Gaussian-modulated sinusoid covering a wavelength band.
///
/// `j(t) = amplitude * sin(2 pi f0 (t - t0)) * exp(-(t - t0)^2 / 2 tau^2)`
/// with the envelope width set by the fractional bandwidth and the delay
/// `t0 = cutoff_sigmas * tau` so the turn-on is smooth from zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPulse {
    /// Center frequency, cycles per length unit (1/nm with c = 1).
    pub center_frequency: f64,
    /// Full fractional bandwidth (intensity FWHM of the band / f0).
    pub fractional_bandwidth: f64,
    pub amplitude: f64,
    /// Envelope half-width count before/after the peak; the source is
    /// considered off after `t0 + cutoff_sigmas * tau`.
    pub cutoff_sigmas: f64,
}

impl GaussianPulse {
    /// Pulse spanning `[lambda_lo, lambda_hi]` nm.
    pub fn covering_band(lambda_lo_nm: f64, lambda_hi_nm: f64, amplitude: f64) -> Self {
        assert!(lambda_lo_nm > 0.0 && lambda_hi_nm > lambda_lo_nm);
        let f_lo = 1.0 / lambda_hi_nm;
        let f_hi = 1.0 / lambda_lo_nm;
        let f0 = 0.5 * (f_lo + f_hi);
        GaussianPulse {
            center_frequency: f0,
            fractional_bandwidth: (f_hi - f_lo) / f0,
            amplitude,
            cutoff_sigmas: 6.0,
        }
    }

    /// Envelope standard deviation in time: the frequency-domain envelope
    /// std is df = f0 * bw / (2 sqrt(2 ln 2)), and tau = 1 / (2 pi df).
    pub fn tau(&self) -> f64 {
        let df = self.center_frequency * self.fractional_bandwidth / (2.0 * (2.0f64.ln() * 2.0).sqrt());
        1.0 / (2.0 * std::f64::consts::PI * df)
    }

    /// Delay of the envelope peak.
    pub fn t0(&self) -> f64 {
        self.cutoff_sigmas * self.tau()
    }

    /// Time after which the source is treated as off.
    pub fn turn_off_time(&self) -> f64 {
        self.t0() + self.cutoff_sigmas * self.tau()
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let tau = self.tau();
        let u = t - self.t0();
        if u.abs() >= self.cutoff_sigmas * tau {
            return 0.0;
        }
        self.amplitude
            * (2.0 * std::f64::consts::PI * self.center_frequency * u).sin()
            * (-u * u / (2.0 * tau * tau)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_pulse_centers_between_edges() {
        let p = GaussianPulse::covering_band(700.0, 1000.0, 1.0);
        let lambda0 = 1.0 / p.center_frequency;
        assert!((lambda0 - 823.5).abs() < 1.0, "lambda0 = {lambda0}");
        assert!(p.fractional_bandwidth > 0.0);
    }

    #[test]
    fn pulse_starts_and_ends_at_zero() {
        let p = GaussianPulse::covering_band(700.0, 1000.0, 2.0);
        assert_eq!(p.evaluate(0.0), 0.0);
        assert_eq!(p.evaluate(2.0 * p.turn_off_time()), 0.0);
        // Non-trivial in the middle.
        let mid = p.t0() + 0.25 / p.center_frequency;
        assert!(p.evaluate(mid).abs() > 0.0);
    }
}
