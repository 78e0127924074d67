//! ODMR trace synthesis and double-Gaussian fitting.

use super::{spin_resonances, SpinError, SpinParams};
use crate::fit::{levenberg_marquardt, FitOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

const FWHM_TO_SIGMA: f64 = 2.354_820_045_030_949; // 2 sqrt(2 ln 2)

/// A normalized ODMR trace: photoluminescence contrast versus drive
/// frequency, baseline 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdmrSpectrum {
    pub freq_ghz: Vec<f64>,
    pub contrast: Vec<f64>,
    /// Photon rate, counts/s.
    pub rate_cps: f64,
    /// Dwell time per frequency point, s.
    pub dwell_s: f64,
    /// RNG seed used for synthesis; None for noiseless or measured data.
    pub seed: Option<u64>,
}

impl OdmrSpectrum {
    pub fn validate(&self) -> Result<(), SpinError> {
        if self.freq_ghz.len() != self.contrast.len() || self.freq_ghz.len() < 2 {
            return Err(SpinError::InvalidSeries("frequency/contrast length mismatch".into()));
        }
        if !self.freq_ghz.windows(2).all(|w| w[1] > w[0]) {
            return Err(SpinError::InvalidSeries("frequencies must strictly increase".into()));
        }
        if !self.contrast.iter().all(|&v| v > 0.0) {
            return Err(SpinError::InvalidSeries("contrast values must be positive".into()));
        }
        Ok(())
    }
}

/// Fitted double-Gaussian ODMR parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdmrFit {
    pub nu_minus_ghz: f64,
    pub nu_plus_ghz: f64,
    pub contrast_minus: f64,
    pub contrast_plus: f64,
    pub fwhm_minus_ghz: f64,
    pub fwhm_plus_ghz: f64,
    /// Row-major 6x6 covariance of
    /// (nu-, nu+, C-, C+, fwhm-, fwhm+).
    pub covariance: Vec<f64>,
    /// RMS residual of the fit.
    pub residual: f64,
}

fn double_gaussian(nu: f64, p: &[f64]) -> f64 {
    let (n1, n2, c1, c2, w1, w2) = (p[0], p[1], p[2], p[3], p[4], p[5]);
    let s1 = w1.abs() / FWHM_TO_SIGMA;
    let s2 = w2.abs() / FWHM_TO_SIGMA;
    1.0 - c1 * (-((nu - n1) / s1).powi(2) / 2.0).exp()
        - c2 * (-((nu - n2) / s2).powi(2) / 2.0).exp()
}

/// Synthesize an ODMR spectrum for a spin in field `b_mt`.
///
/// The ideal trace is `1 - C sum_i exp(-(nu - nu_i)^2 / 2 sigma^2)` with
/// `sigma = fwhm / (2 sqrt(2 ln 2))`. With a seed, each point is drawn from
/// a Poisson law with mean `y * rate * dwell` and renormalized; without a
/// seed the trace is noiseless.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_odmr(
    p: &SpinParams,
    b_mt: [f64; 3],
    freq_ghz: &[f64],
    contrast: f64,
    fwhm_ghz: f64,
    rate_cps: f64,
    dwell_s: f64,
    seed: Option<u64>,
) -> Result<OdmrSpectrum, SpinError> {
    if !(0.0..1.0).contains(&contrast) {
        return Err(SpinError::InvalidContrast(contrast));
    }
    if !(rate_cps > 0.0) || !(dwell_s > 0.0) {
        return Err(SpinError::NonPositiveRate { rate: rate_cps, dwell: dwell_s });
    }
    if !(fwhm_ghz > 0.0) {
        return Err(SpinError::InvalidSeries(format!("fwhm must be positive, got {fwhm_ghz}")));
    }
    let (nu1, nu2) = spin_resonances(p, b_mt)?;
    let params = [nu1, nu2, contrast, contrast, fwhm_ghz, fwhm_ghz];
    let ideal: Vec<f64> = freq_ghz.iter().map(|&nu| double_gaussian(nu, &params)).collect();
    let values = match seed {
        None => ideal,
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let norm = rate_cps * dwell_s;
            ideal
                .iter()
                .map(|&y| {
                    let counts =
                        Poisson::new((y * norm).max(f64::MIN_POSITIVE)).unwrap().sample(&mut rng);
                    // Keep the trace strictly positive even if a point draws
                    // zero counts.
                    counts.max(0.5) / norm
                })
                .collect()
        }
    };
    let spectrum = OdmrSpectrum {
        freq_ghz: freq_ghz.to_vec(),
        contrast: values,
        rate_cps,
        dwell_s,
        seed,
    };
    spectrum.validate()?;
    Ok(spectrum)
}

/// Dip detection on a 5-point moving average: the deepest minimum, then the
/// deepest minimum outside the first dip's footprint. Dips must exceed 3x
/// the noise floor (the RMS of the raw-minus-smoothed residual).
///
/// Returns (dip indices, per-dip half-width in samples, smoothed trace,
/// noise floor). The half-width is the smaller of the two one-sided
/// half-depth crossings, which stays clean when two dips merge.
fn detect_dips(y: &[f64]) -> (Vec<(usize, usize)>, Vec<f64>, f64) {
    let n = y.len();
    let smoothed: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(n - 1);
            y[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let noise_floor = {
        let var =
            y.iter().zip(&smoothed).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n as f64;
        var.sqrt()
    };
    // Baseline from the upper quintile: robust even when the dips cover
    // most of the scan.
    let baseline = {
        let mut sorted = smoothed.clone();
        sorted.sort_by(f64::total_cmp);
        sorted[(sorted.len() * 4) / 5]
    };
    let half_width = |i: usize| -> usize {
        let half = baseline - (baseline - smoothed[i]) / 2.0;
        let mut lo = i;
        while lo > 0 && smoothed[lo] < half {
            lo -= 1;
        }
        let mut hi = i;
        while hi < n - 1 && smoothed[hi] < half {
            hi += 1;
        }
        (i - lo).min(hi - i).max(1)
    };
    let argmin = |mask: Option<(usize, usize)>| -> Option<usize> {
        (0..n)
            .filter(|&i| mask.map_or(true, |(lo, hi)| i < lo || i > hi))
            .min_by(|&a, &b| smoothed[a].total_cmp(&smoothed[b]))
    };
    let mut kept = Vec::new();
    if let Some(i1) = argmin(None) {
        if baseline - smoothed[i1] > 3.0 * noise_floor {
            let w1 = half_width(i1);
            kept.push((i1, w1));
            let mask = (i1.saturating_sub(2 * w1), (i1 + 2 * w1).min(n - 1));
            if let Some(i2) = argmin(Some(mask)) {
                if baseline - smoothed[i2] > 3.0 * noise_floor {
                    kept.push((i2, half_width(i2)));
                }
            }
        }
    }
    (kept, smoothed, noise_floor)
}

/// Fit the double-Gaussian dip model to an ODMR spectrum.
///
/// Without an initial guess, dips are auto-detected on a 5-point-smoothed
/// trace with a 3x-noise-floor threshold.
pub fn fit_odmr(s: &OdmrSpectrum, init: Option<&OdmrFit>) -> Result<OdmrFit, SpinError> {
    s.validate()?;
    let y = &s.contrast;
    let nu = &s.freq_ghz;
    let span = nu[nu.len() - 1] - nu[0];

    let p0 = match init {
        Some(f) => [
            f.nu_minus_ghz,
            f.nu_plus_ghz,
            f.contrast_minus,
            f.contrast_plus,
            f.fwhm_minus_ghz,
            f.fwhm_plus_ghz,
        ],
        None => {
            let (dips, smoothed, _) = detect_dips(y);
            if dips.is_empty() {
                return Err(SpinError::NoResonance);
            }
            let df = span / (nu.len() - 1) as f64;
            let depth = |i: usize| (1.0 - smoothed[i]).max(1e-6);
            let width = |w: usize| (2 * w + 1) as f64 * df;
            match dips.as_slice() {
                [(i1, w1)] => {
                    // Single dip: start the two components slightly apart.
                    let w = width(*w1);
                    [
                        nu[*i1] - w / 4.0,
                        nu[*i1] + w / 4.0,
                        depth(*i1) / 2.0,
                        depth(*i1) / 2.0,
                        w,
                        w,
                    ]
                }
                [a, b, ..] => {
                    let (lo, hi) = if a.0 <= b.0 { (a, b) } else { (b, a) };
                    [nu[lo.0], nu[hi.0], depth(lo.0), depth(hi.0), width(lo.1), width(hi.1)]
                }
                [] => unreachable!(),
            }
        }
    };

    let out = levenberg_marquardt(
        |p, r| {
            for (i, (&x, &obs)) in nu.iter().zip(y).enumerate() {
                r[i] = double_gaussian(x, p) - obs;
            }
        },
        &p0,
        nu.len(),
        &FitOptions::default(),
    )?;
    let p = out.params;
    let mut fit = OdmrFit {
        nu_minus_ghz: p[0],
        nu_plus_ghz: p[1],
        contrast_minus: p[2],
        contrast_plus: p[3],
        fwhm_minus_ghz: p[4].abs(),
        fwhm_plus_ghz: p[5].abs(),
        covariance: out.covariance,
        residual: (out.cost / nu.len() as f64).sqrt(),
    };
    if fit.nu_minus_ghz > fit.nu_plus_ghz {
        std::mem::swap(&mut fit.nu_minus_ghz, &mut fit.nu_plus_ghz);
        std::mem::swap(&mut fit.contrast_minus, &mut fit.contrast_plus);
        std::mem::swap(&mut fit.fwhm_minus_ghz, &mut fit.fwhm_plus_ghz);
    }
    for c in [fit.contrast_minus, fit.contrast_plus] {
        if !(0.0..1.0).contains(&c) {
            return Err(SpinError::NoResonance);
        }
    }
    if fit.fwhm_minus_ghz <= 0.0 || fit.fwhm_plus_ghz <= 0.0 {
        return Err(SpinError::NoResonance);
    }
    Ok(fit)
}
