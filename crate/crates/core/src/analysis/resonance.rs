//! Lorentzian resonance extraction and the Purcell power ratio.

use super::{AnalysisError, Spectrum};
use crate::fit::{levenberg_marquardt, FitOptions};
use serde::{Deserialize, Serialize};

/// A fitted cavity resonance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceFit {
    /// Center wavelength, nm.
    pub lambda0_nm: f64,
    /// Quality factor f0 / FWHM_f.
    pub q: f64,
    /// Peak power amplitude above background.
    pub amplitude: f64,
    /// Root-mean-square fit residual relative to the peak amplitude.
    pub residual: f64,
}

/// Least-squares Lorentzian fit of a power spectrum inside a wavelength band.
///
/// The model is `P(f) = A / (1 + ((f - f0) / (w/2))^2) + B`. Returns
/// `NoPeak` when the band maximum does not exceed 3x the band median
/// (no resonance present) or the fitted center leaves the band.
pub fn fit_resonance(
    spec: &Spectrum,
    band_nm: (f64, f64),
) -> Result<ResonanceFit, AnalysisError> {
    let (lo_nm, hi_nm) = if band_nm.0 <= band_nm.1 { band_nm } else { (band_nm.1, band_nm.0) };
    let f_lo = 1.0 / hi_nm;
    let f_hi = 1.0 / lo_nm;
    let idx = spec.band_indices(f_lo, f_hi);
    if idx.len() < 8 {
        return Err(AnalysisError::NoPeak);
    }
    let freqs: Vec<f64> = idx.iter().map(|&i| spec.frequency[i]).collect();
    let powers: Vec<f64> = idx.iter().map(|&i| spec.power[i]).collect();

    let mut sorted = powers.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let (pk, &pmax) = powers.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    if !(pmax > 3.0 * median) || pmax <= 0.0 {
        return Err(AnalysisError::NoPeak);
    }

    // Initial guesses from the data.
    let f0_init = freqs[pk];
    let b_init = median.min(pmax / 2.0);
    let a_init = pmax - b_init;
    let half = b_init + a_init / 2.0;
    let mut lo_i = pk;
    while lo_i > 0 && powers[lo_i] > half {
        lo_i -= 1;
    }
    let mut hi_i = pk;
    while hi_i < powers.len() - 1 && powers[hi_i] > half {
        hi_i += 1;
    }
    let w_init = ((freqs[hi_i] - freqs[lo_i]).abs()).max(
        (freqs[1] - freqs[0]).abs(), // at least one bin
    );

    let out = levenberg_marquardt(
        |p, r| {
            let (a, f0, w, b) = (p[0], p[1], p[2], p[3]);
            for (i, &f) in freqs.iter().enumerate() {
                let u = (f - f0) / (w.abs() / 2.0);
                r[i] = a / (1.0 + u * u) + b - powers[i];
            }
        },
        &[a_init, f0_init, w_init, b_init],
        freqs.len(),
        &FitOptions::default(),
    )?;
    let (a, f0, w) = (out.params[0], out.params[1], out.params[2].abs());
    if !(f0 >= f_lo && f0 <= f_hi) || a <= 0.0 || w <= 0.0 {
        return Err(AnalysisError::NoPeak);
    }
    Ok(ResonanceFit {
        lambda0_nm: 1.0 / f0,
        q: f0 / w,
        amplitude: a,
        residual: (out.cost / freqs.len() as f64).sqrt() / a,
    })
}

/// Purcell factor as a radiated-power ratio: cavity power over the power of
/// the same dipole at the same frequency in the homogeneous reference medium.
pub fn purcell_factor(p_cavity: f64, p_reference: f64) -> Result<f64, AnalysisError> {
    if p_reference <= 0.0 {
        return Err(AnalysisError::ZeroReference(p_reference));
    }
    Ok(p_cavity / p_reference)
}
