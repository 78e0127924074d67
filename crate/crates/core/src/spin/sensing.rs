//! Magnetic sensitivity and the two remote-sensing scenario analyses.

use super::{field_from_shift, OdmrFit, SpinError, SpinParams};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Line-shape factor for a Gaussian resonance profile.
pub const GAUSSIAN_PROFILE_FACTOR: f64 = 0.70;

/// Magnetic field sensitivity per resonance,
/// `eta_B = P_F * (1/gamma_e) * dnu_lw / (C sqrt(R))` in T/sqrt(Hz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub eta_minus_t_per_sqrt_hz: f64,
    pub eta_plus_t_per_sqrt_hz: f64,
    /// The better (smaller) of the two.
    pub eta_best_t_per_sqrt_hz: f64,
    pub profile_factor: f64,
    pub rate_cps: f64,
}

fn eta_single(fwhm_ghz: f64, contrast: f64, rate_cps: f64, gamma_mhz_per_mt: f64) -> f64 {
    // gamma in Hz/T = gamma_mhz_per_mt * 1e9; fwhm in Hz = fwhm_ghz * 1e9.
    GAUSSIAN_PROFILE_FACTOR * fwhm_ghz / (gamma_mhz_per_mt * contrast * rate_cps.sqrt())
}

/// Evaluate the sensitivity of both fitted resonances.
pub fn sensitivity(fit: &OdmrFit, rate_cps: f64, p: &SpinParams) -> Result<SensitivityReport, SpinError> {
    p.validate()?;
    if !(rate_cps > 0.0) {
        return Err(SpinError::NonPositiveRate { rate: rate_cps, dwell: 1.0 });
    }
    for (c, w) in [
        (fit.contrast_minus, fit.fwhm_minus_ghz),
        (fit.contrast_plus, fit.fwhm_plus_ghz),
    ] {
        if !(c > 0.0 && c < 1.0) || !(w > 0.0) {
            return Err(SpinError::InvalidSeries(format!(
                "fit invariants violated: contrast {c}, linewidth {w}"
            )));
        }
    }
    let minus = eta_single(fit.fwhm_minus_ghz, fit.contrast_minus, rate_cps, p.gamma_mhz_per_mt);
    let plus = eta_single(fit.fwhm_plus_ghz, fit.contrast_plus, rate_cps, p.gamma_mhz_per_mt);
    Ok(SensitivityReport {
        eta_minus_t_per_sqrt_hz: minus,
        eta_plus_t_per_sqrt_hz: plus,
        eta_best_t_per_sqrt_hz: minus.min(plus),
        profile_factor: GAUSSIAN_PROFILE_FACTOR,
        rate_cps,
    })
}

/// One row of a measured sensing series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPoint {
    /// Steel thickness (mm) or rotation angle (deg), per scenario.
    pub x: f64,
    pub freq_ghz: f64,
    pub freq_err_ghz: Option<f64>,
}

/// A monotonic series of fitted resonance frequencies versus an independent
/// variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSeries {
    pub points: Vec<ScenarioPoint>,
}

impl ScenarioSeries {
    pub fn new(points: Vec<ScenarioPoint>) -> Result<Self, SpinError> {
        if points.len() < 2 {
            return Err(SpinError::InvalidSeries(format!(
                "need at least 2 rows, got {}",
                points.len()
            )));
        }
        let increasing = points.windows(2).all(|w| w[1].x > w[0].x);
        let decreasing = points.windows(2).all(|w| w[1].x < w[0].x);
        if !increasing && !decreasing {
            return Err(SpinError::InvalidSeries(
                "independent variable must be strictly monotonic".into(),
            ));
        }
        Ok(ScenarioSeries { points })
    }
}

/// Field change inferred at one steel thickness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteelPoint {
    pub thickness_mm: f64,
    pub delta_nu_ghz: f64,
    pub delta_b_mt: f64,
}

/// Convert a resonance-vs-steel-thickness series into field changes relative
/// to the bare-magnet reference (0 mm row).
pub fn steel_scenario(
    series: &ScenarioSeries,
    p: &SpinParams,
) -> Result<Vec<SteelPoint>, SpinError> {
    p.validate()?;
    let nu_ref = series
        .points
        .iter()
        .find(|pt| pt.x == 0.0)
        .ok_or(SpinError::MissingReference)?
        .freq_ghz;
    Ok(series
        .points
        .iter()
        .map(|pt| {
            let delta_nu = (nu_ref - pt.freq_ghz).abs();
            SteelPoint {
                thickness_mm: pt.x,
                delta_nu_ghz: delta_nu,
                delta_b_mt: field_from_shift(delta_nu, p),
            }
        })
        .collect())
}

/// Sinusoidal fit of a resonance-vs-rotation-angle series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleFit {
    /// Field magnitude |c1| / gamma, mT.
    pub b_mt: f64,
    /// Phase offset phi0, degrees; theta = 0 means the field is along the
    /// out-of-plane dipole axis.
    pub phase_offset_deg: f64,
    /// Baseline c0, GHz.
    pub baseline_ghz: f64,
    /// RMS residual, GHz.
    pub residual_ghz: f64,
}

/// Least-squares fit of `nu(theta) = c0 + c1 cos(theta - phi0)`, linearized
/// as `c0 + a cos(theta) + b sin(theta)`; the field magnitude follows from
/// the projection model `B_par(theta) = B cos(theta)` onto the dipole axis.
pub fn angle_scenario(series: &ScenarioSeries, p: &SpinParams) -> Result<AngleFit, SpinError> {
    p.validate()?;
    if series.points.len() < 5 {
        return Err(SpinError::InsufficientSpan { span_deg: 0.0 });
    }
    let xs: Vec<f64> = series.points.iter().map(|pt| pt.x).collect();
    let span =
        xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
    if span < 60.0 {
        return Err(SpinError::InsufficientSpan { span_deg: span });
    }
    // Normal equations for the 3-parameter linear model.
    let mut ata = Matrix3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    for pt in &series.points {
        let t = pt.x.to_radians();
        let row = Vector3::new(1.0, t.cos(), t.sin());
        ata += row * row.transpose();
        aty += row * pt.freq_ghz;
    }
    let sol = ata
        .cholesky()
        .map(|ch| ch.solve(&aty))
        .ok_or(SpinError::NoConvergence)?;
    let (c0, a, b) = (sol[0], sol[1], sol[2]);
    let c1 = a.hypot(b);
    let phi0 = b.atan2(a);
    let mut ss = 0.0;
    for pt in &series.points {
        let t = pt.x.to_radians();
        let model = c0 + a * t.cos() + b * t.sin();
        ss += (model - pt.freq_ghz).powi(2);
    }
    Ok(AngleFit {
        b_mt: c1 / p.gamma_ghz_per_mt(),
        phase_offset_deg: phi0.to_degrees(),
        baseline_ghz: c0,
        residual_ghz: (ss / series.points.len() as f64).sqrt(),
    })
}
