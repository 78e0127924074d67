//! Spin-1 ground-state model of the negatively charged boron vacancy and the
//! magnetometry chain built on it: ODMR synthesis and fitting, magnetic
//! sensitivity, Zeeman inversion, and the two remote-sensing scenarios
//! (steel shielding thickness and field orientation).

mod model;
mod odmr;
mod sensing;

pub use model::{eigenvalue_trace, field_from_shift, spin_resonances, zeeman_shift};
pub use odmr::{fit_odmr, synthesize_odmr, OdmrFit, OdmrSpectrum};
pub use sensing::{
    angle_scenario, sensitivity, steel_scenario, AngleFit, ScenarioPoint, ScenarioSeries,
    SensitivityReport, SteelPoint, GAUSSIAN_PROFILE_FACTOR,
};

use crate::constants;
use crate::fit::FitError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("invalid spin parameters: {0}")]
    InvalidParams(String),
    #[error("contrast must lie in [0, 1), got {0}")]
    InvalidContrast(f64),
    #[error("photon rate and dwell time must be positive, got rate {rate}, dwell {dwell}")]
    NonPositiveRate { rate: f64, dwell: f64 },
    #[error("no resonance dip exceeds 3x the noise floor")]
    NoResonance,
    #[error("fit did not converge")]
    NoConvergence,
    #[error("scenario series has no reference row at thickness 0")]
    MissingReference,
    #[error("angle span {span_deg} deg is below the required 60 deg (or fewer than 5 rows)")]
    InsufficientSpan { span_deg: f64 },
    #[error("invalid scenario series: {0}")]
    InvalidSeries(String),
}

impl From<FitError> for SpinError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::NoConvergence { .. } => SpinError::NoConvergence,
            FitError::Degenerate(_) => SpinError::NoResonance,
        }
    }
}

/// Ground-state spin-1 parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinParams {
    /// Axial zero-field splitting D, GHz.
    pub d_ghz: f64,
    /// Transverse zero-field splitting E, GHz.
    pub e_ghz: f64,
    /// Electron g-factor.
    pub g_factor: f64,
    /// Gyromagnetic ratio, MHz/mT. Must agree with `g_factor * mu_B / h`
    /// within 0.1%; the conventional rounded value 28 MHz/mT is admissible.
    pub gamma_mhz_per_mt: f64,
    /// Quantization (dipole) axis, out of the membrane plane by default.
    pub dipole_axis: [f64; 3],
}

impl SpinParams {
    /// D = 3.45 GHz (midpoint of the observed ~3.3 / ~3.6 GHz transitions),
    /// E = 0, free-electron g, gamma derived from g.
    pub fn vb_defaults() -> Self {
        let g = constants::G_ELECTRON;
        SpinParams {
            d_ghz: 3.45,
            e_ghz: 0.0,
            g_factor: g,
            gamma_mhz_per_mt: constants::gyromagnetic_ratio_mhz_per_mt(g),
            dipole_axis: [0.0, 0.0, 1.0],
        }
    }

    /// Override the gyromagnetic ratio (e.g. to the conventional 28 MHz/mT).
    pub fn with_gamma(mut self, gamma_mhz_per_mt: f64) -> Result<Self, SpinError> {
        self.gamma_mhz_per_mt = gamma_mhz_per_mt;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SpinError> {
        if !(self.d_ghz > 0.0) {
            return Err(SpinError::InvalidParams(format!("D must be > 0, got {}", self.d_ghz)));
        }
        if !(self.e_ghz.abs() < self.d_ghz) {
            return Err(SpinError::InvalidParams(format!(
                "|E| = {} must be below D = {}",
                self.e_ghz.abs(),
                self.d_ghz
            )));
        }
        let derived = constants::gyromagnetic_ratio_mhz_per_mt(self.g_factor);
        let rel = (self.gamma_mhz_per_mt - derived).abs() / derived;
        if rel > 1e-3 {
            return Err(SpinError::InvalidParams(format!(
                "gamma = {} MHz/mT deviates from g mu_B / h = {derived} by {:.2}%",
                self.gamma_mhz_per_mt,
                rel * 100.0
            )));
        }
        let norm = self.dipole_axis.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(SpinError::InvalidParams("dipole axis must be nonzero".into()));
        }
        Ok(())
    }

    /// Gyromagnetic ratio in GHz/mT.
    pub fn gamma_ghz_per_mt(&self) -> f64 {
        self.gamma_mhz_per_mt * 1e-3
    }
}

impl Default for SpinParams {
    fn default() -> Self {
        SpinParams::vb_defaults()
    }
}
