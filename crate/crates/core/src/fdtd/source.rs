//! Soft (additive) electric point-dipole sources.

use super::waveform::GaussianPulse;
use super::FdtdError;
use serde::{Deserialize, Serialize};

/// An electric point dipole driven by a Gaussian-modulated sinusoid.
///
/// The waveform gives the time derivative of the dipole moment (the total
/// current moment); injection divides by the cell volume to form a current
/// density at the snapped E nodes. Soft injection adds to the E update and
/// lets scattered fields pass through the source cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipoleSource {
    pub position_nm: [f64; 3],
    pub polarization: [f64; 3],
    pub waveform: GaussianPulse,
}

impl DipoleSource {
    pub fn validate(&self) -> Result<(), FdtdError> {
        let norm = self.polarization.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(FdtdError::BadScene("source polarization must be nonzero".into()));
        }
        if !(self.waveform.center_frequency > 0.0 && self.waveform.fractional_bandwidth > 0.0) {
            return Err(FdtdError::BadScene(
                "source center frequency and bandwidth must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Unit polarization vector.
    pub fn unit_polarization(&self) -> [f64; 3] {
        let norm = self.polarization.iter().map(|c| c * c).sum::<f64>().sqrt();
        [
            self.polarization[0] / norm,
            self.polarization[1] / norm,
            self.polarization[2] / norm,
        ]
    }
}
