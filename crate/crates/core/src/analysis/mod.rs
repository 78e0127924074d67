//! Post-processing of monitor records into figures of merit: spectra,
//! resonance fits, Purcell ratios, near-field maps, far-field maps and
//! collection efficiency, plus a transfer-matrix oracle for validating the
//! time-domain solver against 1D structures.

mod farfield;
mod resonance;
mod spectrum;
mod tmm;

pub use farfield::{
    collection_efficiency, intensity_map, near_to_far, FarFieldMap, IntensityMap,
    NearToFarOptions, PhasorPlane, PlaneWindow,
};
pub use resonance::{fit_resonance, purcell_factor, ResonanceFit};
pub use spectrum::{time_to_spectrum, Spectrum, Window};
pub use tmm::{transfer_matrix_spectrum, SlabStack, TmmPoint};

use crate::fit::FitError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("time series too short: {len} samples (need >= 16)")]
    SeriesTooShort { len: usize },
    #[error("no resonance found in the requested band")]
    NoPeak,
    #[error("reference power is not positive: {0}")]
    ZeroReference(f64),
    #[error("frequency {0} not recorded by this monitor")]
    FrequencyNotRecorded(f64),
    #[error("monitor plane side {side_nm} nm is below 4 wavelengths ({min_nm} nm)")]
    PlaneTooSmall { side_nm: f64, min_nm: f64 },
    #[error("far-field map integrates to zero over the hemisphere")]
    EmptyFarField,
    #[error(transparent)]
    Fit(#[from] FitError),
}
