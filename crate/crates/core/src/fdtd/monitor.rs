//! Monitors: time probes, DFT planes and flux surfaces.
//!
//! Phasors accumulate as `sum field(t) exp(+i omega t) dt` with each sample
//! taken at its true leapfrog time (E at integer steps, H at half steps), so
//! no post-hoc staggering phase correction is needed. H components recorded
//! on a plane are averaged along the plane normal onto the E plane.

use crate::analysis::PhasorPlane;
use crate::fdtd::FdtdError;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    Ex,
    Ey,
    Ez,
    Hx,
    Hy,
    Hz,
}

impl Component {
    pub fn is_electric(self) -> bool {
        matches!(self, Component::Ex | Component::Ey | Component::Ez)
    }
}

/// Monitor description, in physical (nm) coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MonitorSpec {
    /// Record one field component at a point, every `stride` steps.
    TimeProbe { name: String, position_nm: [f64; 3], component: Component },
    /// Record tangential E/H (plus Ez) phasors on a z-normal plane spanning
    /// the interior region (or a centered square of the given half size).
    DftPlane {
        name: String,
        z_nm: f64,
        wavelengths_nm: Vec<f64>,
        half_size_nm: Option<f64>,
        /// Accumulate every `stride` steps (the band-limited fields are
        /// heavily oversampled at the Courant time step).
        stride: usize,
    },
    /// Net power through a closed axis-aligned box around `center_nm`.
    FluxBox {
        name: String,
        center_nm: [f64; 3],
        half_size_nm: [f64; 3],
        wavelengths_nm: Vec<f64>,
    },
}

impl MonitorSpec {
    pub fn name(&self) -> &str {
        match self {
            MonitorSpec::TimeProbe { name, .. } => name,
            MonitorSpec::DftPlane { name, .. } => name,
            MonitorSpec::FluxBox { name, .. } => name,
        }
    }

    pub fn validate(&self) -> Result<(), FdtdError> {
        let wl = match self {
            MonitorSpec::TimeProbe { .. } => return Ok(()),
            MonitorSpec::DftPlane { wavelengths_nm, .. } => wavelengths_nm,
            MonitorSpec::FluxBox { wavelengths_nm, .. } => wavelengths_nm,
        };
        if wl.is_empty() {
            return Err(FdtdError::BadScene(format!("monitor {} has no wavelengths", self.name())));
        }
        // Strictly increasing frequency = strictly decreasing wavelength.
        if !wl.windows(2).all(|w| w[1] < w[0]) && !wl.windows(2).all(|w| w[1] > w[0]) {
            return Err(FdtdError::BadScene(format!(
                "monitor {} wavelength list must be strictly monotonic",
                self.name()
            )));
        }
        Ok(())
    }
}

/// A recorded time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub component: Component,
    /// Time of the first sample.
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

/// Phasors of Ex, Ey, Ez, Hx, Hy on a z-normal plane, per wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct DftPlaneRecord {
    pub wavelengths_nm: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    pub z_nm: f64,
    /// Per wavelength, nx*ny arrays (j fastest).
    pub ex: Vec<Vec<C64>>,
    pub ey: Vec<Vec<C64>>,
    pub ez: Vec<Vec<C64>>,
    pub hx: Vec<Vec<C64>>,
    pub hy: Vec<Vec<C64>>,
}

impl DftPlaneRecord {
    pub fn wavelength_index(&self, wavelength_nm: f64) -> Result<usize, FdtdError> {
        self.wavelengths_nm
            .iter()
            .position(|&w| (w - wavelength_nm).abs() < 1e-9 * wavelength_nm)
            .ok_or(FdtdError::FrequencyNotRecorded(wavelength_nm))
    }

    /// Nearest recorded wavelength to the request.
    pub fn nearest_wavelength(&self, wavelength_nm: f64) -> f64 {
        *self
            .wavelengths_nm
            .iter()
            .min_by(|a, b| {
                (*a - wavelength_nm).abs().total_cmp(&(*b - wavelength_nm).abs())
            })
            .expect("validated non-empty")
    }

    /// View one wavelength as an analysis-ready plane with Yee staggering
    /// offsets attached.
    pub fn phasor_plane(&self, wavelength_nm: f64) -> Result<PhasorPlane, FdtdError> {
        let w = self.wavelength_index(wavelength_nm)?;
        let half = self.spacing / 2.0;
        Ok(PhasorPlane {
            nx: self.nx,
            ny: self.ny,
            spacing: self.spacing,
            z0: self.z_nm,
            ex: self.ex[w].clone(),
            ey: self.ey[w].clone(),
            ez: Some(self.ez[w].clone()),
            hx: self.hx[w].clone(),
            hy: self.hy[w].clone(),
            ex_offset: [half, 0.0],
            ey_offset: [0.0, half],
            ez_offset: [0.0, 0.0],
            hx_offset: [0.0, half],
            hy_offset: [half, 0.0],
        })
    }
}

/// Power spectrum through a flux surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxRecord {
    pub wavelengths_nm: Vec<f64>,
    /// Net outward power, scaled W.
    pub power: Vec<f64>,
}

impl FluxRecord {
    /// Power at a recorded frequency; errors if the frequency was not in
    /// the monitor's list.
    pub fn power_at(&self, wavelength_nm: f64) -> Result<f64, FdtdError> {
        self.wavelengths_nm
            .iter()
            .position(|&w| (w - wavelength_nm).abs() < 1e-9 * wavelength_nm)
            .map(|i| self.power[i])
            .ok_or(FdtdError::FrequencyNotRecorded(wavelength_nm))
    }
}

/// Everything a run produced.
#[derive(Debug, Clone, Default)]
pub struct MonitorRecords {
    pub probes: BTreeMap<String, ProbeRecord>,
    pub planes: BTreeMap<String, DftPlaneRecord>,
    pub fluxes: BTreeMap<String, FluxRecord>,
    /// Injected current samples per source, at half-step times.
    pub source_currents: Vec<Vec<f64>>,
    pub dt: f64,
    pub steps_run: usize,
    /// First step index at which every source has turned off.
    pub source_off_step: usize,
}
