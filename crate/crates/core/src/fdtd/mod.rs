//! Time-domain Maxwell solvers on Yee grids (1D, 2D, 3D) with CPML
//! absorbers, soft dipole sources, and time/DFT/flux monitors.
//!
//! Scaled units throughout: lengths in nm, c = 1, vacuum impedance 1.

mod accum;
mod cpml;
mod monitor;
mod solver1d;
mod solver2d;
mod solver3d;
mod source;
mod waveform;

pub use cpml::{AxisProfile, CpmlError, CpmlParams};
pub use monitor::{
    Component, DftPlaneRecord, FluxRecord, MonitorRecords, MonitorSpec, ProbeRecord,
};
pub use solver1d::Solver1d;
pub use solver2d::{Polarization2d, Solver2d};
pub use solver3d::{Boundary, RunControl, Solver3d};
pub use source::DipoleSource;
pub use waveform::GaussianPulse;

use crate::geometry::PermittivityGrid;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FdtdError {
    #[error("Courant number must lie in (0, 1], got {s}")]
    CourantViolation { s: f64 },
    #[error("axis {axis} has only {interior} non-PML cells (need >= 4)")]
    DomainTooSmall { axis: usize, interior: usize },
    #[error("numerical blow-up at step {step}: max |field| = {max_abs:.3e}")]
    NumericalBlowup { step: usize, max_abs: f64 },
    #[error("frequency for wavelength {0} nm was not recorded")]
    FrequencyNotRecorded(f64),
    #[error(transparent)]
    Cpml(#[from] CpmlError),
    #[error("invalid scene: {0}")]
    BadScene(String),
}

/// Run a 3D scene to completion and collect all monitor output.
pub fn run_scene(
    grid: &PermittivityGrid,
    boundary: Boundary,
    courant: f64,
    sources: &[DipoleSource],
    monitors: &[MonitorSpec],
    control: RunControl,
) -> Result<MonitorRecords, FdtdError> {
    let mut solver = Solver3d::new(grid, boundary, courant)?;
    solver.run_impl(sources, monitors, control)
}
