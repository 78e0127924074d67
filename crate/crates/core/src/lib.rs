//! Design and evaluation of hole-type circular Bragg grating (CBG) cavities
//! in thin hBN membranes, plus the spin-defect magnetometry chain that such
//! cavities feed: FDTD electromagnetics, far-field projection, collection
//! efficiency, ODMR synthesis/fitting, magnetic sensitivity, and field
//! reconstruction.

pub mod analysis;
pub mod constants;
pub mod fdtd;
pub mod fit;
pub mod geometry;
pub mod reference;
pub mod spin;
