//! Hole-type circular Bragg grating layouts.
//!
//! A cavity is a central disk of radius `R` surrounded by `n_rings`
//! concentric rings of nanoholes etched through a thin membrane. Ring `k`
//! sits at radius `rho_k = R + (k - 1/2) * r` and carries
//! `N_k = round(2 pi rho_k / l)` holes of radius `a`, uniformly spaced in
//! angle so the circle closes exactly.

mod raster;

pub use raster::{
    pristine_slab, rasterize, rasterize_with_subsampling, Dimensionality, PermittivityGrid,
    DEFAULT_SUBSAMPLES,
};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("resolution too coarse: cell size {delta} nm exceeds hole radius {hole_radius} nm")]
    ResolutionTooCoarse { delta: f64, hole_radius: f64 },
}

/// Parametric description of a hole-CBG cavity. Lengths in nm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityDesign {
    /// Central disk radius.
    pub disk_radius: f64,
    /// Radial interval between hole rings.
    pub radial_pitch: f64,
    /// Tangential interval between holes within a ring.
    pub tangential_pitch: f64,
    /// Hole radius.
    pub hole_radius: f64,
    /// Membrane thickness.
    pub thickness: f64,
    /// Number of hole rings.
    pub n_rings: usize,
    /// Membrane refractive index.
    pub n_membrane: f64,
    /// Surrounding-medium refractive index.
    pub n_env: f64,
}

impl CavityDesign {
    /// The optimised hole-CBG for a 200 nm hBN membrane.
    pub fn hbn_default() -> Self {
        CavityDesign {
            disk_radius: 645.0,
            radial_pitch: 498.0,
            tangential_pitch: 224.0,
            hole_radius: 75.0,
            thickness: 200.0,
            n_rings: 6,
            n_membrane: 2.1,
            n_env: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let err = |msg: String| Err(GeometryError::InvalidDesign(msg));
        for (name, v) in [
            ("disk_radius", self.disk_radius),
            ("radial_pitch", self.radial_pitch),
            ("tangential_pitch", self.tangential_pitch),
            ("hole_radius", self.hole_radius),
            ("thickness", self.thickness),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return err(format!("{name} must be strictly positive, got {v}"));
            }
        }
        if 2.0 * self.hole_radius >= self.tangential_pitch {
            return err(format!(
                "holes overlap tangentially: 2a = {} >= l = {}",
                2.0 * self.hole_radius,
                self.tangential_pitch
            ));
        }
        if 2.0 * self.hole_radius >= self.radial_pitch {
            return err(format!(
                "holes overlap radially: 2a = {} >= r = {}",
                2.0 * self.hole_radius,
                self.radial_pitch
            ));
        }
        if !(self.n_membrane >= self.n_env) || !(self.n_env >= 1.0) {
            return err(format!(
                "index ordering violated: need n_membrane >= n_env >= 1, got {} and {}",
                self.n_membrane, self.n_env
            ));
        }
        Ok(())
    }

    /// Radius of ring `k` (1-based): R + (k - 1/2) * r.
    pub fn ring_radius(&self, k: usize) -> f64 {
        self.disk_radius + (k as f64 - 0.5) * self.radial_pitch
    }

    /// Lateral extent of the patterned region: outer edge of the last ring cell.
    pub fn pattern_radius(&self) -> f64 {
        self.disk_radius + self.n_rings as f64 * self.radial_pitch
    }
}

/// One ring of the layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub radius: f64,
    pub hole_count: usize,
    /// Angular offset of the first hole, radians.
    pub angular_offset: f64,
}

/// A hole center in Cartesian nm, tagged with its ring (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub x: f64,
    pub y: f64,
    pub ring: usize,
}

/// Generated hole positions for a cavity design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleLayout {
    pub rings: Vec<Ring>,
    pub holes: Vec<Hole>,
}

impl HoleLayout {
    pub fn empty() -> Self {
        HoleLayout { rings: Vec::new(), holes: Vec::new() }
    }

    /// Smallest center-to-center distance between any two holes.
    pub fn min_pair_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (i, h) in self.holes.iter().enumerate() {
            for g in &self.holes[i + 1..] {
                let d = ((h.x - g.x).powi(2) + (h.y - g.y).powi(2)).sqrt();
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
        best
    }
}

/// Expand a design into explicit hole positions.
///
/// With zero angular offsets the layout is mirror-symmetric about the x-axis
/// bit-exactly: holes in the lower half-plane are constructed by negating the
/// y coordinate of their upper partners rather than re-evaluating `sin`.
pub fn generate_layout(design: &CavityDesign) -> Result<HoleLayout, GeometryError> {
    design.validate()?;
    let mut rings = Vec::with_capacity(design.n_rings);
    let mut holes = Vec::new();
    for k in 1..=design.n_rings {
        let rho = design.ring_radius(k);
        let count = (2.0 * PI * rho / design.tangential_pitch).round() as usize;
        if count < 4 {
            return Err(GeometryError::InvalidDesign(format!(
                "ring {k} would carry only {count} holes (need >= 4); \
                 tangential pitch {} nm is too large for radius {rho} nm",
                design.tangential_pitch
            )));
        }
        rings.push(Ring { radius: rho, hole_count: count, angular_offset: 0.0 });
        for m in 0..=count / 2 {
            let theta = 2.0 * PI * m as f64 / count as f64;
            let (x, y) = (rho * theta.cos(), rho * theta.sin());
            holes.push(Hole { x, y, ring: k });
            // Mirror partner; skip the self-symmetric holes on the x-axis.
            if m != 0 && 2 * m != count {
                holes.push(Hole { x, y: -y, ring: k });
            }
        }
    }
    let layout = HoleLayout { rings, holes };
    if let Some(dmin) = layout.min_pair_distance() {
        if dmin < 2.0 * design.hole_radius {
            return Err(GeometryError::InvalidDesign(format!(
                "hole pair spacing {dmin:.3} nm is below the hole diameter {}",
                2.0 * design.hole_radius
            )));
        }
    }
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_first_ring_matches_hand_arithmetic() {
        // rho_1 = 645 + 498/2 = 894 nm; N_1 = round(2 pi 894 / 224) = 25.
        let layout = generate_layout(&CavityDesign::hbn_default()).unwrap();
        assert_eq!(layout.rings[0].radius, 894.0);
        assert_eq!(layout.rings[0].hole_count, 25);
        assert_eq!(layout.rings.len(), 6);
    }

    #[test]
    fn zero_rings_gives_empty_layout() {
        let design = CavityDesign { n_rings: 0, ..CavityDesign::hbn_default() };
        let layout = generate_layout(&design).unwrap();
        assert!(layout.rings.is_empty());
        assert!(layout.holes.is_empty());
    }

    #[test]
    fn oversized_tangential_pitch_is_rejected() {
        // l = 5000 nm at rho_1 = 894 nm gives N_1 = 1 < 4.
        let design = CavityDesign { tangential_pitch: 5000.0, ..CavityDesign::hbn_default() };
        let err = generate_layout(&design).unwrap_err();
        assert!(matches!(err, GeometryError::InvalidDesign(_)), "{err}");
    }

    #[test]
    fn overlapping_holes_are_rejected_by_validate() {
        let design = CavityDesign { hole_radius: 120.0, ..CavityDesign::hbn_default() };
        assert!(design.validate().is_err());
    }

    #[test]
    fn layout_is_mirror_symmetric_bit_exactly() {
        let layout = generate_layout(&CavityDesign::hbn_default()).unwrap();
        for h in &layout.holes {
            let partner = layout
                .holes
                .iter()
                .find(|g| g.ring == h.ring && g.x == h.x && g.y == -h.y);
            assert!(partner.is_some(), "no mirror partner for ({}, {})", h.x, h.y);
        }
    }

    #[test]
    fn ring_hole_counts_match_rings() {
        let layout = generate_layout(&CavityDesign::hbn_default()).unwrap();
        for (k, ring) in layout.rings.iter().enumerate() {
            let n = layout.holes.iter().filter(|h| h.ring == k + 1).count();
            assert_eq!(n, ring.hole_count, "ring {}", k + 1);
        }
    }

    fn arb_design() -> impl Strategy<Value = CavityDesign> {
        (
            300.0..1200.0f64, // R
            200.0..800.0f64,  // r
            100.0..400.0f64,  // l
            20.0..90.0f64,    // a
            2usize..8,        // rings
        )
            .prop_map(|(disk_radius, radial_pitch, tangential_pitch, hole_radius, n_rings)| {
                CavityDesign {
                    disk_radius,
                    radial_pitch,
                    tangential_pitch,
                    hole_radius,
                    thickness: 200.0,
                    n_rings,
                    n_membrane: 2.1,
                    n_env: 1.0,
                }
            })
    }

    proptest! {
        #[test]
        fn hole_counts_nondecreasing_with_ring_index(design in arb_design()) {
            if let Ok(layout) = generate_layout(&design) {
                for pair in layout.rings.windows(2) {
                    prop_assert!(pair[1].hole_count >= pair[0].hole_count);
                }
            }
        }

        #[test]
        fn hole_area_fits_in_ring_annulus(design in arb_design()) {
            if let Ok(layout) = generate_layout(&design) {
                for ring in &layout.rings {
                    let hole_area =
                        ring.hole_count as f64 * PI * design.hole_radius.powi(2);
                    let outer = ring.radius + design.radial_pitch / 2.0;
                    let inner = ring.radius - design.radial_pitch / 2.0;
                    let annulus = PI * (outer.powi(2) - inner.powi(2));
                    prop_assert!(hole_area <= annulus);
                }
            }
        }

        #[test]
        fn accepted_layouts_respect_minimum_spacing(design in arb_design()) {
            if let Ok(layout) = generate_layout(&design) {
                if let Some(dmin) = layout.min_pair_distance() {
                    prop_assert!(dmin >= 2.0 * design.hole_radius);
                }
            }
        }
    }
}
