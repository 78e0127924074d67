//! Convolutional PML absorber coefficients.
//!
//! Polynomial-graded sigma/kappa with a linearly decreasing alpha, following
//! the standard recursive-convolution formulation: each psi accumulator
//! updates as `psi = b psi + c (d_field)` with
//! `b = exp(-(sigma/kappa + alpha) dt)` and
//! `c = sigma (b - 1) / (sigma kappa + kappa^2 alpha)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CpmlError {
    #[error("CPML needs at least 5 layers, got {0}")]
    TooFewLayers(usize),
    #[error("CPML parameters must be positive: {0}")]
    NonPositive(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpmlParams {
    /// Absorber thickness in cells, per side.
    pub layers: usize,
    /// Polynomial grading order m.
    pub grading_order: f64,
    /// Target theoretical normal-incidence reflection.
    pub target_reflection: f64,
    pub kappa_max: f64,
    /// Maximum complex-frequency shift (scaled units).
    pub alpha_max: f64,
}

impl Default for CpmlParams {
    fn default() -> Self {
        CpmlParams {
            layers: 10,
            grading_order: 3.0,
            target_reflection: 1e-8,
            kappa_max: 5.0,
            alpha_max: 0.01,
        }
    }
}

impl CpmlParams {
    pub fn validate(&self) -> Result<(), CpmlError> {
        if self.layers < 5 {
            return Err(CpmlError::TooFewLayers(self.layers));
        }
        for (name, v) in [
            ("grading_order", self.grading_order),
            ("target_reflection", self.target_reflection),
            ("kappa_max", self.kappa_max),
            ("alpha_max", self.alpha_max),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CpmlError::NonPositive(format!("{name} = {v}")));
            }
        }
        Ok(())
    }

    /// Optimal sigma_max for the target reflection over `layers` cells of
    /// size `dx` (vacuum impedance 1): -(m+1) ln(R0) / (2 L).
    pub fn sigma_max(&self, dx: f64) -> f64 {
        -(self.grading_order + 1.0) * self.target_reflection.ln()
            / (2.0 * self.layers as f64 * dx)
    }
}

/// Per-axis CPML coefficient profiles, sampled at integer (E-derivative) and
/// half-integer (H-derivative) positions along the axis.
#[derive(Debug, Clone)]
pub struct AxisProfile {
    pub inv_kappa_e: Vec<f64>,
    pub b_e: Vec<f64>,
    pub c_e: Vec<f64>,
    pub inv_kappa_h: Vec<f64>,
    pub b_h: Vec<f64>,
    pub c_h: Vec<f64>,
    /// Absorber thickness in cells (0 for PEC-only boundaries).
    pub layers: usize,
}

impl AxisProfile {
    /// Profile with no absorber: bare PEC walls.
    pub fn pec(n: usize) -> Self {
        AxisProfile {
            inv_kappa_e: vec![1.0; n],
            b_e: vec![0.0; n],
            c_e: vec![0.0; n],
            inv_kappa_h: vec![1.0; n],
            b_h: vec![0.0; n],
            c_h: vec![0.0; n],
            layers: 0,
        }
    }

    /// Graded absorber profile for an axis of `n` cells.
    pub fn new(params: &CpmlParams, n: usize, dx: f64, dt: f64) -> Result<Self, CpmlError> {
        params.validate()?;
        let l = params.layers as f64;
        let sigma_max = params.sigma_max(dx);
        // Depth into the absorber (in cells) at a normalized axis position,
        // or None in the interior.
        let depth = |pos: f64| -> Option<f64> {
            if pos < l {
                Some(l - pos)
            } else if pos > n as f64 - l {
                Some(pos - (n as f64 - l))
            } else {
                None
            }
        };
        let coeff = |pos: f64| -> (f64, f64, f64) {
            match depth(pos) {
                None => (1.0, 0.0, 0.0),
                Some(d) => {
                    let u = (d / l).min(1.0);
                    let g = u.powf(params.grading_order);
                    let sigma = sigma_max * g;
                    let kappa = 1.0 + (params.kappa_max - 1.0) * g;
                    let alpha = params.alpha_max * (1.0 - u);
                    let b = (-(sigma / kappa + alpha) * dt).exp();
                    let denom = sigma * kappa + kappa * kappa * alpha;
                    let c = if denom > 0.0 { sigma * (b - 1.0) / denom } else { 0.0 };
                    (1.0 / kappa, b, c)
                }
            }
        };
        let mut profile = AxisProfile::pec(n);
        profile.layers = params.layers;
        for i in 0..n {
            let (ik, b, c) = coeff(i as f64);
            profile.inv_kappa_e[i] = ik;
            profile.b_e[i] = b;
            profile.c_e[i] = c;
            let (ik, b, c) = coeff(i as f64 + 0.5);
            profile.inv_kappa_h[i] = ik;
            profile.b_h[i] = b;
            profile.c_h[i] = c;
        }
        Ok(profile)
    }

    /// True if the integer position lies inside the absorber.
    pub fn in_pml(&self, i: usize, n: usize) -> bool {
        i < self.layers || i + self.layers >= n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_coefficients_are_identity() {
        let p = CpmlParams::default();
        let prof = AxisProfile::new(&p, 60, 20.0, 11.0).unwrap();
        for i in 15..45 {
            assert_eq!(prof.inv_kappa_e[i], 1.0);
            assert_eq!(prof.b_e[i], 0.0);
            assert_eq!(prof.c_e[i], 0.0);
        }
    }

    #[test]
    fn absorber_grades_toward_the_wall() {
        let p = CpmlParams::default();
        let prof = AxisProfile::new(&p, 60, 20.0, 11.0).unwrap();
        // kappa grows toward the outer wall, so 1/kappa shrinks.
        assert!(prof.inv_kappa_e[0] < prof.inv_kappa_e[5]);
        assert!(prof.inv_kappa_e[59] < prof.inv_kappa_e[54]);
        // b in (0, 1) inside the absorber.
        assert!(prof.b_e[2] > 0.0 && prof.b_e[2] < 1.0);
        // c is negative (sigma (b-1) / positive).
        assert!(prof.c_e[2] < 0.0);
    }

    #[test]
    fn too_few_layers_is_rejected() {
        let p = CpmlParams { layers: 3, ..Default::default() };
        assert_eq!(p.validate(), Err(CpmlError::TooFewLayers(3)));
    }
}
