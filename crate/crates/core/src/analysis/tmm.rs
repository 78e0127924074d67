//! Characteristic-matrix transfer method for lossless multilayers at normal
//! incidence. Serves as the independent oracle against which the 1D FDTD
//! reflectance is validated.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Ordered layer stack between two semi-infinite media.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabStack {
    pub n_ambient: f64,
    /// (refractive index, thickness nm), ordered from the ambient side.
    pub layers: Vec<(f64, f64)>,
    pub n_substrate: f64,
}

impl SlabStack {
    /// A quarter-wave Bragg mirror of `periods` (high, low) pairs designed
    /// at `lambda0_nm`, in vacuum.
    pub fn quarter_wave(n_high: f64, n_low: f64, lambda0_nm: f64, periods: usize) -> Self {
        let mut layers = Vec::with_capacity(2 * periods);
        for _ in 0..periods {
            layers.push((n_high, lambda0_nm / (4.0 * n_high)));
            layers.push((n_low, lambda0_nm / (4.0 * n_low)));
        }
        SlabStack { n_ambient: 1.0, layers, n_substrate: 1.0 }
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|(_, d)| d).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmmPoint {
    pub wavelength_nm: f64,
    pub reflectance: f64,
    pub transmittance: f64,
}

/// Normal-incidence reflectance/transmittance spectra via the standard
/// 2x2 characteristic-matrix product.
pub fn transfer_matrix_spectrum(stack: &SlabStack, wavelengths_nm: &[f64]) -> Vec<TmmPoint> {
    wavelengths_nm
        .iter()
        .map(|&lambda| {
            let i = Complex::new(0.0, 1.0);
            // M = product over layers of [[cos d, i sin d / y], [i y sin d, cos d]].
            let mut m = [
                [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)],
                [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
            ];
            for &(n, d) in &stack.layers {
                let delta = 2.0 * PI * n * d / lambda;
                let (s, c) = delta.sin_cos();
                let layer = [
                    [Complex::new(c, 0.0), i * s / n],
                    [i * n * s, Complex::new(c, 0.0)],
                ];
                m = [
                    [
                        m[0][0] * layer[0][0] + m[0][1] * layer[1][0],
                        m[0][0] * layer[0][1] + m[0][1] * layer[1][1],
                    ],
                    [
                        m[1][0] * layer[0][0] + m[1][1] * layer[1][0],
                        m[1][0] * layer[0][1] + m[1][1] * layer[1][1],
                    ],
                ];
            }
            let ya = Complex::new(stack.n_ambient, 0.0);
            let ys = Complex::new(stack.n_substrate, 0.0);
            let b = m[0][0] + m[0][1] * ys;
            let c = m[1][0] + m[1][1] * ys;
            let denom = ya * b + c;
            let r = (ya * b - c) / denom;
            let reflectance = r.norm_sqr();
            let transmittance = 4.0 * stack.n_ambient * stack.n_substrate / denom.norm_sqr();
            TmmPoint { wavelength_nm: lambda, reflectance, transmittance }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_interface_gives_fresnel_reflectance() {
        let stack = SlabStack { n_ambient: 1.0, layers: vec![], n_substrate: 2.1 };
        let pts = transfer_matrix_spectrum(&stack, &[400.0, 850.0, 1600.0]);
        let r_expected = ((1.0 - 2.1) / (1.0 + 2.1) as f64).powi(2);
        for p in pts {
            assert!((p.reflectance - r_expected).abs() < 1e-14);
        }
    }

    #[test]
    fn lossless_stack_conserves_energy() {
        let stack = SlabStack {
            n_ambient: 1.0,
            layers: vec![(2.1, 101.0), (1.3, 77.0), (1.8, 260.0), (2.1, 95.0)],
            n_substrate: 1.45,
        };
        let wavelengths: Vec<f64> = (0..200).map(|i| 500.0 + 4.0 * i as f64).collect();
        for p in transfer_matrix_spectrum(&stack, &wavelengths) {
            assert!(
                (p.reflectance + p.transmittance - 1.0).abs() < 1e-12,
                "R + T = {} at {} nm",
                p.reflectance + p.transmittance,
                p.wavelength_nm
            );
        }
    }

    #[test]
    fn quarter_wave_stack_matches_closed_form() {
        let (nh, nl) = (2.1, 1.0);
        let stack = SlabStack::quarter_wave(nh, nl, 850.0, 4);
        let p = &transfer_matrix_spectrum(&stack, &[850.0])[0];
        let ratio = (nh / nl as f64).powi(8);
        let r_expected = ((1.0 - ratio) / (1.0 + ratio)).powi(2);
        assert!(
            (p.reflectance - r_expected).abs() < 1e-9,
            "R = {} vs {}",
            p.reflectance,
            r_expected
        );
    }
}
