//! Vector angular-spectrum far-field projection and collection efficiency.
//!
//! Tangential E and H field phasors recorded on a plane in the homogeneous
//! upper region are Fourier-decomposed into plane waves; propagating
//! components (|k_par| <= k) map onto directions of the upper hemisphere and
//! evanescent components are discarded. The longitudinal field follows from
//! transversality. Each polarization is read from the spectrum component
//! that stays numerically well conditioned at grazing angles: TM amplitude
//! from the radial E spectrum, TE amplitude from the radial H spectrum.

use super::AnalysisError;
use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C64 = Complex<f64>;

/// Single-frequency field phasors sampled on an axis-aligned plane of
/// `nx x ny` cells with uniform spacing (nm). Sample `(i, j)` of a component
/// sits at `((i - (nx-1)/2) * spacing + offset_x, (j - (ny-1)/2) * spacing
/// + offset_y)` relative to the plane center; offsets carry the Yee
/// staggering. Arrays are row-major with `j` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasorPlane {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    /// Height of the plane above the structure mid-plane, nm.
    pub z0: f64,
    pub ex: Vec<C64>,
    pub ey: Vec<C64>,
    /// Normal E component; only needed for |E|^2 maps.
    pub ez: Option<Vec<C64>>,
    pub hx: Vec<C64>,
    pub hy: Vec<C64>,
    pub ex_offset: [f64; 2],
    pub ey_offset: [f64; 2],
    pub ez_offset: [f64; 2],
    pub hx_offset: [f64; 2],
    pub hy_offset: [f64; 2],
}

impl PhasorPlane {
    /// A plane with all offsets zero (collocated samples).
    pub fn collocated(
        nx: usize,
        ny: usize,
        spacing: f64,
        z0: f64,
        ex: Vec<C64>,
        ey: Vec<C64>,
        ez: Option<Vec<C64>>,
        hx: Vec<C64>,
        hy: Vec<C64>,
    ) -> Self {
        PhasorPlane {
            nx,
            ny,
            spacing,
            z0,
            ex,
            ey,
            ez,
            hx,
            hy,
            ex_offset: [0.0; 2],
            ey_offset: [0.0; 2],
            ez_offset: [0.0; 2],
            hx_offset: [0.0; 2],
            hy_offset: [0.0; 2],
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Time-averaged power flowing through the plane in +z,
    /// (1/2) Re sum (E x H*) . z dA.
    pub fn flux(&self) -> f64 {
        let da = self.spacing * self.spacing;
        let mut p = 0.0;
        for idx in 0..self.nx * self.ny {
            p += (self.ex[idx] * self.hy[idx].conj() - self.ey[idx] * self.hx[idx].conj()).re;
        }
        0.5 * p * da
    }
}

/// Spatial apodization applied before the Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PlaneWindow {
    None,
    /// Radial Tukey taper: flat inside, cosine roll-off over the outer
    /// `fraction` of the inscribed radius.
    Tukey { fraction: f64 },
}

impl Default for PlaneWindow {
    fn default() -> Self {
        PlaneWindow::Tukey { fraction: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearToFarOptions {
    /// Zero-padding factor for the spatial FFT.
    pub pad_factor: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub window: PlaneWindow,
}

impl Default for NearToFarOptions {
    fn default() -> Self {
        NearToFarOptions { pad_factor: 2, n_theta: 90, n_phi: 180, window: PlaneWindow::default() }
    }
}

/// Radiant intensity over the upper hemisphere on a midpoint (theta, phi)
/// grid. `intensity[it * n_phi + ip] >= 0` in scaled W/sr.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldMap {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub intensity: Vec<f64>,
    pub wavelength_nm: f64,
    pub n_medium: f64,
}

impl FarFieldMap {
    pub fn at(&self, it: usize, ip: usize) -> f64 {
        self.intensity[it * self.phi.len() + ip]
    }

    /// Hemisphere integral of the radiant intensity (midpoint rule).
    pub fn hemisphere_power(&self) -> f64 {
        self.cone_power(PI / 2.0)
    }

    /// Integral restricted to theta <= theta_max, with linear partial
    /// weighting of the straddling theta bin.
    fn cone_power(&self, theta_max: f64) -> f64 {
        let d_theta = PI / 2.0 / self.theta.len() as f64;
        let d_phi = 2.0 * PI / self.phi.len() as f64;
        let mut total = 0.0;
        for (it, &t) in self.theta.iter().enumerate() {
            let lo = t - d_theta / 2.0;
            let frac = ((theta_max - lo) / d_theta).clamp(0.0, 1.0);
            if frac == 0.0 {
                break;
            }
            let w = t.sin() * d_theta * d_phi * frac;
            for ip in 0..self.phi.len() {
                total += self.at(it, ip) * w;
            }
        }
        total
    }
}

/// Fraction of the hemisphere-radiated power collected by an optic of the
/// given numerical aperture: eta = cone(asin(NA/n)) / hemisphere.
pub fn collection_efficiency(ff: &FarFieldMap, na: f64) -> Result<f64, AnalysisError> {
    let total = ff.hemisphere_power();
    if !(total > 0.0) {
        return Err(AnalysisError::EmptyFarField);
    }
    let s = (na.max(0.0) / ff.n_medium).min(1.0);
    Ok(ff.cone_power(s.asin()) / total)
}

/// In-place 2D FFT (forward), row-major, square size n.
fn fft2(buf: &mut [C64], n: usize, planner: &mut FftPlanner<f64>) {
    let fft = planner.plan_fft_forward(n);
    for row in buf.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose_square(buf, n);
    for row in buf.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose_square(buf, n);
}

fn transpose_square(buf: &mut [C64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

fn window_weight(window: PlaneWindow, i: usize, j: usize, nx: usize, ny: usize) -> f64 {
    match window {
        PlaneWindow::None => 1.0,
        PlaneWindow::Tukey { fraction } => {
            let cx = (nx as f64 - 1.0) / 2.0;
            let cy = (ny as f64 - 1.0) / 2.0;
            let rmax = cx.min(cy);
            let rho = ((i as f64 - cx).powi(2) + (j as f64 - cy).powi(2)).sqrt() / rmax;
            let flat = 1.0 - fraction.clamp(0.0, 1.0);
            if rho <= flat {
                1.0
            } else if rho >= 1.0 {
                0.0
            } else {
                let u = (rho - flat) / (1.0 - flat);
                0.5 * (1.0 + (PI * u).cos())
            }
        }
    }
}

/// Load a component into the padded FFT buffer, windowed and circularly
/// shifted so the plane center sits at index (0, 0). The shift keeps the
/// spectrum's phase slowly varying, which bilinear interpolation needs.
fn load_component(
    field: &[C64],
    nx: usize,
    ny: usize,
    n: usize,
    window: PlaneWindow,
) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); n * n];
    let (ic, jc) = (nx / 2, ny / 2);
    for i in 0..nx {
        let ii = (i + n - ic) % n;
        for j in 0..ny {
            let jj = (j + n - jc) % n;
            let w = window_weight(window, i, j, nx, ny);
            buf[ii * n + jj] = field[i * ny + j] * w;
        }
    }
    buf
}

/// Bilinear interpolation on the wrapped k-grid at fractional bin (u, v).
fn sample_spectrum(spec: &[C64], n: usize, u: f64, v: f64) -> C64 {
    let wrap = |x: f64| x.rem_euclid(n as f64);
    let (u, v) = (wrap(u), wrap(v));
    let (i0, j0) = (u.floor() as usize % n, v.floor() as usize % n);
    let (i1, j1) = ((i0 + 1) % n, (j0 + 1) % n);
    let (fu, fv) = (u - u.floor(), v - v.floor());
    spec[i0 * n + j0] * ((1.0 - fu) * (1.0 - fv))
        + spec[i1 * n + j0] * (fu * (1.0 - fv))
        + spec[i0 * n + j1] * ((1.0 - fu) * fv)
        + spec[i1 * n + j1] * (fu * fv)
}

/// Project tangential E and H phasors on a plane to the far field.
///
/// For each propagating direction the TM amplitude is read from the radial
/// in-plane E spectrum and the TE amplitude from the radial in-plane H
/// spectrum:
///
/// `I(theta, phi) = n k^2 / (8 pi^2) (|k_hat . E_t|^2 + |k_hat . H_t|^2 / n^2)`
///
/// This equals `n k^2 cos^2(theta) |E|^2 / (8 pi^2)` for an outgoing field
/// but avoids the 1/kz amplification of grazing plane waves, and its
/// hemisphere integral equals the power the propagating spectrum carries
/// through the plane.
pub fn near_to_far(
    plane: &PhasorPlane,
    wavelength_nm: f64,
    n_medium: f64,
    opts: &NearToFarOptions,
) -> Result<FarFieldMap, AnalysisError> {
    let lambda_medium = wavelength_nm / n_medium;
    let side = plane.nx.min(plane.ny) as f64 * plane.spacing;
    if side < 4.0 * lambda_medium {
        return Err(AnalysisError::PlaneTooSmall { side_nm: side, min_nm: 4.0 * lambda_medium });
    }
    let n = (plane.nx.max(plane.ny) * opts.pad_factor.max(1)).next_power_of_two();
    let mut planner = FftPlanner::new();
    let mut spectra = Vec::with_capacity(4);
    for field in [&plane.ex, &plane.ey, &plane.hx, &plane.hy] {
        let mut buf = load_component(field, plane.nx, plane.ny, n, opts.window);
        fft2(&mut buf, n, &mut planner);
        spectra.push(buf);
    }
    let (ex, ey, hx, hy) = (&spectra[0], &spectra[1], &spectra[2], &spectra[3]);

    let k = 2.0 * PI * n_medium / wavelength_nm;
    let dk = 2.0 * PI / (n as f64 * plane.spacing);
    let da = plane.spacing * plane.spacing;
    let theta: Vec<f64> =
        (0..opts.n_theta).map(|i| (i as f64 + 0.5) * (PI / 2.0) / opts.n_theta as f64).collect();
    let phi: Vec<f64> =
        (0..opts.n_phi).map(|i| (i as f64 + 0.5) * (2.0 * PI) / opts.n_phi as f64).collect();

    let mut intensity = vec![0.0; theta.len() * phi.len()];
    for (it, &t) in theta.iter().enumerate() {
        let st = t.sin();
        for (ip, &p) in phi.iter().enumerate() {
            let (cp, sp) = (p.cos(), p.sin());
            let kx = k * st * cp;
            let ky = k * st * sp;
            let (u, v) = (kx / dk, ky / dk);
            let phase = |off: [f64; 2]| C64::from_polar(1.0, -(kx * off[0] + ky * off[1]));
            let ex_k = sample_spectrum(ex, n, u, v) * da * phase(plane.ex_offset);
            let ey_k = sample_spectrum(ey, n, u, v) * da * phase(plane.ey_offset);
            let hx_k = sample_spectrum(hx, n, u, v) * da * phase(plane.hx_offset);
            let hy_k = sample_spectrum(hy, n, u, v) * da * phase(plane.hy_offset);
            let tm = ex_k * cp + ey_k * sp; // cos(theta) * A_TM
            let te = hx_k * cp + hy_k * sp; // -n cos(theta) * A_TE
            intensity[it * phi.len() + ip] = n_medium * k * k / (8.0 * PI * PI)
                * (tm.norm_sqr() + te.norm_sqr() / (n_medium * n_medium));
        }
    }
    Ok(FarFieldMap { theta, phi, intensity, wavelength_nm, n_medium })
}

/// Near-field |E|^2 map of a recorded plane at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityMap {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    pub values: Vec<f64>,
    pub wavelength_nm: f64,
}

/// |E|^2 = sum over recorded E components of |E_i|^2, per plane cell.
pub fn intensity_map(plane: &PhasorPlane, wavelength_nm: f64) -> IntensityMap {
    let mut values: Vec<f64> = plane
        .ex
        .iter()
        .zip(&plane.ey)
        .map(|(x, y)| x.norm_sqr() + y.norm_sqr())
        .collect();
    if let Some(ez) = &plane.ez {
        for (v, z) in values.iter_mut().zip(ez) {
            *v += z.norm_sqr();
        }
    }
    IntensityMap { nx: plane.nx, ny: plane.ny, spacing: plane.spacing, values, wavelength_nm }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    /// Sample the exact dipole field on a plane at height z0; the dipole has
    /// unit moment along `axis` and sits at the origin.
    pub fn analytic_dipole_plane(
        axis: [f64; 3],
        wavelength: f64,
        z0: f64,
        half: f64,
        spacing: f64,
    ) -> PhasorPlane {
        let n = (2.0 * half / spacing).round() as usize;
        let k = 2.0 * PI / wavelength;
        let mut ex = vec![C64::new(0.0, 0.0); n * n];
        let mut ey = ex.clone();
        let mut ez = ex.clone();
        let mut hx = ex.clone();
        let mut hy = ex.clone();
        let c = (n as f64 - 1.0) / 2.0;
        for i in 0..n {
            for j in 0..n {
                let x = (i as f64 - c) * spacing;
                let y = (j as f64 - c) * spacing;
                let e = reference::dipole_field(axis, k, 1.0, [x, y, z0]);
                let h = reference::dipole_h_field(axis, k, 1.0, [x, y, z0]);
                ex[i * n + j] = e[0];
                ey[i * n + j] = e[1];
                ez[i * n + j] = e[2];
                hx[i * n + j] = h[0];
                hy[i * n + j] = h[1];
            }
        }
        PhasorPlane::collocated(n, n, spacing, z0, ex, ey, Some(ez), hx, hy)
    }

    fn rms_vs_pattern(ff: &FarFieldMap, pattern: impl Fn(f64, f64) -> f64) -> f64 {
        // Solid-angle-weighted RMS of the difference between the map and the
        // reference pattern, both normalized to unit peak.
        let peak = ff.intensity.iter().cloned().fold(0.0f64, f64::max);
        let mut num = 0.0;
        let mut den = 0.0;
        for (it, &t) in ff.theta.iter().enumerate() {
            let w = t.sin();
            for (ip, &p) in ff.phi.iter().enumerate() {
                let d = ff.at(it, ip) / peak - pattern(t, p);
                num += w * d * d;
                den += w;
            }
        }
        (num / den).sqrt()
    }

    fn oracle_plane(axis: [f64; 3]) -> PhasorPlane {
        let lambda = 850.0;
        analytic_dipole_plane(axis, lambda, 0.125 * lambda, 48.0 * lambda, lambda / 12.0)
    }

    #[test]
    fn z_dipole_pattern_is_sin_squared() {
        let ff =
            near_to_far(&oracle_plane([0.0, 0.0, 1.0]), 850.0, 1.0, &NearToFarOptions::default())
                .unwrap();
        let rms = rms_vs_pattern(&ff, reference::z_dipole_pattern);
        assert!(rms < 0.02, "z-dipole RMS = {rms}");
    }

    #[test]
    fn x_dipole_pattern_matches_reference() {
        let ff =
            near_to_far(&oracle_plane([1.0, 0.0, 0.0]), 850.0, 1.0, &NearToFarOptions::default())
                .unwrap();
        let rms = rms_vs_pattern(&ff, reference::x_dipole_pattern);
        assert!(rms < 0.02, "x-dipole RMS = {rms}");
    }

    #[test]
    fn z_dipole_collection_at_na_half_matches_closed_form() {
        let ff =
            near_to_far(&oracle_plane([0.0, 0.0, 1.0]), 850.0, 1.0, &NearToFarOptions::default())
                .unwrap();
        let eta = collection_efficiency(&ff, 0.5).unwrap();
        let expected = reference::z_dipole_collection_efficiency(0.5);
        assert!((eta - expected).abs() < 0.001, "eta = {eta} vs closed form {expected}");
    }

    #[test]
    fn hemisphere_integral_matches_plane_flux() {
        // Parseval-type consistency: the hemisphere integral of I equals the
        // power through the monitor plane within 3%.
        let plane = oracle_plane([1.0, 0.0, 0.0]);
        let ff = near_to_far(&plane, 850.0, 1.0, &NearToFarOptions::default()).unwrap();
        let hemi = ff.hemisphere_power();
        let flux = plane.flux();
        assert!(
            (hemi - flux).abs() / flux < 0.03,
            "hemisphere {hemi} vs plane flux {flux}"
        );
    }

    #[test]
    fn hemisphere_power_matches_half_dipole_power() {
        let ff =
            near_to_far(&oracle_plane([0.0, 0.0, 1.0]), 850.0, 1.0, &NearToFarOptions::default())
                .unwrap();
        let omega = 2.0 * PI / 850.0;
        let expected = reference::dipole_power(1.0, omega, 1.0) / 2.0;
        let got = ff.hemisphere_power();
        assert!(
            (got - expected).abs() / expected < 0.05,
            "hemisphere power {got} vs P/2 = {expected}"
        );
    }

    #[test]
    fn collection_efficiency_is_monotone_and_reaches_one() {
        let lambda = 850.0;
        let plane = analytic_dipole_plane(
            [1.0, 0.0, 0.0],
            lambda,
            0.25 * lambda,
            12.0 * lambda,
            lambda / 8.0,
        );
        let ff = near_to_far(&plane, lambda, 1.0, &NearToFarOptions::default()).unwrap();
        let nas = [0.05, 0.1, 0.22, 0.5, 0.8, 1.0];
        let etas: Vec<f64> =
            nas.iter().map(|&na| collection_efficiency(&ff, na).unwrap()).collect();
        for pair in etas.windows(2) {
            assert!(pair[1] >= pair[0], "eta not monotone: {etas:?}");
        }
        assert!((etas.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn airy_pattern_first_null_location() {
        // Uniform circular aperture of diameter D carrying an x-polarized
        // plane wave (H = n E z_hat x x_hat = n E y_hat).
        let lambda = 850.0;
        let d = 6.0 * lambda;
        let spacing = lambda / 8.0;
        let n = 128;
        let c = (n as f64 - 1.0) / 2.0;
        let mut ex = vec![C64::new(0.0, 0.0); n * n];
        let mut hy = ex.clone();
        for i in 0..n {
            for j in 0..n {
                let x = (i as f64 - c) * spacing;
                let y = (j as f64 - c) * spacing;
                if (x * x + y * y).sqrt() <= d / 2.0 {
                    ex[i * n + j] = C64::new(1.0, 0.0);
                    hy[i * n + j] = C64::new(1.0, 0.0);
                }
            }
        }
        let zeros = vec![C64::new(0.0, 0.0); n * n];
        let plane =
            PhasorPlane::collocated(n, n, spacing, 0.0, ex, zeros.clone(), None, zeros, hy);
        let opts = NearToFarOptions {
            n_theta: 720,
            pad_factor: 4,
            window: PlaneWindow::None, // the aperture edge is the physics here
            ..Default::default()
        };
        let ff = near_to_far(&plane, lambda, 1.0, &opts).unwrap();
        let radial: Vec<f64> = (0..ff.theta.len())
            .map(|it| (0..ff.phi.len()).map(|ip| ff.at(it, ip)).sum::<f64>())
            .collect();
        let mut first_null = None;
        for i in 1..radial.len() - 1 {
            if radial[i] < radial[i - 1] && radial[i] <= radial[i + 1] {
                first_null = Some(ff.theta[i]);
                break;
            }
        }
        let got = first_null.expect("no null found").sin();
        let expected = reference::airy_first_null_sin_theta(lambda, d);
        assert!((got - expected).abs() / expected < 0.05, "sin = {got} vs {expected}");
    }

    #[test]
    fn undersized_plane_is_rejected() {
        let lambda = 850.0;
        let plane =
            analytic_dipole_plane([0.0, 0.0, 1.0], lambda, 500.0, lambda, lambda / 8.0);
        assert!(matches!(
            near_to_far(&plane, lambda, 1.0, &NearToFarOptions::default()),
            Err(AnalysisError::PlaneTooSmall { .. })
        ));
    }

    #[test]
    fn zero_plane_has_empty_far_field() {
        let n = 64;
        let zeros = vec![C64::new(0.0, 0.0); n * n];
        let plane = PhasorPlane::collocated(
            n,
            n,
            850.0 / 8.0,
            0.0,
            zeros.clone(),
            zeros.clone(),
            None,
            zeros.clone(),
            zeros,
        );
        let ff = near_to_far(&plane, 850.0, 1.0, &NearToFarOptions::default()).unwrap();
        assert!(matches!(collection_efficiency(&ff, 0.5), Err(AnalysisError::EmptyFarField)));
    }

    #[test]
    fn intensity_map_tracks_field_magnitude() {
        let plane = analytic_dipole_plane([0.0, 0.0, 1.0], 850.0, 500.0, 1600.0, 100.0);
        let map = intensity_map(&plane, 850.0);
        assert_eq!(map.values.len(), plane.nx * plane.ny);
        assert!(map.values.iter().all(|&v| v >= 0.0));
        assert!(map.values.iter().any(|&v| v > 0.0));
    }
}
