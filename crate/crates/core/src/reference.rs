//! Closed-form electromagnetic references used to validate the numerical
//! paths. These are deliberately independent of the solver and analysis
//! implementations: exact point-dipole fields and powers, textbook far-field
//! patterns, and aperture-diffraction constants.

use num_complex::Complex;

/// Full phasor field of a point electric dipole `p` at the origin in a
/// homogeneous medium of index `n` (time convention `exp(-i omega t)`,
/// outgoing waves `exp(+i k r)`), in scaled units (`eps0 = c = 1`).
///
/// Includes the near-field 1/r^2 and 1/r^3 terms.
pub fn dipole_field(p: [f64; 3], k: f64, n_medium: f64, r: [f64; 3]) -> [Complex<f64>; 3] {
    let eps = n_medium * n_medium;
    let rr = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    assert!(rr > 0.0, "dipole field evaluated at the source point");
    let nhat = [r[0] / rr, r[1] / rr, r[2] / rr];
    let km = k * n_medium; // wavenumber in the medium
    let ndotp = nhat[0] * p[0] + nhat[1] * p[1] + nhat[2] * p[2];
    let phase = Complex::from_polar(1.0, km * rr);
    let mut e = [Complex::new(0.0, 0.0); 3];
    for i in 0..3 {
        // (n x p) x n = p - n (n . p)
        let transverse = p[i] - nhat[i] * ndotp;
        let longitudinal = 3.0 * nhat[i] * ndotp - p[i];
        let far = Complex::new(km * km * transverse / rr, 0.0);
        let near = Complex::new(longitudinal / (rr * rr * rr), 0.0)
            - Complex::new(0.0, km * longitudinal / (rr * rr));
        e[i] = (far + near) * phase / (4.0 * std::f64::consts::PI * eps);
    }
    e
}

/// Magnetic phasor field of the same dipole (same conventions).
pub fn dipole_h_field(p: [f64; 3], k: f64, n_medium: f64, r: [f64; 3]) -> [Complex<f64>; 3] {
    let rr = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    assert!(rr > 0.0, "dipole field evaluated at the source point");
    let nhat = [r[0] / rr, r[1] / rr, r[2] / rr];
    let km = k * n_medium;
    let cross = [
        nhat[1] * p[2] - nhat[2] * p[1],
        nhat[2] * p[0] - nhat[0] * p[2],
        nhat[0] * p[1] - nhat[1] * p[0],
    ];
    // H = (km^2 / (4 pi n)) (nhat x p) (1 - 1/(i km r)) e^{i km r} / r
    let phase = Complex::from_polar(1.0, km * rr);
    let retard = Complex::new(1.0, 0.0) - Complex::new(0.0, -1.0) / (km * rr);
    let scale = km * km / (4.0 * std::f64::consts::PI * n_medium * rr);
    [
        phase * retard * (scale * cross[0]),
        phase * retard * (scale * cross[1]),
        phase * retard * (scale * cross[2]),
    ]
}

/// Time-averaged radiated power of a dipole with moment amplitude `p` at
/// angular frequency `omega` in a medium of index `n`:
/// `P = n p^2 omega^4 / (12 pi)` in scaled units.
pub fn dipole_power(p: f64, omega: f64, n_medium: f64) -> f64 {
    n_medium * p * p * omega.powi(4) / (12.0 * std::f64::consts::PI)
}

/// Normalized radiant intensity of a z-oriented dipole: sin^2(theta).
pub fn z_dipole_pattern(theta: f64, _phi: f64) -> f64 {
    theta.sin().powi(2)
}

/// Normalized radiant intensity of an x-oriented dipole:
/// `1 - sin^2(theta) cos^2(phi)`.
pub fn x_dipole_pattern(theta: f64, phi: f64) -> f64 {
    1.0 - theta.sin().powi(2) * phi.cos().powi(2)
}

/// Collection efficiency of a z-dipole into a cone of numerical aperture
/// `na` (hemisphere-normalized): closed form of the sin^3 integral.
pub fn z_dipole_collection_efficiency(na: f64) -> f64 {
    let c = (1.0 - na * na).sqrt(); // cos(theta_NA)
    let primitive = |c: f64| c * c * c / 3.0 - c;
    (primitive(c) - primitive(1.0)) / (primitive(0.0) - primitive(1.0))
}

/// First-null polar angle of the Airy pattern of a uniformly illuminated
/// circular aperture of diameter `d`: sin(theta) = 1.22 lambda / d.
pub fn airy_first_null_sin_theta(lambda: f64, d: f64) -> f64 {
    // 3.8317 is the first zero of J1.
    3.831_705_970_207_5 * lambda / (std::f64::consts::PI * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn far_zone_field_reduces_to_radiation_term() {
        let k = 2.0 * PI / 850.0;
        let r = 100.0 * 850.0;
        let e = dipole_field([0.0, 0.0, 1.0], k, 1.0, [r, 0.0, 0.0]);
        // At theta = 90 deg from z, |E| = k^2 / (4 pi r) for unit moment.
        let expected = k * k / (4.0 * PI * r);
        let mag = (e[0].norm_sqr() + e[1].norm_sqr() + e[2].norm_sqr()).sqrt();
        assert!((mag - expected).abs() / expected < 1e-3);
        // Polarization along -z at this point (transverse part of p).
        assert!(e[2].norm() / mag > 0.999);
    }

    #[test]
    fn near_zone_scales_as_inverse_cube() {
        let k = 2.0 * PI / 850.0;
        let e1 = dipole_field([0.0, 0.0, 1.0], k, 1.0, [0.0, 0.0, 5.0]);
        let e2 = dipole_field([0.0, 0.0, 1.0], k, 1.0, [0.0, 0.0, 10.0]);
        let ratio = e1[2].norm() / e2[2].norm();
        assert!((ratio - 8.0).abs() < 0.1, "near-field 1/r^3 ratio was {ratio}");
    }

    #[test]
    fn z_dipole_na_half_efficiency_is_2_57_percent() {
        let eta = z_dipole_collection_efficiency(0.5);
        assert!((eta - 0.0257).abs() < 1e-3, "eta = {eta}");
    }

    #[test]
    fn airy_null_matches_1_22_lambda_over_d() {
        let s = airy_first_null_sin_theta(850.0, 5000.0);
        assert!((s - 1.22 * 850.0 / 5000.0).abs() / s < 1e-3);
    }
}
