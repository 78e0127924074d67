//! Spin-1 Hamiltonian eigenstructure and the Zeeman map.

use super::{SpinError, SpinParams};
use nalgebra::{Complex, Matrix3, Vector3};

type C64 = Complex<f64>;

/// ODMR transition frequencies (nu_minus, nu_plus) in GHz for a spin-1
/// system in field `b_mt` (mT, lab frame).
///
/// Diagonalizes H/h = D (Sz^2 - 2/3) + E (Sx^2 - Sy^2) + gamma B . S in the
/// {+1, 0, -1} basis and returns the two gaps from the m_s = 0-like level
/// (largest |<0|psi>|^2) to the other two, sorted ascending.
pub fn spin_resonances(p: &SpinParams, b_mt: [f64; 3]) -> Result<(f64, f64), SpinError> {
    p.validate()?;
    let g = p.gamma_ghz_per_mt();
    let (bx, by, bz) = (g * b_mt[0], g * b_mt[1], g * b_mt[2]);
    let d = p.d_ghz;
    let e = p.e_ghz;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    // Sx = s [[0,1,0],[1,0,1],[0,1,0]], Sy = s [[0,-i,0],[i,0,-i],[0,i,0]],
    // Sz = diag(1,0,-1); Sz^2 = diag(1,0,1); Sx^2 - Sy^2 couples |+1>,|-1>.
    let h = Matrix3::new(
        re(d / 3.0 + bz),
        s * (re(bx) - im(by)),
        re(e),
        s * (re(bx) + im(by)),
        re(-2.0 * d / 3.0),
        s * (re(bx) - im(by)),
        re(e),
        s * (re(bx) + im(by)),
        re(d / 3.0 - bz),
    );
    let eig = h.symmetric_eigen();
    let overlaps: Vec<f64> = (0..3).map(|c| eig.eigenvectors[(1, c)].norm_sqr()).collect();
    let zero_like = (0..3)
        .max_by(|&a, &b| overlaps[a].total_cmp(&overlaps[b]))
        .expect("three eigenvectors");
    let e0 = eig.eigenvalues[zero_like];
    let mut gaps: Vec<f64> =
        (0..3).filter(|&c| c != zero_like).map(|c| eig.eigenvalues[c] - e0).collect();
    gaps.sort_by(f64::total_cmp);
    Ok((gaps[0], gaps[1]))
}

/// Sum of the three Hamiltonian eigenvalues; zero by construction (traceless
/// with the -2/3 subtraction). Exposed for validation.
pub fn eigenvalue_trace(p: &SpinParams, b_mt: [f64; 3]) -> Result<f64, SpinError> {
    p.validate()?;
    let g = p.gamma_ghz_per_mt();
    let (bx, by, bz) = (g * b_mt[0], g * b_mt[1], g * b_mt[2]);
    let d = p.d_ghz;
    let e = p.e_ghz;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let h = Matrix3::new(
        re(d / 3.0 + bz),
        s * (re(bx) - im(by)),
        re(e),
        s * (re(bx) + im(by)),
        re(-2.0 * d / 3.0),
        s * (re(bx) - im(by)),
        re(e),
        s * (re(bx) + im(by)),
        re(d / 3.0 - bz),
    );
    let eig: Vector3<f64> = h.symmetric_eigen().eigenvalues;
    Ok(eig.sum())
}

/// Zeeman shift (GHz) of a resonance for a field of magnitude `b_mt` along
/// the dipole axis: delta_nu = gamma * B.
pub fn zeeman_shift(b_mt: f64, p: &SpinParams) -> f64 {
    p.gamma_ghz_per_mt() * b_mt
}

/// Exact inverse of `zeeman_shift`: the field magnitude (mT) producing the
/// given shift.
pub fn field_from_shift(delta_nu_ghz: f64, p: &SpinParams) -> f64 {
    delta_nu_ghz / p.gamma_ghz_per_mt()
}
