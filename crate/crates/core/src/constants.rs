//! Unit conventions and physical constants.
//!
//! The electromagnetic solvers work in a scaled unit system chosen for
//! conditioning: lengths are in nanometres, the vacuum speed of light is 1
//! (so time is measured in nanometres of light travel), and fields are
//! scaled so that the vacuum impedance is 1 (`eps0 = mu0 = 1`). Conversion
//! to SI happens only at I/O boundaries.
//!
//! The spin module works in laboratory units: GHz, mT, counts per second.

/// Vacuum speed of light in scaled units.
pub const C0: f64 = 1.0;

/// Vacuum permittivity in scaled units.
pub const EPS0: f64 = 1.0;

/// Vacuum permeability in scaled units.
pub const MU0: f64 = 1.0;

/// Bohr magneton, J/T (CODATA 2018).
pub const BOHR_MAGNETON: f64 = 9.274_010_0783e-24;

/// Planck constant, J*s (exact, SI 2019).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// mu_B / h in GHz/T (equivalently MHz/mT).
pub const MU_B_OVER_H_GHZ_PER_T: f64 = BOHR_MAGNETON / PLANCK * 1e-9;

/// Free-electron g-factor as used in spin-1 defect magnetometry.
pub const G_ELECTRON: f64 = 2.0023;

/// Gyromagnetic ratio gamma_e = g_e * mu_B / h for the default g-factor,
/// in MHz/mT.
pub fn gyromagnetic_ratio_mhz_per_mt(g_factor: f64) -> f64 {
    g_factor * MU_B_OVER_H_GHZ_PER_T
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_b_over_h_matches_codata() {
        // 13.996245 GHz/T to 1e-6 relative.
        let rel = (MU_B_OVER_H_GHZ_PER_T - 13.996_245).abs() / 13.996_245;
        assert!(rel < 1e-6, "mu_B/h = {MU_B_OVER_H_GHZ_PER_T} GHz/T, rel err {rel}");
    }

    #[test]
    fn default_gyromagnetic_ratio_near_28() {
        let gamma = gyromagnetic_ratio_mhz_per_mt(G_ELECTRON);
        assert!((gamma - 28.0).abs() / 28.0 < 1e-3, "gamma = {gamma} MHz/mT");
    }
}
