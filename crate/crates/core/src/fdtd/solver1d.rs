//! 1D Yee solver (Ex, Hy along z) with CPML ends.
//!
//! Used for solver validation: numerical dispersion, absorber reflection,
//! and normal-incidence multilayer reflectance against the transfer-matrix
//! oracle. Ex sits on integer z lines, Hy on half lines.

use super::cpml::{AxisProfile, CpmlParams};
use super::FdtdError;

pub struct Solver1d {
    pub n: usize,
    pub dx: f64,
    pub dt: f64,
    ex: Vec<f64>,
    hy: Vec<f64>,
    cb: Vec<f64>,
    db: f64,
    profile: AxisProfile,
    psi_e: Vec<f64>,
    psi_h: Vec<f64>,
    step_index: usize,
}

impl Solver1d {
    /// `eps_cells[k]` is the relative permittivity of cell k (between grid
    /// lines k and k+1).
    pub fn new(
        eps_cells: &[f64],
        dx: f64,
        courant: f64,
        boundary: Option<CpmlParams>,
    ) -> Result<Self, FdtdError> {
        if !(courant > 0.0 && courant <= 1.0) {
            return Err(FdtdError::CourantViolation { s: courant });
        }
        let n = eps_cells.len();
        let dt = courant * dx;
        let profile = match boundary {
            None => AxisProfile::pec(n),
            Some(p) => AxisProfile::new(&p, n, dx, dt)?,
        };
        if n.saturating_sub(2 * profile.layers) < 4 {
            return Err(FdtdError::DomainTooSmall { axis: 0, interior: n });
        }
        // Permittivity at Ex nodes: mean of the two adjacent cells.
        let cb = (0..n)
            .map(|k| {
                let eps = if k == 0 {
                    eps_cells[0]
                } else {
                    0.5 * (eps_cells[k - 1] + eps_cells[k])
                };
                dt / (eps * dx)
            })
            .collect();
        Ok(Solver1d {
            n,
            dx,
            dt,
            ex: vec![0.0; n],
            hy: vec![0.0; n],
            cb,
            db: dt / dx,
            profile,
            psi_e: vec![0.0; n],
            psi_h: vec![0.0; n],
            step_index: 0,
        })
    }

    pub fn vacuum(n: usize, dx: f64, courant: f64, boundary: Option<CpmlParams>) -> Result<Self, FdtdError> {
        Self::new(&vec![1.0; n], dx, courant, boundary)
    }

    pub fn ex(&self) -> &[f64] {
        &self.ex
    }

    pub fn hy(&self) -> &[f64] {
        &self.hy
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    /// Time of the current E fields.
    pub fn time_e(&self) -> f64 {
        self.step_index as f64 * self.dt
    }

    /// Soft-add to Ex at node k (current injection).
    pub fn add_ex(&mut self, k: usize, value: f64) {
        self.ex[k] += value;
    }

    /// Hard-set Ex at node k.
    pub fn set_ex(&mut self, k: usize, value: f64) {
        self.ex[k] = value;
    }

    /// Seed an initial right-travelling waveform f(z): with S = 1 this
    /// translates exactly one cell per step. Hy lives at (k + 1/2, -dt/2),
    /// so the characteristic z - t puts f(k + 1) there.
    pub fn seed_travelling(&mut self, f: impl Fn(f64) -> f64) {
        for k in 0..self.n {
            self.ex[k] = f(k as f64);
            self.hy[k] = f(k as f64 + 1.0);
        }
    }

    /// One leapfrog step: H half-update then E update.
    pub fn step(&mut self) {
        let n = self.n;
        // Hy[k] += db (Ex[k] - Ex[k+1]) with CPML stretching at half lines.
        for k in 0..n - 1 {
            let d = self.ex[k] - self.ex[k + 1];
            let mut rhs = self.profile.inv_kappa_h[k] * d;
            if self.profile.in_pml(k, n) {
                self.psi_h[k] =
                    self.profile.b_h[k] * self.psi_h[k] + self.profile.c_h[k] * d;
                rhs += self.psi_h[k];
            }
            self.hy[k] += self.db * rhs;
        }
        // Ex[k] += cb (Hy[k-1] - Hy[k]).
        for k in 1..n {
            let d = self.hy[k - 1] - self.hy[k];
            let mut rhs = self.profile.inv_kappa_e[k] * d;
            if self.profile.in_pml(k, n) {
                self.psi_e[k] =
                    self.profile.b_e[k] * self.psi_e[k] + self.profile.c_e[k] * d;
                rhs += self.psi_e[k];
            }
            self.ex[k] += self.cb[k] * rhs;
        }
        self.step_index += 1;
    }

    /// Interior energy in the discrete conserved form
    /// 1/2 (eps E^n, E^n) + 1/2 (Hy^{n-1/2}, Hy^{n+1/2}).
    pub fn energy(&self) -> f64 {
        let (lo, hi) = (self.profile.layers, self.n - self.profile.layers);
        let mut total = 0.0;
        for k in lo..hi {
            total += self.dt / self.dx * self.ex[k] * self.ex[k] / self.cb[k];
            if k + 1 < self.n {
                let hy_new = self.hy[k] + self.db * (self.ex[k] - self.ex[k + 1]);
                total += self.hy[k] * hy_new;
            }
        }
        0.5 * total * self.dx
    }
}
