//! 2D Yee solver for fast cross-section validation.
//!
//! Two polarizations on an (nx, ny) grid with CPML on all four sides:
//! TM carries (Ez, Hx, Hy) with Ez out of plane; TE carries (Hz, Ex, Ey).

use super::cpml::{AxisProfile, CpmlParams};
use super::FdtdError;
use crate::geometry::PermittivityGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization2d {
    /// Out-of-plane E (Ez, Hx, Hy).
    Tm,
    /// Out-of-plane H (Hz, Ex, Ey).
    Te,
}

pub struct Solver2d {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dt: f64,
    pub polarization: Polarization2d,
    /// Out-of-plane field (Ez for TM, Hz for TE).
    f0: Vec<f64>,
    /// In-plane pair (Hx, Hy for TM; Ex, Ey for TE).
    f1: Vec<f64>,
    f2: Vec<f64>,
    cb0: Vec<f64>,
    cb1: Vec<f64>,
    cb2: Vec<f64>,
    db: f64,
    px: AxisProfile,
    py: AxisProfile,
    psi0_x: Vec<f64>,
    psi0_y: Vec<f64>,
    psi1: Vec<f64>,
    psi2: Vec<f64>,
    step_index: usize,
}

impl Solver2d {
    pub fn new(
        grid: &PermittivityGrid,
        polarization: Polarization2d,
        boundary: Option<CpmlParams>,
        courant: f64,
    ) -> Result<Self, FdtdError> {
        if !(courant > 0.0 && courant <= 1.0) {
            return Err(FdtdError::CourantViolation { s: courant });
        }
        let [nx, ny, _] = grid.dims;
        let dx = grid.spacing;
        let dt = courant * dx / 2.0f64.sqrt();
        let (px, py) = match boundary {
            None => (AxisProfile::pec(nx), AxisProfile::pec(ny)),
            Some(p) => {
                (AxisProfile::new(&p, nx, dx, dt)?, AxisProfile::new(&p, ny, dx, dt)?)
            }
        };
        for (axis, n, p) in [(0, nx, &px), (1, ny, &py)] {
            if n.saturating_sub(2 * p.layers) < 4 {
                return Err(FdtdError::DomainTooSmall { axis, interior: n });
            }
        }
        let len = nx * ny;
        let eps = |i: usize, j: usize| grid.eps[(i.min(nx - 1) * ny + j.min(ny - 1)) * grid.dims[2]];
        let cm = |v: usize| v.saturating_sub(1);
        let mut cb0 = vec![0.0; len];
        let mut cb1 = vec![0.0; len];
        let mut cb2 = vec![0.0; len];
        for i in 0..nx {
            for j in 0..ny {
                let idx = i * ny + j;
                match polarization {
                    Polarization2d::Tm => {
                        // Ez at integer (i, j): average the 4 touching cells.
                        let e = 0.25
                            * (eps(cm(i), cm(j)) + eps(cm(i), j) + eps(i, cm(j)) + eps(i, j));
                        cb0[idx] = dt / (e * dx);
                    }
                    Polarization2d::Te => {
                        // Ex at (i+1/2, j); Ey at (i, j+1/2).
                        let ex_e = 0.5 * (eps(i, cm(j)) + eps(i, j));
                        let ey_e = 0.5 * (eps(cm(i), j) + eps(i, j));
                        cb1[idx] = dt / (ex_e * dx);
                        cb2[idx] = dt / (ey_e * dx);
                    }
                }
            }
        }
        Ok(Solver2d {
            nx,
            ny,
            dx,
            dt,
            polarization,
            f0: vec![0.0; len],
            f1: vec![0.0; len],
            f2: vec![0.0; len],
            cb0,
            cb1,
            cb2,
            db: dt / dx,
            px,
            py,
            psi0_x: vec![0.0; len],
            psi0_y: vec![0.0; len],
            psi1: vec![0.0; len],
            psi2: vec![0.0; len],
            step_index: 0,
        })
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    /// Out-of-plane field (Ez for TM, Hz for TE).
    pub fn out_of_plane(&self) -> &[f64] {
        &self.f0
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Soft-add to the out-of-plane E field (TM) at a node. For TE scenes
    /// inject on the in-plane Ex instead.
    pub fn add_out_of_plane(&mut self, i: usize, j: usize, value: f64) {
        let idx = self.idx(i, j);
        self.f0[idx] += value;
    }

    pub fn add_ex(&mut self, i: usize, j: usize, value: f64) {
        assert_eq!(self.polarization, Polarization2d::Te);
        let idx = self.idx(i, j);
        self.f1[idx] += value;
    }

    pub fn step(&mut self) {
        match self.polarization {
            Polarization2d::Tm => self.step_tm(),
            Polarization2d::Te => self.step_te(),
        }
        self.step_index += 1;
    }

    fn step_tm(&mut self) {
        let (nx, ny) = (self.nx, self.ny);
        // Hx[i, j+1/2] += db * (Ez[i,j] - Ez[i,j+1]) (y-derivative).
        for i in 0..nx {
            for j in 0..ny - 1 {
                let idx = i * ny + j;
                let d = self.f0[idx] - self.f0[idx + 1];
                let mut rhs = self.py.inv_kappa_h[j] * d;
                if self.py.in_pml(j, ny) {
                    self.psi1[idx] = self.py.b_h[j] * self.psi1[idx] + self.py.c_h[j] * d;
                    rhs += self.psi1[idx];
                }
                self.f1[idx] += self.db * rhs;
            }
        }
        // Hy[i+1/2, j] += db * (Ez[i+1,j] - Ez[i,j]).
        for i in 0..nx - 1 {
            for j in 0..ny {
                let idx = i * ny + j;
                let d = self.f0[idx + ny] - self.f0[idx];
                let mut rhs = self.px.inv_kappa_h[i] * d;
                if self.px.in_pml(i, nx) {
                    self.psi2[idx] = self.px.b_h[i] * self.psi2[idx] + self.px.c_h[i] * d;
                    rhs += self.psi2[idx];
                }
                self.f2[idx] += self.db * rhs;
            }
        }
        // Ez[i,j] += cb * (dHy/dx - dHx/dy).
        for i in 1..nx {
            for j in 1..ny {
                let idx = i * ny + j;
                let dx_term = self.f2[idx] - self.f2[idx - ny];
                let dy_term = self.f1[idx - 1] - self.f1[idx];
                let mut rhs =
                    self.px.inv_kappa_e[i] * dx_term + self.py.inv_kappa_e[j] * dy_term;
                if self.px.in_pml(i, nx) {
                    self.psi0_x[idx] =
                        self.px.b_e[i] * self.psi0_x[idx] + self.px.c_e[i] * dx_term;
                    rhs += self.psi0_x[idx];
                }
                if self.py.in_pml(j, ny) {
                    self.psi0_y[idx] =
                        self.py.b_e[j] * self.psi0_y[idx] + self.py.c_e[j] * dy_term;
                    rhs += self.psi0_y[idx];
                }
                self.f0[idx] += self.cb0[idx] * rhs;
            }
        }
    }

    fn step_te(&mut self) {
        let (nx, ny) = (self.nx, self.ny);
        // Hz[i+1/2, j+1/2] += db * (dEx/dy - dEy/dx).
        for i in 0..nx - 1 {
            for j in 0..ny - 1 {
                let idx = i * ny + j;
                let dy_term = self.f1[idx + 1] - self.f1[idx];
                let dx_term = self.f2[idx] - self.f2[idx + ny];
                let mut rhs =
                    self.py.inv_kappa_h[j] * dy_term + self.px.inv_kappa_h[i] * dx_term;
                if self.py.in_pml(j, ny) {
                    self.psi0_y[idx] =
                        self.py.b_h[j] * self.psi0_y[idx] + self.py.c_h[j] * dy_term;
                    rhs += self.psi0_y[idx];
                }
                if self.px.in_pml(i, nx) {
                    self.psi0_x[idx] =
                        self.px.b_h[i] * self.psi0_x[idx] + self.px.c_h[i] * dx_term;
                    rhs += self.psi0_x[idx];
                }
                self.f0[idx] += self.db * rhs;
            }
        }
        // Ex[i+1/2, j] += cb1 * dHz/dy.
        for i in 0..nx {
            for j in 1..ny {
                let idx = i * ny + j;
                let d = self.f0[idx] - self.f0[idx - 1];
                let mut rhs = self.py.inv_kappa_e[j] * d;
                if self.py.in_pml(j, ny) {
                    self.psi1[idx] = self.py.b_e[j] * self.psi1[idx] + self.py.c_e[j] * d;
                    rhs += self.psi1[idx];
                }
                self.f1[idx] += self.cb1[idx] * rhs;
            }
        }
        // Ey[i, j+1/2] += cb2 * (-dHz/dx).
        for i in 1..nx {
            for j in 0..ny {
                let idx = i * ny + j;
                let d = self.f0[idx - ny] - self.f0[idx];
                let mut rhs = self.px.inv_kappa_e[i] * d;
                if self.px.in_pml(i, nx) {
                    self.psi2[idx] = self.px.b_e[i] * self.psi2[idx] + self.px.c_e[i] * d;
                    rhs += self.psi2[idx];
                }
                self.f2[idx] += self.cb2[idx] * rhs;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PermittivityGrid;

    fn vacuum_grid(n: usize, dx: f64) -> PermittivityGrid {
        PermittivityGrid::homogeneous([n, n, 1], dx, 1.0)
    }

    #[test]
    fn time_step_satisfies_2d_courant() {
        let g = vacuum_grid(40, 10.0);
        let s = Solver2d::new(&g, Polarization2d::Tm, Some(CpmlParams::default()), 0.5).unwrap();
        assert!((s.dt - 0.5 * 10.0 / 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tm_pulse_spreads_and_decays_in_pml() {
        let g = vacuum_grid(80, 10.0);
        let mut s =
            Solver2d::new(&g, Polarization2d::Tm, Some(CpmlParams::default()), 0.99).unwrap();
        let wf = super::super::GaussianPulse {
            center_frequency: 1.0 / 200.0,
            fractional_bandwidth: 0.6,
            amplitude: 1.0,
            cutoff_sigmas: 5.0,
        };
        let mut peak = 0.0f64;
        let mut last = f64::INFINITY;
        for step in 0..1500 {
            let t = (step as f64 + 0.5) * s.dt;
            s.add_out_of_plane(40, 40, wf.evaluate(t));
            s.step();
            let sum: f64 = s.out_of_plane().iter().map(|v| v * v).sum();
            peak = peak.max(sum);
            last = sum;
            assert!(sum.is_finite());
        }
        assert!(last < 1e-6 * peak, "field energy did not decay: {last} vs peak {peak}");
    }

    #[test]
    fn te_pulse_decays_too() {
        let g = vacuum_grid(72, 10.0);
        let mut s =
            Solver2d::new(&g, Polarization2d::Te, Some(CpmlParams::default()), 0.99).unwrap();
        let wf = super::super::GaussianPulse {
            center_frequency: 1.0 / 200.0,
            fractional_bandwidth: 0.6,
            amplitude: 1.0,
            cutoff_sigmas: 5.0,
        };
        let mut peak = 0.0f64;
        let mut last = f64::INFINITY;
        for step in 0..1500 {
            let t = (step as f64 + 0.5) * s.dt;
            s.add_ex(36, 36, wf.evaluate(t));
            s.step();
            let sum: f64 = s.f1.iter().chain(&s.f2).map(|v| v * v).sum();
            peak = peak.max(sum);
            last = sum;
        }
        assert!(last < 1e-6 * peak);
    }

    #[test]
    fn identical_runs_are_bit_identical() {
        let g = vacuum_grid(48, 10.0);
        let run = || {
            let mut s =
                Solver2d::new(&g, Polarization2d::Tm, Some(CpmlParams::default()), 0.99)
                    .unwrap();
            let wf = super::super::GaussianPulse {
                center_frequency: 1.0 / 150.0,
                fractional_bandwidth: 0.5,
                amplitude: 1.0,
                cutoff_sigmas: 5.0,
            };
            for step in 0..400 {
                let t = (step as f64 + 0.5) * s.dt;
                s.add_out_of_plane(24, 24, wf.evaluate(t));
                s.step();
            }
            s.f0
        };
        assert_eq!(run(), run());
    }
}
