//! 3D Yee solver with CPML absorbers.
//!
//! Fields live on the standard staggered positions (grid-line coordinates,
//! in units of the cell size):
//!   Ex (i+1/2, j, k)   Ey (i, j+1/2, k)   Ez (i, j, k+1/2)
//!   Hx (i, j+1/2, k+1/2)   Hy (i+1/2, j, k+1/2)   Hz (i+1/2, j+1/2, k)
//! with arrays indexed `(i * ny + j) * nz + k`, z fastest.
//!
//! The update is parallelized over x-slabs: each half-step writes one field
//! family while reading only the other, so every cell update is independent
//! and results are bit-identical for any worker count.

use super::cpml::{AxisProfile, CpmlParams};
use super::monitor::{Component, MonitorRecords, MonitorSpec};
use super::source::DipoleSource;
use super::{accum, FdtdError};
use crate::geometry::PermittivityGrid;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// CPML absorber backed by a PEC wall.
    Pml(CpmlParams),
    /// Bare PEC walls (reflecting); used by conservation tests.
    Pec,
}

impl Default for Boundary {
    fn default() -> Self {
        Boundary::Pml(CpmlParams::default())
    }
}

/// Runtime limits and early-stop policy for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunControl {
    pub max_steps: usize,
    /// Stop once interior energy falls below this fraction of its peak
    /// (checked after all sources are off).
    pub early_stop_fraction: Option<f64>,
    /// Field-magnitude guard; exceeding it means the scheme went unstable.
    pub blowup_guard: f64,
    /// Steps between energy checks.
    pub check_interval: usize,
}

impl RunControl {
    pub fn steps(max_steps: usize) -> Self {
        RunControl {
            max_steps,
            early_stop_fraction: Some(1e-7),
            blowup_guard: 1e12,
            check_interval: 25,
        }
    }
}

pub(super) const OFF_EX: [f64; 3] = [0.5, 0.0, 0.0];
pub(super) const OFF_EY: [f64; 3] = [0.0, 0.5, 0.0];
pub(super) const OFF_EZ: [f64; 3] = [0.0, 0.0, 0.5];
pub(super) const OFF_HX: [f64; 3] = [0.0, 0.5, 0.5];
pub(super) const OFF_HY: [f64; 3] = [0.5, 0.0, 0.5];
pub(super) const OFF_HZ: [f64; 3] = [0.5, 0.5, 0.0];

pub(super) fn component_offset(c: Component) -> [f64; 3] {
    match c {
        Component::Ex => OFF_EX,
        Component::Ey => OFF_EY,
        Component::Ez => OFF_EZ,
        Component::Hx => OFF_HX,
        Component::Hy => OFF_HY,
        Component::Hz => OFF_HZ,
    }
}

pub struct Solver3d {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dt: f64,
    pub origin: [f64; 3],
    pub(super) step_index: usize,
    pub(super) ex: Vec<f64>,
    pub(super) ey: Vec<f64>,
    pub(super) ez: Vec<f64>,
    pub(super) hx: Vec<f64>,
    pub(super) hy: Vec<f64>,
    pub(super) hz: Vec<f64>,
    cbx: Vec<f64>,
    cby: Vec<f64>,
    cbz: Vec<f64>,
    db_row: Vec<f64>,
    px: AxisProfile,
    py: AxisProfile,
    pz: AxisProfile,
    psi_ex_y: Vec<f64>,
    psi_ex_z: Vec<f64>,
    psi_ey_z: Vec<f64>,
    psi_ey_x: Vec<f64>,
    psi_ez_x: Vec<f64>,
    psi_ez_y: Vec<f64>,
    psi_hx_y: Vec<f64>,
    psi_hx_z: Vec<f64>,
    psi_hy_x: Vec<f64>,
    psi_hy_z: Vec<f64>,
    psi_hz_x: Vec<f64>,
    psi_hz_y: Vec<f64>,
}

/// Inner row kernel where the second derivative axis is z (per-k CPML
/// coefficients). `P1`/`P2` gate the psi recursions for the row axis and
/// the z axis; signs are folded into the (hi, lo) slice pairing.
#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn kern_z<const P1: bool, const P2: bool>(
    lo: usize,
    hi: usize,
    out: &mut [f64],
    scale: &[f64],
    a1_hi: &[f64],
    a1_lo: &[f64],
    ik1: f64,
    b1: f64,
    c1: f64,
    psi1: &mut [f64],
    a2_hi: &[f64],
    a2_lo: &[f64],
    ik2: &[f64],
    b2: &[f64],
    c2: &[f64],
    psi2: &mut [f64],
) {
    for k in lo..hi {
        let d1 = a1_hi[k] - a1_lo[k];
        let d2 = a2_hi[k] - a2_lo[k];
        let mut rhs = ik1 * d1 + ik2[k] * d2;
        if P1 {
            psi1[k] = b1 * psi1[k] + c1 * d1;
            rhs += psi1[k];
        }
        if P2 {
            psi2[k] = b2[k] * psi2[k] + c2[k] * d2;
            rhs += psi2[k];
        }
        out[k] += scale[k] * rhs;
    }
}

impl Solver3d {
    pub fn new(
        grid: &PermittivityGrid,
        boundary: Boundary,
        courant: f64,
    ) -> Result<Self, FdtdError> {
        if !(courant > 0.0 && courant <= 1.0) {
            return Err(FdtdError::CourantViolation { s: courant });
        }
        let [nx, ny, nz] = grid.dims;
        let dx = grid.spacing;
        let dt = courant * dx / 3.0f64.sqrt();
        let (px, py, pz) = match boundary {
            Boundary::Pec => (AxisProfile::pec(nx), AxisProfile::pec(ny), AxisProfile::pec(nz)),
            Boundary::Pml(params) => (
                AxisProfile::new(&params, nx, dx, dt)?,
                AxisProfile::new(&params, ny, dx, dt)?,
                AxisProfile::new(&params, nz, dx, dt)?,
            ),
        };
        for (axis, n, p) in [(0, nx, &px), (1, ny, &py), (2, nz, &pz)] {
            let interior = n.saturating_sub(2 * p.layers);
            if interior < 4 {
                return Err(FdtdError::DomainTooSmall { axis, interior });
            }
        }
        let len = nx * ny * nz;
        // Permittivity at E-component positions: average of the four cells
        // sharing the edge (indices clamped at the walls).
        let eps_cell = |i: usize, j: usize, k: usize| -> f64 {
            grid.eps[(i * ny + j) * nz + k]
        };
        let mut cbx = vec![0.0; len];
        let mut cby = vec![0.0; len];
        let mut cbz = vec![0.0; len];
        let cm = |v: usize| v.saturating_sub(1);
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..nz {
                    let idx = (i * ny + j) * nz + k;
                    let ex_eps = 0.25
                        * (eps_cell(i, cm(j), cm(k))
                            + eps_cell(i, cm(j), k.min(nz - 1))
                            + eps_cell(i, j.min(ny - 1), cm(k))
                            + eps_cell(i, j, k));
                    let ey_eps = 0.25
                        * (eps_cell(cm(i), j, cm(k))
                            + eps_cell(cm(i), j, k)
                            + eps_cell(i, j, cm(k))
                            + eps_cell(i, j, k));
                    let ez_eps = 0.25
                        * (eps_cell(cm(i), cm(j), k)
                            + eps_cell(cm(i), j, k)
                            + eps_cell(i, cm(j), k)
                            + eps_cell(i, j, k));
                    cbx[idx] = dt / (ex_eps * dx);
                    cby[idx] = dt / (ey_eps * dx);
                    cbz[idx] = dt / (ez_eps * dx);
                }
            }
        }
        Ok(Solver3d {
            nx,
            ny,
            nz,
            dx,
            dt,
            origin: grid.origin,
            step_index: 0,
            ex: vec![0.0; len],
            ey: vec![0.0; len],
            ez: vec![0.0; len],
            hx: vec![0.0; len],
            hy: vec![0.0; len],
            hz: vec![0.0; len],
            cbx,
            cby,
            cbz,
            db_row: vec![dt / dx; nz],
            px,
            py,
            pz,
            psi_ex_y: vec![0.0; len],
            psi_ex_z: vec![0.0; len],
            psi_ey_z: vec![0.0; len],
            psi_ey_x: vec![0.0; len],
            psi_ez_x: vec![0.0; len],
            psi_ez_y: vec![0.0; len],
            psi_hx_y: vec![0.0; len],
            psi_hx_z: vec![0.0; len],
            psi_hy_x: vec![0.0; len],
            psi_hy_z: vec![0.0; len],
            psi_hz_x: vec![0.0; len],
            psi_hz_y: vec![0.0; len],
        })
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    /// Physical time of the current E fields.
    pub fn time_e(&self) -> f64 {
        self.step_index as f64 * self.dt
    }

    /// Snap a physical position to the nearest node of a component,
    /// clamped into the grid.
    pub fn snap(&self, position_nm: [f64; 3], component: Component) -> [usize; 3] {
        let off = component_offset(component);
        let n = [self.nx, self.ny, self.nz];
        std::array::from_fn(|a| {
            let f = (position_nm[a] - self.origin[a]) / self.dx - off[a];
            (f.round().max(0.0) as usize).min(n[a] - 1)
        })
    }

    pub fn idx(&self, p: [usize; 3]) -> usize {
        (p[0] * self.ny + p[1]) * self.nz + p[2]
    }

    pub fn field(&self, c: Component) -> &[f64] {
        match c {
            Component::Ex => &self.ex,
            Component::Ey => &self.ey,
            Component::Ez => &self.ez,
            Component::Hx => &self.hx,
            Component::Hy => &self.hy,
            Component::Hz => &self.hz,
        }
    }

    /// Interior (non-PML) index range on an axis.
    pub fn interior(&self) -> [(usize, usize); 3] {
        [
            (self.px.layers, self.nx - self.px.layers),
            (self.py.layers, self.ny - self.py.layers),
            (self.pz.layers, self.nz - self.pz.layers),
        ]
    }

    /// One leapfrog step: H half-update, then E full update with soft
    /// current injection `sources_j` (pairs of flattened component node and
    /// current density to subtract, evaluated by the caller at t_{n+1/2}).
    pub fn step(&mut self, injections: &[(Component, usize, f64)]) {
        self.update_h();
        self.update_e();
        // Soft sources: E += -dt/eps * J. The cb arrays carry dt/(eps dx),
        // so multiply by dx.
        for &(comp, idx, j_density) in injections {
            let cb = match comp {
                Component::Ex => &self.cbx,
                Component::Ey => &self.cby,
                Component::Ez => &self.cbz,
                _ => continue,
            };
            let delta = -cb[idx] * self.dx * j_density;
            match comp {
                Component::Ex => self.ex[idx] += delta,
                Component::Ey => self.ey[idx] += delta,
                Component::Ez => self.ez[idx] += delta,
                _ => {}
            }
        }
        self.step_index += 1;
    }

    /// Interior electromagnetic energy in the discrete conserved form
    /// `1/2 (eps E^n, E^n) + 1/2 (H^{n-1/2}, H^{n+1/2})`, evaluated without
    /// mutating the state (the forward H half-step is recomputed on the
    /// fly). Also returns the maximum field magnitude for the blow-up guard.
    pub fn energy_and_max(&self) -> (f64, f64) {
        let [(ix0, ix1), (iy0, iy1), (iz0, iz1)] = self.interior();
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let slab = ny * nz;
        let db = self.dt / self.dx;
        let dv = self.dx * self.dx * self.dx;
        // Per-slab partials, summed serially afterwards for determinism.
        let partials: Vec<(f64, f64)> = (ix0..ix1)
            .into_par_iter()
            .map(|i| {
                let mut e_sum = 0.0;
                let mut max_abs = 0.0f64;
                for j in iy0..iy1 {
                    let base = (i * ny + j) * nz;
                    for k in iz0..iz1 {
                        let idx = base + k;
                        // eps E^2 via the stored cb = dt/(eps dx).
                        let ex = self.ex[idx];
                        let ey = self.ey[idx];
                        let ez = self.ez[idx];
                        e_sum += self.dt / self.dx
                            * (ex * ex / self.cbx[idx]
                                + ey * ey / self.cby[idx]
                                + ez * ez / self.cbz[idx]);
                        // H product with the recomputed forward half-step.
                        // Components that the update skips at the walls are
                        // identically zero, so gating each product on its own
                        // update condition is exact.
                        let (hx, hy, hz) = (self.hx[idx], self.hy[idx], self.hz[idx]);
                        if j + 1 < ny && k + 1 < nz {
                            e_sum += hx
                                * (hx
                                    + db * ((self.ey[idx + 1] - self.ey[idx])
                                        - (self.ez[idx + nz] - self.ez[idx])));
                        }
                        if i + 1 < nx && k + 1 < nz {
                            e_sum += hy
                                * (hy
                                    + db * ((self.ez[idx + slab] - self.ez[idx])
                                        - (self.ex[idx + 1] - self.ex[idx])));
                        }
                        if i + 1 < nx && j + 1 < ny {
                            e_sum += hz
                                * (hz
                                    + db * ((self.ex[idx + nz] - self.ex[idx])
                                        - (self.ey[idx + slab] - self.ey[idx])));
                        }
                        for v in [ex, ey, ez, hx, hy, hz] {
                            max_abs = max_abs.max(v.abs());
                        }
                    }
                }
                (e_sum, max_abs)
            })
            .collect();
        let mut energy = 0.0;
        let mut max_abs = 0.0f64;
        for (e, m) in partials {
            energy += e;
            max_abs = max_abs.max(m);
        }
        (0.5 * energy * dv, max_abs)
    }

    /// Interior electromagnetic energy (scaled J).
    pub fn energy(&self) -> f64 {
        self.energy_and_max().0
    }

    fn update_e(&mut self) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let slab = ny * nz;
        let (lz, hz_start) = z_segments(&self.pz, nz);

        // Ex: d1 = +dHz/dy (row axis y), d2 = -dHy/dz (z axis).
        {
            let (hz, hy, cb) = (&self.hz, &self.hy, &self.cbx);
            let (py, pz) = (&self.py, &self.pz);
            self.ex
                .par_chunks_mut(slab)
                .zip(self.psi_ex_y.par_chunks_mut(slab))
                .zip(self.psi_ex_z.par_chunks_mut(slab))
                .enumerate()
                .for_each(|(i, ((exs, p1s), p2s))| {
                    for j in 1..ny {
                        let row = j * nz;
                        let base = i * slab + row;
                        let p1_on = py.in_pml(j, ny);
                        dispatch_z(
                            1,
                            lz,
                            hz_start,
                            nz,
                            &mut exs[row..row + nz],
                            &cb[base..base + nz],
                            &hz[base..base + nz],
                            &hz[base - nz..base],
                            py.inv_kappa_e[j],
                            py.b_e[j],
                            py.c_e[j],
                            &mut p1s[row..row + nz],
                            p1_on,
                            &hy[base - 1..base + nz - 1],
                            &hy[base..base + nz],
                            &pz.inv_kappa_e,
                            &pz.b_e,
                            &pz.c_e,
                            &mut p2s[row..row + nz],
                        );
                    }
                });
        }
        // Ey: d1 = -dHz/dx (row axis x), d2 = +dHx/dz.
        {
            let (hz, hx, cb) = (&self.hz, &self.hx, &self.cby);
            let (px, pz) = (&self.px, &self.pz);
            self.ey
                .par_chunks_mut(slab)
                .zip(self.psi_ey_x.par_chunks_mut(slab))
                .zip(self.psi_ey_z.par_chunks_mut(slab))
                .enumerate()
                .for_each(|(i, ((eys, p1s), p2s))| {
                    if i == 0 {
                        return;
                    }
                    let p1_on = px.in_pml(i, nx);
                    for j in 0..ny {
                        let row = j * nz;
                        let base = i * slab + row;
                        dispatch_z(
                            1,
                            lz,
                            hz_start,
                            nz,
                            &mut eys[row..row + nz],
                            &cb[base..base + nz],
                            &hz[base - slab..base - slab + nz],
                            &hz[base..base + nz],
                            px.inv_kappa_e[i],
                            px.b_e[i],
                            px.c_e[i],
                            &mut p1s[row..row + nz],
                            p1_on,
                            &hx[base..base + nz],
                            &hx[base - 1..base + nz - 1],
                            &pz.inv_kappa_e,
                            &pz.b_e,
                            &pz.c_e,
                            &mut p2s[row..row + nz],
                        );
                    }
                });
        }
        // Ez: d1 = +dHy/dx, d2 = -dHx/dy; both axes row-constant.
        {
            let (hy, hx, cb) = (&self.hy, &self.hx, &self.cbz);
            let (px, py) = (&self.px, &self.py);
            self.ez
                .par_chunks_mut(slab)
                .zip(self.psi_ez_x.par_chunks_mut(slab))
                .zip(self.psi_ez_y.par_chunks_mut(slab))
                .enumerate()
                .for_each(|(i, ((ezs, p1s), p2s))| {
                    if i == 0 {
                        return;
                    }
                    let p1_on = px.in_pml(i, nx);
                    for j in 1..ny {
                        let row = j * nz;
                        let base = i * slab + row;
                        let p2_on = py.in_pml(j, ny);
                        dispatch_xy(
                            0,
                            nz,
                            &mut ezs[row..row + nz],
                            &cb[base..base + nz],
                            &hy[base..base + nz],
                            &hy[base - slab..base - slab + nz],
                            px.inv_kappa_e[i],
                            px.b_e[i],
                            px.c_e[i],
                            &mut p1s[row..row + nz],
                            p1_on,
                            &hx[base - nz..base],
                            &hx[base..base + nz],
                            py.inv_kappa_e[j],
                            py.b_e[j],
                            py.c_e[j],
                            &mut p2s[row..row + nz],
                            p2_on,
                        );
                    }
                });
        }
    }

    fn update_h(&mut self) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let slab = ny * nz;
        let (lz, hz_start) = z_segments_h(&self.pz, nz);
        let db = &self.db_row;

        // Hx: d1 = -dEz/dy (row axis y, half positions), d2 = +dEy/dz.
        {
            let (ez, ey) = (&self.ez, &self.ey);
            let (py, pz) = (&self.py, &self.pz);
            self.hx
                .par_chunks_mut(slab)
                .zip(self.psi_hx_y.par_chunks_mut(slab))
                .zip(self.psi_hx_z.par_chunks_mut(slab))
                .enumerate()
                .for_each(|(i, ((hxs, p1s), p2s))| {
                    for j in 0..ny - 1 {
                        let row = j * nz;
                        let base = i * slab + row;
                        let p1_on = py.in_pml(j, ny);
                        dispatch_z(
                            0,
                            lz,
                            hz_start,
                            nz - 1,
                            &mut hxs[row..row + nz],
                            db,
                            &ez[base..base + nz],
                            &ez[base + nz..base + 2 * nz],
                            py.inv_kappa_h[j],
                            py.b_h[j],
                            py.c_h[j],
                            &mut p1s[row..row + nz],
                            p1_on,
                            &ey[base + 1..base + nz],
                            &ey[base..base + nz - 1],
                            &pz.inv_kappa_h,
                            &pz.b_h,
                            &pz.c_h,
                            &mut p2s[row..row + nz],
                        );
                    }
                });
        }
        // Hy: d1 = +dEz/dx, d2 = -dEx/dz.
        {
            let (ez, ex) = (&self.ez, &self.ex);
            let (px, pz) = (&self.px, &self.pz);
            self.hy
                .par_chunks_mut(slab)
                .zip(self.psi_hy_x.par_chunks_mut(slab))
                .zip(self.psi_hy_z.par_chunks_mut(slab))
                .enumerate()
                .for_each(|(i, ((hys, p1s), p2s))| {
                    if i + 1 >= nx {
                        return;
                    }
                    let p1_on = px.in_pml(i, nx);
                    for j in 0..ny {
                        let row = j * nz;
                        let base = i * slab + row;
                        dispatch_z(
                            0,
                            lz,
                            hz_start,
                            nz - 1,
                            &mut hys[row..row + nz],
                            db,
                            &ez[base + slab..base + slab + nz],
                            &ez[base..base + nz],
                            px.inv_kappa_h[i],
                            px.b_h[i],
                            px.c_h[i],
                            &mut p1s[row..row + nz],
                            p1_on,
                            &ex[base..base + nz - 1],
                            &ex[base + 1..base + nz],
                            &pz.inv_kappa_h,
                            &pz.b_h,
                            &pz.c_h,
                            &mut p2s[row..row + nz],
                        );
                    }
                });
        }
        // Hz: d1 = +dEx/dy, d2 = -dEy/dx; both row-constant.
        {
            let (ex, ey) = (&self.ex, &self.ey);
            let (px, py) = (&self.px, &self.py);
            self.hz
                .par_chunks_mut(slab)
                .zip(self.psi_hz_y.par_chunks_mut(slab))
                .zip(self.psi_hz_x.par_chunks_mut(slab))
                .enumerate()
                .for_each(|(i, ((hzs, p1s), p2s))| {
                    if i + 1 >= nx {
                        return;
                    }
                    let p2_on = px.in_pml(i, nx);
                    for j in 0..ny - 1 {
                        let row = j * nz;
                        let base = i * slab + row;
                        let p1_on = py.in_pml(j, ny);
                        dispatch_xy(
                            0,
                            nz,
                            &mut hzs[row..row + nz],
                            db,
                            &ex[base + nz..base + 2 * nz],
                            &ex[base..base + nz],
                            py.inv_kappa_h[j],
                            py.b_h[j],
                            py.c_h[j],
                            &mut p1s[row..row + nz],
                            p1_on,
                            &ey[base..base + nz],
                            &ey[base + slab..base + slab + nz],
                            px.inv_kappa_h[i],
                            px.b_h[i],
                            px.c_h[i],
                            &mut p2s[row..row + nz],
                            p2_on,
                        );
                    }
                });
        }
    }

    pub(super) fn run_impl(
        &mut self,
        sources: &[DipoleSource],
        monitors: &[MonitorSpec],
        control: RunControl,
    ) -> Result<MonitorRecords, FdtdError> {
        accum::run_with_monitors(self, sources, monitors, control)
    }
}

/// z-axis PML segment bounds for E updates (integer positions): the low
/// segment ends at `lz`, the high segment starts at `hz_start`.
fn z_segments(pz: &AxisProfile, nz: usize) -> (usize, usize) {
    if pz.layers == 0 {
        (0, nz)
    } else {
        (pz.layers, nz - pz.layers)
    }
}

fn z_segments_h(pz: &AxisProfile, nz: usize) -> (usize, usize) {
    z_segments(pz, nz)
}

/// Run the z-kernel over the three z segments with psi recursions enabled
/// only where the coefficients are nonzero.
#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn dispatch_z(
    k_min: usize,
    lz: usize,
    hz_start: usize,
    k_max: usize,
    out: &mut [f64],
    scale: &[f64],
    a1_hi: &[f64],
    a1_lo: &[f64],
    ik1: f64,
    b1: f64,
    c1: f64,
    psi1: &mut [f64],
    p1_on: bool,
    a2_hi: &[f64],
    a2_lo: &[f64],
    ik2: &[f64],
    b2: &[f64],
    c2: &[f64],
    psi2: &mut [f64],
) {
    let lo_end = lz.clamp(k_min, k_max);
    let hi_start = hz_start.clamp(lo_end, k_max);
    macro_rules! seg {
        ($p1:literal, $p2:literal, $lo:expr, $hi:expr) => {
            kern_z::<$p1, $p2>(
                $lo, $hi, out, scale, a1_hi, a1_lo, ik1, b1, c1, psi1, a2_hi, a2_lo, ik2, b2,
                c2, psi2,
            )
        };
    }
    if p1_on {
        seg!(true, true, k_min, lo_end);
        seg!(true, false, lo_end, hi_start);
        seg!(true, true, hi_start, k_max);
    } else {
        seg!(false, true, k_min, lo_end);
        seg!(false, false, lo_end, hi_start);
        seg!(false, true, hi_start, k_max);
    }
}

#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn dispatch_xy(
    k_min: usize,
    k_max: usize,
    out: &mut [f64],
    scale: &[f64],
    a1_hi: &[f64],
    a1_lo: &[f64],
    ik1: f64,
    b1: f64,
    c1: f64,
    psi1: &mut [f64],
    p1_on: bool,
    a2_hi: &[f64],
    a2_lo: &[f64],
    ik2: f64,
    b2: f64,
    c2: f64,
    psi2: &mut [f64],
    p2_on: bool,
) {
    macro_rules! seg {
        ($p1:literal, $p2:literal) => {
            kern_plain::<$p1, $p2>(
                k_min, k_max, out, scale, a1_hi, a1_lo, ik1, b1, c1, psi1, a2_hi, a2_lo, ik2,
                b2, c2, psi2,
            )
        };
    }
    match (p1_on, p2_on) {
        (false, false) => seg!(false, false),
        (true, false) => seg!(true, false),
        (false, true) => seg!(false, true),
        (true, true) => seg!(true, true),
    }
}

/// Row kernel with both CPML coefficient sets row-constant.
#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn kern_plain<const P1: bool, const P2: bool>(
    lo: usize,
    hi: usize,
    out: &mut [f64],
    scale: &[f64],
    a1_hi: &[f64],
    a1_lo: &[f64],
    ik1: f64,
    b1: f64,
    c1: f64,
    psi1: &mut [f64],
    a2_hi: &[f64],
    a2_lo: &[f64],
    ik2: f64,
    b2: f64,
    c2: f64,
    psi2: &mut [f64],
) {
    for k in lo..hi {
        let d1 = a1_hi[k] - a1_lo[k];
        let d2 = a2_hi[k] - a2_lo[k];
        let mut rhs = ik1 * d1 + ik2 * d2;
        if P1 {
            psi1[k] = b1 * psi1[k] + c1 * d1;
            rhs += psi1[k];
        }
        if P2 {
            psi2[k] = b2 * psi2[k] + c2 * d2;
            rhs += psi2[k];
        }
        out[k] += scale[k] * rhs;
    }
}
