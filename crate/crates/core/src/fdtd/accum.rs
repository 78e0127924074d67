//! The 3D run loop: source injection, monitor accumulation, early stop.

use super::monitor::{
    Component, DftPlaneRecord, FluxRecord, MonitorRecords, MonitorSpec, ProbeRecord,
};
use super::solver3d::{RunControl, Solver3d};
use super::source::DipoleSource;
use super::FdtdError;
use num_complex::Complex;
use rayon::prelude::*;

type C64 = Complex<f64>;

struct ProbeAcc {
    name: String,
    component: Component,
    idx: usize,
    values: Vec<f64>,
}

/// DFT plane over cells [i0, i1) x [j0, j1) at integer z line k0.
/// Buffers are laid out cell-major with the wavelength index fastest so one
/// field load feeds all frequencies.
struct PlaneAcc {
    name: String,
    k0: usize,
    i0: usize,
    i1: usize,
    j0: usize,
    j1: usize,
    z_nm: f64,
    wavelengths: Vec<f64>,
    stride: usize,
    ex: Vec<C64>,
    ey: Vec<C64>,
    ez: Vec<C64>,
    hx: Vec<C64>,
    hy: Vec<C64>,
}

#[derive(Clone, Copy)]
enum Normal {
    X,
    Y,
    Z,
}

/// One face of a flux box: tangential phasors over an (a, b) rectangle at an
/// integer plane index. Axes (normal, a, b) are the cyclic triple.
struct FaceAcc {
    normal: Normal,
    plane: usize,
    a0: usize,
    a1: usize,
    b0: usize,
    b1: usize,
    sign: f64,
    e_a: Vec<C64>,
    e_b: Vec<C64>,
    h_a: Vec<C64>,
    h_b: Vec<C64>,
}

struct BoxAcc {
    name: String,
    wavelengths: Vec<f64>,
    faces: Vec<FaceAcc>,
}

fn accumulate_plane(acc: &mut PlaneAcc, solver: &Solver3d, e_phases: &[C64], h_phases: &[C64]) {
    let nl = acc.wavelengths.len();
    let njr = acc.j1 - acc.j0;
    let ny = solver.ny;
    let nz = solver.nz;
    let k0 = acc.k0;
    let row_len = njr * nl;
    let (i0, j0) = (acc.i0, acc.j0);
    let fields: [(&mut Vec<C64>, Component, bool); 5] = [
        (&mut acc.ex, Component::Ex, false),
        (&mut acc.ey, Component::Ey, false),
        (&mut acc.ez, Component::Ez, true),
        (&mut acc.hx, Component::Hx, true),
        (&mut acc.hy, Component::Hy, true),
    ];
    for (buf, comp, z_interp) in fields {
        let field = solver.field(comp);
        let phases = if comp.is_electric() { e_phases } else { h_phases };
        // Ez/Hx/Hy sit at k +/- 1/2; average onto the plane.
        buf.par_chunks_mut(row_len).enumerate().for_each(|(ir, row)| {
            let i = i0 + ir;
            for jr in 0..njr {
                let idx = (i * ny + (j0 + jr)) * nz + k0;
                let v = if z_interp {
                    0.5 * (field[idx - 1] + field[idx])
                } else {
                    field[idx]
                };
                let cell = &mut row[jr * nl..(jr + 1) * nl];
                for (c, ph) in cell.iter_mut().zip(phases) {
                    *c += ph * v;
                }
            }
        });
    }
}

fn accumulate_face(acc: &mut FaceAcc, solver: &Solver3d, e_phases: &[C64], h_phases: &[C64]) {
    let (ny, nz) = (solver.ny, solver.nz);
    let nl = e_phases.len();
    let nb = acc.b1 - acc.b0;
    let p = acc.plane;
    // Index helpers: map (a, b) to a flattened field index given the normal.
    let idx = |a: usize, b: usize| -> usize {
        match acc.normal {
            Normal::Z => ((a * ny) + b) * nz + p,
            Normal::X => ((p * ny) + a) * nz + b,
            Normal::Y => ((a * ny) + p) * nz + b,
        }
    };
    // Field components tangential to the face. H is sampled at its native
    // half-step position just above the E plane (no interpolation): with the
    // exact-time DFT phasors this staggered pairing satisfies the discrete
    // Poynting identity, so closed source-free boxes net to zero at machine
    // precision.
    let (ea_f, eb_f, ha_f, hb_f) = match acc.normal {
        Normal::Z => (&solver.ex, &solver.ey, &solver.hx, &solver.hy),
        Normal::X => (&solver.ey, &solver.ez, &solver.hy, &solver.hz),
        Normal::Y => (&solver.ez, &solver.ex, &solver.hz, &solver.hx),
    };
    for a in acc.a0..acc.a1 {
        for b in acc.b0..acc.b1 {
            let cell = idx(a, b);
            let off = ((a - acc.a0) * nb + (b - acc.b0)) * nl;
            let ea = ea_f[cell];
            let eb = eb_f[cell];
            let ha = ha_f[cell];
            let hb = hb_f[cell];
            for l in 0..nl {
                acc.e_a[off + l] += e_phases[l] * ea;
                acc.e_b[off + l] += e_phases[l] * eb;
                acc.h_a[off + l] += h_phases[l] * ha;
                acc.h_b[off + l] += h_phases[l] * hb;
            }
        }
    }
}

fn face_power(acc: &FaceAcc, l: usize, nl: usize, da: f64) -> f64 {
    // (E x H*) . n over the cyclic triple: E_a H_b* - E_b H_a*.
    let mut p = 0.0;
    let cells = (acc.a1 - acc.a0) * (acc.b1 - acc.b0);
    for c in 0..cells {
        let o = c * nl + l;
        p += (acc.e_a[o] * acc.h_b[o].conj() - acc.e_b[o] * acc.h_a[o].conj()).re;
    }
    0.5 * p * da * acc.sign
}

pub(super) fn run_with_monitors(
    solver: &mut Solver3d,
    sources: &[DipoleSource],
    monitors: &[MonitorSpec],
    control: RunControl,
) -> Result<MonitorRecords, FdtdError> {
    let dt = solver.dt;
    let dv = solver.dx * solver.dx * solver.dx;
    let [(ix0, ix1), (iy0, iy1), (iz0, iz1)] = solver.interior();

    // Sources: snap each Cartesian component to its node.
    let mut injections_template = Vec::new();
    let mut turn_off = 0.0f64;
    for src in sources {
        src.validate()?;
        let pol = src.unit_polarization();
        for (c, comp) in
            [(0, Component::Ex), (1, Component::Ey), (2, Component::Ez)]
        {
            if pol[c].abs() < 1e-12 {
                continue;
            }
            let cell = solver.snap(src.position_nm, comp);
            if cell[0] < ix0
                || cell[0] >= ix1
                || cell[1] < iy0
                || cell[1] >= iy1
                || cell[2] < iz0
                || cell[2] >= iz1
            {
                return Err(FdtdError::BadScene(format!(
                    "source at {:?} nm lies outside the non-PML interior",
                    src.position_nm
                )));
            }
            injections_template.push((comp, solver.idx(cell), pol[c]));
        }
        turn_off = turn_off.max(src.waveform.turn_off_time());
    }

    // Monitors.
    let mut probes = Vec::new();
    let mut planes = Vec::new();
    let mut boxes = Vec::new();
    for spec in monitors {
        spec.validate()?;
        match spec {
            MonitorSpec::TimeProbe { name, position_nm, component } => {
                let cell = solver.snap(*position_nm, *component);
                probes.push(ProbeAcc {
                    name: name.clone(),
                    component: *component,
                    idx: solver.idx(cell),
                    values: Vec::new(),
                });
            }
            MonitorSpec::DftPlane { name, z_nm, wavelengths_nm, half_size_nm, stride } => {
                let k0 = solver.snap([0.0, 0.0, *z_nm], Component::Ex)[2];
                if k0 < iz0.max(1) || k0 >= iz1 {
                    return Err(FdtdError::BadScene(format!(
                        "DFT plane {name} at z = {z_nm} nm lies outside the interior"
                    )));
                }
                let (i0, i1, j0, j1) = match half_size_nm {
                    None => (ix0, ix1, iy0, iy1),
                    Some(h) => {
                        let ci = solver.snap([-h, -h, 0.0], Component::Ex);
                        let cj = solver.snap([*h, *h, 0.0], Component::Ex);
                        (
                            ci[0].max(ix0),
                            (cj[0] + 1).min(ix1),
                            ci[1].max(iy0),
                            (cj[1] + 1).min(iy1),
                        )
                    }
                };
                let cells = (i1 - i0) * (j1 - j0) * wavelengths_nm.len();
                planes.push(PlaneAcc {
                    name: name.clone(),
                    k0,
                    i0,
                    i1,
                    j0,
                    j1,
                    z_nm: solver.origin[2] + k0 as f64 * solver.dx,
                    wavelengths: wavelengths_nm.clone(),
                    stride: (*stride).max(1),
                    ex: vec![C64::new(0.0, 0.0); cells],
                    ey: vec![C64::new(0.0, 0.0); cells],
                    ez: vec![C64::new(0.0, 0.0); cells],
                    hx: vec![C64::new(0.0, 0.0); cells],
                    hy: vec![C64::new(0.0, 0.0); cells],
                });
            }
            MonitorSpec::FluxBox { name, center_nm, half_size_nm, wavelengths_nm } => {
                let lo = solver.snap(
                    [
                        center_nm[0] - half_size_nm[0],
                        center_nm[1] - half_size_nm[1],
                        center_nm[2] - half_size_nm[2],
                    ],
                    Component::Ez, // integer x, y; the z snap is separate
                );
                let hi = solver.snap(
                    [
                        center_nm[0] + half_size_nm[0],
                        center_nm[1] + half_size_nm[1],
                        center_nm[2] + half_size_nm[2],
                    ],
                    Component::Ez,
                );
                let kz = |z: f64| solver.snap([0.0, 0.0, z], Component::Ex)[2];
                let (bi, bj) = ((lo[0], hi[0]), (lo[1], hi[1]));
                let (bk0, bk1) = (kz(center_nm[2] - half_size_nm[2]), kz(center_nm[2] + half_size_nm[2]));
                if bi.0 < ix0.max(1)
                    || bi.1 >= ix1
                    || bj.0 < iy0.max(1)
                    || bj.1 >= iy1
                    || bk0 < iz0.max(1)
                    || bk1 >= iz1
                    || bi.0 >= bi.1
                    || bj.0 >= bj.1
                    || bk0 >= bk1
                {
                    return Err(FdtdError::BadScene(format!(
                        "flux box {name} does not fit inside the interior"
                    )));
                }
                let nl = wavelengths_nm.len();
                let face = |normal, plane, a0: usize, a1: usize, b0: usize, b1: usize, sign| {
                    let n = (a1 - a0) * (b1 - b0) * nl;
                    FaceAcc {
                        normal,
                        plane,
                        a0,
                        a1,
                        b0,
                        b1,
                        sign,
                        e_a: vec![C64::new(0.0, 0.0); n],
                        e_b: vec![C64::new(0.0, 0.0); n],
                        h_a: vec![C64::new(0.0, 0.0); n],
                        h_b: vec![C64::new(0.0, 0.0); n],
                    }
                };
                boxes.push(BoxAcc {
                    name: name.clone(),
                    wavelengths: wavelengths_nm.clone(),
                    faces: vec![
                        face(Normal::Z, bk0, bi.0, bi.1, bj.0, bj.1, -1.0),
                        face(Normal::Z, bk1, bi.0, bi.1, bj.0, bj.1, 1.0),
                        face(Normal::X, bi.0, bj.0, bj.1, bk0, bk1, -1.0),
                        face(Normal::X, bi.1, bj.0, bj.1, bk0, bk1, 1.0),
                        face(Normal::Y, bj.0, bk0, bk1, bi.0, bi.1, -1.0),
                        face(Normal::Y, bj.1, bk0, bk1, bi.0, bi.1, 1.0),
                    ],
                });
            }
        }
    }

    let mut records = MonitorRecords {
        dt,
        source_currents: vec![Vec::new(); sources.len()],
        ..Default::default()
    };
    records.source_off_step = (turn_off / dt).ceil() as usize + 1;

    let mut peak_energy = 0.0f64;
    let mut injections = injections_template.clone();
    for _ in 0..control.max_steps {
        let n = solver.step_index();
        let t_h = (n as f64 + 0.5) * dt;
        let t_e = (n as f64 + 1.0) * dt;
        for (slot, src) in injections.iter_mut().zip(&injections_template) {
            slot.2 = src.2; // reset polarization weight
        }
        // Current densities at t_{n+1/2}.
        let mut k = 0;
        for (s, src) in sources.iter().enumerate() {
            let j = src.waveform.evaluate(t_h);
            records.source_currents[s].push(j);
            let pol = src.unit_polarization();
            for c in 0..3 {
                if pol[c].abs() < 1e-12 {
                    continue;
                }
                injections[k].2 = pol[c] * j / dv;
                k += 1;
            }
        }
        solver.step(&injections);

        for probe in &mut probes {
            probe.values.push(solver.field(probe.component)[probe.idx]);
        }
        for plane in &mut planes {
            if n % plane.stride == 0 {
                let sdt = dt * plane.stride as f64;
                let e_phases: Vec<C64> = plane
                    .wavelengths
                    .iter()
                    .map(|&w| C64::from_polar(sdt, 2.0 * std::f64::consts::PI / w * t_e))
                    .collect();
                let h_phases: Vec<C64> = plane
                    .wavelengths
                    .iter()
                    .map(|&w| C64::from_polar(sdt, 2.0 * std::f64::consts::PI / w * t_h))
                    .collect();
                accumulate_plane(plane, solver, &e_phases, &h_phases);
            }
        }
        for b in &mut boxes {
            let e_phases: Vec<C64> = b
                .wavelengths
                .iter()
                .map(|&w| C64::from_polar(dt, 2.0 * std::f64::consts::PI / w * t_e))
                .collect();
            let h_phases: Vec<C64> = b
                .wavelengths
                .iter()
                .map(|&w| C64::from_polar(dt, 2.0 * std::f64::consts::PI / w * t_h))
                .collect();
            for f in &mut b.faces {
                accumulate_face(f, solver, &e_phases, &h_phases);
            }
        }

        records.steps_run = solver.step_index();
        if solver.step_index() % control.check_interval == 0 {
            let (energy, max_abs) = solver.energy_and_max();
            if !energy.is_finite() || max_abs > control.blowup_guard {
                return Err(FdtdError::NumericalBlowup {
                    step: solver.step_index(),
                    max_abs,
                });
            }
            peak_energy = peak_energy.max(energy);
            if let Some(fraction) = control.early_stop_fraction {
                if t_e > turn_off && peak_energy > 0.0 && energy < fraction * peak_energy {
                    break;
                }
            }
        }
    }

    // Finalize records.
    for probe in probes {
        let t0 = if probe.component.is_electric() { dt } else { 0.5 * dt };
        records.probes.insert(
            probe.name.clone(),
            ProbeRecord { component: probe.component, t0, dt, values: probe.values },
        );
    }
    for plane in planes {
        let nl = plane.wavelengths.len();
        let (nxr, nyr) = (plane.i1 - plane.i0, plane.j1 - plane.j0);
        let unpack = |buf: &[C64]| -> Vec<Vec<C64>> {
            (0..nl)
                .map(|l| (0..nxr * nyr).map(|c| buf[c * nl + l]).collect())
                .collect()
        };
        records.planes.insert(
            plane.name.clone(),
            DftPlaneRecord {
                wavelengths_nm: plane.wavelengths.clone(),
                nx: nxr,
                ny: nyr,
                spacing: solver.dx,
                z_nm: plane.z_nm,
                ex: unpack(&plane.ex),
                ey: unpack(&plane.ey),
                ez: unpack(&plane.ez),
                hx: unpack(&plane.hx),
                hy: unpack(&plane.hy),
            },
        );
    }
    let da = solver.dx * solver.dx;
    for b in boxes {
        let nl = b.wavelengths.len();
        let power: Vec<f64> = (0..nl)
            .map(|l| b.faces.iter().map(|f| face_power(f, l, nl, da)).sum())
            .collect();
        records
            .fluxes
            .insert(b.name.clone(), FluxRecord { wavelengths_nm: b.wavelengths.clone(), power });
    }
    Ok(records)
}
