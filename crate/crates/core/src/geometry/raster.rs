//! Rasterization of cavity layouts into relative-permittivity grids.

use super::{CavityDesign, GeometryError, HoleLayout};
use serde::{Deserialize, Serialize};

/// Default subpixel sampling per axis.
pub const DEFAULT_SUBSAMPLES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimensionality {
    Two,
    Three,
}

/// Cell-centered relative permittivity on a uniform grid.
///
/// Cell `(i, j, k)` is centered at `origin + ((i, j, k) + 0.5) * spacing`;
/// the grid is laid out row-major with `z` fastest (`x` fastest in 2D is
/// `y`). The membrane mid-plane sits at `z = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermittivityGrid {
    pub dims: [usize; 3],
    /// Cell size, nm.
    pub spacing: f64,
    /// Low corner of cell (0, 0, 0), nm.
    pub origin: [f64; 3],
    pub eps: Vec<f64>,
    pub dimensionality: Dimensionality,
}

impl PermittivityGrid {
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.eps[self.index(i, j, k)]
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Uniform grid of the given permittivity (homogeneous medium).
    pub fn homogeneous(dims: [usize; 3], spacing: f64, eps: f64) -> Self {
        let origin = [
            -(dims[0] as f64) * spacing / 2.0,
            -(dims[1] as f64) * spacing / 2.0,
            -(dims[2] as f64) * spacing / 2.0,
        ];
        PermittivityGrid {
            dims,
            spacing,
            origin,
            eps: vec![eps; dims[0] * dims[1] * dims[2]],
            dimensionality: if dims[2] == 1 { Dimensionality::Two } else { Dimensionality::Three },
        }
    }
}

/// Signed coordinate of cell center `i` on an axis of `n` cells centered on 0.
///
/// Written so that cells `i` and `n - 1 - i` land on bit-exact negations of
/// each other.
fn centered_coord(i: usize, n: usize, spacing: f64) -> f64 {
    // 2i + 1 - n is an exactly representable integer; one rounding on multiply.
    ((2 * i as i64 + 1 - n as i64) as f64) * (spacing / 2.0)
}

/// Subsample offsets from a cell center; offsets come in bit-exact +/- pairs.
fn subsample_offsets(s: usize, spacing: f64) -> Vec<f64> {
    (0..s)
        .map(|u| ((2 * u as i64 + 1 - s as i64) as f64) * (spacing / (2.0 * s as f64)))
        .collect()
}

/// Rasterize with the default subpixel sampling (s = 4).
pub fn rasterize(
    design: &CavityDesign,
    layout: &HoleLayout,
    spacing: f64,
    padding: f64,
    dimensionality: Dimensionality,
) -> Result<PermittivityGrid, GeometryError> {
    rasterize_with_subsampling(design, layout, spacing, padding, dimensionality, DEFAULT_SUBSAMPLES)
}

/// Rasterize a layout into a permittivity grid, averaging epsilon over
/// `s` subsamples per axis in every cell.
///
/// The in-plane material map and the vertical membrane-fill fraction
/// factorize, so the volume average over `s^3` points reduces to
/// `f_z * eps_xy + (1 - f_z) * eps_env` without changing the result.
/// In-plane averages are accumulated as integer counts of the two phases,
/// which keeps mirror-symmetric layouts bit-exactly mirror symmetric on the
/// grid.
pub fn rasterize_with_subsampling(
    design: &CavityDesign,
    layout: &HoleLayout,
    spacing: f64,
    padding: f64,
    dimensionality: Dimensionality,
    s: usize,
) -> Result<PermittivityGrid, GeometryError> {
    design.validate()?;
    assert!(spacing > 0.0, "spacing must be positive");
    assert!(s >= 1, "subsample count must be >= 1");
    if spacing > design.hole_radius {
        return Err(GeometryError::ResolutionTooCoarse {
            delta: spacing,
            hole_radius: design.hole_radius,
        });
    }
    let lateral_half = if layout.holes.is_empty() && layout.rings.is_empty() {
        padding.max(spacing)
    } else {
        design.pattern_radius() + padding
    };
    let vertical_half = design.thickness / 2.0 + padding;
    build_grid(design, layout, spacing, lateral_half, vertical_half, dimensionality, s)
}

/// Unpatterned membrane: the comparison baseline. The grid spans `padding`
/// laterally on each side of the origin and `t/2 + padding` vertically.
pub fn pristine_slab(
    thickness: f64,
    n_membrane: f64,
    n_env: f64,
    spacing: f64,
    padding: f64,
) -> Result<PermittivityGrid, GeometryError> {
    assert!(spacing > 0.0, "spacing must be positive");
    if thickness < 0.0 || !(n_membrane >= n_env && n_env >= 1.0) {
        return Err(GeometryError::InvalidDesign(format!(
            "invalid slab: t = {thickness}, n_membrane = {n_membrane}, n_env = {n_env}"
        )));
    }
    let design = CavityDesign {
        disk_radius: 1.0,
        radial_pitch: 2.0 * spacing + 2.0,
        tangential_pitch: 2.0 * spacing + 2.0,
        hole_radius: spacing.max(1.0),
        thickness,
        n_rings: 0,
        n_membrane,
        n_env,
    };
    build_grid(
        &design,
        &HoleLayout::empty(),
        spacing,
        padding.max(spacing),
        thickness / 2.0 + padding,
        Dimensionality::Three,
        DEFAULT_SUBSAMPLES,
    )
}

fn build_grid(
    design: &CavityDesign,
    layout: &HoleLayout,
    spacing: f64,
    lateral_half: f64,
    vertical_half: f64,
    dimensionality: Dimensionality,
    s: usize,
) -> Result<PermittivityGrid, GeometryError> {
    let nx = (2.0 * lateral_half / spacing).ceil() as usize;
    let ny = nx;
    let nz = match dimensionality {
        Dimensionality::Two => 1,
        Dimensionality::Three => ((2.0 * vertical_half / spacing).ceil() as usize).max(1),
    };
    let eps_mem = design.n_membrane * design.n_membrane;
    let eps_env = design.n_env * design.n_env;
    let offsets = subsample_offsets(s, spacing);
    let samples_per_cell = (s * s) as f64;

    // In-plane phase map: fraction of (x, y) subsamples inside membrane
    // material (i.e. not inside any hole), as an integer count.
    let a2 = design.hole_radius * design.hole_radius;
    let mut inplane = vec![0u32; nx * ny];
    for i in 0..nx {
        let xc = centered_coord(i, nx, spacing);
        for j in 0..ny {
            let yc = centered_coord(j, ny, spacing);
            // Cull holes that cannot intersect this cell.
            let reach = design.hole_radius + spacing;
            let mut count = 0u32;
            for &ox in &offsets {
                let x = xc + ox;
                for &oy in &offsets {
                    let y = yc + oy;
                    let mut in_hole = false;
                    for h in &layout.holes {
                        if (h.x - xc).abs() > reach || (h.y - yc).abs() > reach {
                            continue;
                        }
                        let dx = x - h.x;
                        let dy = y - h.y;
                        if dx * dx + dy * dy < a2 {
                            in_hole = true;
                            break;
                        }
                    }
                    if !in_hole {
                        count += 1;
                    }
                }
            }
            inplane[i * ny + j] = count;
        }
    }

    // Vertical membrane fill per z-cell: fraction of z subsamples with
    // |z| <= t/2.
    let half_t = design.thickness / 2.0;
    let z_fill: Vec<f64> = (0..nz)
        .map(|k| {
            if dimensionality == Dimensionality::Two {
                return 1.0;
            }
            let zc = centered_coord(k, nz, spacing);
            let inside = offsets.iter().filter(|&&oz| (zc + oz).abs() <= half_t).count();
            inside as f64 / s as f64
        })
        .collect();

    let mut eps = vec![0.0; nx * ny * nz];
    for i in 0..nx {
        for j in 0..ny {
            let frac_mem = inplane[i * ny + j] as f64 / samples_per_cell;
            let eps_xy = frac_mem * eps_mem + (1.0 - frac_mem) * eps_env;
            for (k, &fz) in z_fill.iter().enumerate() {
                eps[(i * ny + j) * nz + k] = fz * eps_xy + (1.0 - fz) * eps_env;
            }
        }
    }

    let origin = [
        -(nx as f64) * spacing / 2.0,
        -(ny as f64) * spacing / 2.0,
        if nz == 1 { 0.0 } else { -(nz as f64) * spacing / 2.0 },
    ];
    Ok(PermittivityGrid { dims: [nx, ny, nz], spacing, origin, eps, dimensionality })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generate_layout;

    #[test]
    fn slab_membrane_cells_carry_n_squared() {
        let grid = pristine_slab(200.0, 2.1, 1.0, 10.0, 100.0).unwrap();
        let [nx, ny, nz] = grid.dims;
        // Center cell is well inside the membrane.
        let eps = grid.at(nx / 2, ny / 2, nz / 2);
        assert_eq!(eps, 2.1 * 2.1);
        // Top cell is in air.
        assert_eq!(grid.at(nx / 2, ny / 2, nz - 1), 1.0);
    }

    #[test]
    fn zero_thickness_slab_is_uniform_env() {
        let grid = pristine_slab(0.0, 2.1, 1.0, 10.0, 100.0).unwrap();
        assert!(grid.eps.iter().all(|&e| e == 1.0));
    }

    #[test]
    fn halving_spacing_doubles_cell_counts() {
        let coarse = pristine_slab(200.0, 2.1, 1.0, 20.0, 300.0).unwrap();
        let fine = pristine_slab(200.0, 2.1, 1.0, 10.0, 300.0).unwrap();
        for axis in 0..3 {
            let d = (fine.dims[axis] as i64 - 2 * coarse.dims[axis] as i64).abs();
            assert!(d <= 1, "axis {axis}: {} vs {}", fine.dims[axis], coarse.dims[axis]);
        }
    }

    #[test]
    fn cell_inside_hole_is_env_and_inside_membrane_is_full() {
        let design = CavityDesign::hbn_default();
        let layout = generate_layout(&design).unwrap();
        let grid = rasterize(&design, &layout, 25.0, 200.0, Dimensionality::Three).unwrap();
        let [nx, ny, nz] = grid.dims;
        // Center of the disk, mid-membrane: pure membrane.
        assert_eq!(grid.at(nx / 2, ny / 2, nz / 2), 2.1 * 2.1);
        // Center of the first hole on the +x axis (rho_1 = 894, hole a = 75):
        let i = ((894.0 - grid.origin[0]) / grid.spacing) as usize;
        let j = ny / 2;
        let eps_hole = grid.at(i, j, nz / 2);
        assert_eq!(eps_hole, 1.0, "hole center cell should be pure env");
    }

    #[test]
    fn straddling_cell_matches_fine_resampling() {
        // A cell whose center lies on a hole wall sees roughly the mean
        // permittivity; the s = 16 resample is the oracle.
        let design = CavityDesign {
            hole_radius: 75.0,
            ..CavityDesign::hbn_default()
        };
        let layout = generate_layout(&design).unwrap();
        let coarse =
            rasterize_with_subsampling(&design, &layout, 25.0, 200.0, Dimensionality::Three, 4)
                .unwrap();
        let oracle =
            rasterize_with_subsampling(&design, &layout, 25.0, 200.0, Dimensionality::Three, 16)
                .unwrap();
        // Pick the cell nearest the wall of the first +x hole: wall at
        // x = 894 - 75 = 819 nm, y = 0, mid-membrane.
        let [_, ny, nz] = coarse.dims;
        let i = ((819.0 - coarse.origin[0]) / coarse.spacing) as usize;
        let (j, k) = (ny / 2, nz / 2);
        let mid = (2.1f64 * 2.1 + 1.0) / 2.0;
        let got = coarse.at(i, j, k);
        let want = oracle.at(i, j, k);
        assert!((got - want).abs() / want < 0.05, "got {got}, oracle {want}");
        assert!((got - mid).abs() / mid < 0.35, "cell not actually straddling? {got} vs {mid}");
    }

    #[test]
    fn mirror_symmetry_is_bit_exact() {
        let design = CavityDesign { n_rings: 3, ..CavityDesign::hbn_default() };
        let layout = generate_layout(&design).unwrap();
        let grid = rasterize(&design, &layout, 50.0, 150.0, Dimensionality::Three).unwrap();
        let [nx, ny, nz] = grid.dims;
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..nz {
                    let a = grid.at(i, j, k);
                    let b = grid.at(i, ny - 1 - j, k);
                    assert!(a == b, "asymmetry at ({i},{j},{k}): {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn eps_bounds_hold_everywhere() {
        let design = CavityDesign { n_rings: 2, ..CavityDesign::hbn_default() };
        let layout = generate_layout(&design).unwrap();
        let grid = rasterize(&design, &layout, 40.0, 100.0, Dimensionality::Three).unwrap();
        let max = 2.1f64 * 2.1;
        assert!(grid.eps.iter().all(|&e| (1.0..=max).contains(&e)));
    }

    #[test]
    fn resolution_coarser_than_hole_radius_is_rejected() {
        let design = CavityDesign::hbn_default();
        let layout = generate_layout(&design).unwrap();
        let err = rasterize(&design, &layout, 80.0, 100.0, Dimensionality::Three).unwrap_err();
        assert!(matches!(err, GeometryError::ResolutionTooCoarse { .. }));
    }

    #[test]
    fn rasterization_converges_under_refinement() {
        // Probe cells on a fixed physical region: the mean |eps(d) - eps(d/2)|
        // shrinks as the grid is refined.
        let design = CavityDesign { n_rings: 1, ..CavityDesign::hbn_default() };
        let layout = generate_layout(&design).unwrap();
        // Extents chosen so cell boundaries align across refinement levels.
        let diff = |d: f64| {
            let coarse =
                rasterize(&design, &layout, d, 857.0, Dimensionality::Two).unwrap();
            let fine =
                rasterize(&design, &layout, d / 2.0, 857.0, Dimensionality::Two).unwrap();
            let [nx, ny, _] = coarse.dims;
            assert_eq!(fine.dims[0], 2 * nx);
            let mut total = 0.0;
            for i in 0..nx {
                for j in 0..ny {
                    let avg = (fine.at(2 * i, 2 * j, 0)
                        + fine.at(2 * i + 1, 2 * j, 0)
                        + fine.at(2 * i, 2 * j + 1, 0)
                        + fine.at(2 * i + 1, 2 * j + 1, 0))
                        / 4.0;
                    total += (coarse.at(i, j, 0) - avg).abs();
                }
            }
            total / (nx * ny) as f64
        };
        let e40 = diff(40.0);
        let e20 = diff(20.0);
        assert!(e20 < e40, "refinement did not converge: {e40} -> {e20}");
    }
}
