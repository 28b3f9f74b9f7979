//! Fourth-eigenvalue studies of single SH-VEM element stiffnesses.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

use nalgebra::SymmetricEigen;
use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{rotate, sweep_angle_quad, sweep_vertex_quad, ElementGeometry, ANGLE_SWEEP_RANGE};
use crate::material::PlaneStrainMaterial;
use crate::projection::Mat8;
use crate::stresshybrid::{build_sh_kernel, StressBasis, StressMode};
use crate::Vec2;

pub const EIGEN_NU: f64 = 0.4999999;
pub const TABLE_ANGLES: [f64; 4] = [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3];
pub const TABLE_MODES: [StressMode; 3] =
    [StressMode::Rotated5, StressMode::Unrotated5, StressMode::Unrotated7];
pub const SWEEP_POINTS: usize = 20;
pub const VERTEX_SWEEP_RANGE: (f64, f64) = (0.05, 10.0);

fn eigen_material() -> PlaneStrainMaterial {
    PlaneStrainMaterial::new(1.0, EIGEN_NU).expect("valid material")
}

/// Ascending eigenvalues of an element stiffness.
pub fn sorted_eigenvalues(k: &Mat8) -> [f64; 8] {
    let mut ev: [f64; 8] = SymmetricEigen::new(*k).eigenvalues.into();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn fourth_eigenvalue(e: &ElementGeometry, mat: &PlaneStrainMaterial, mode: StressMode) -> Result<f64> {
    let k = build_sh_kernel(e, mat, &StressBasis::new(e, mode))?.k;
    Ok(sorted_eigenvalues(&k)[3])
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenTableRow {
    pub mode: StressMode,
    pub angle: f64,
    pub fourth: f64,
    pub largest: f64,
}

/// Fourth eigenvalue on the unit square rotated by each angle.
pub fn eigen_table(modes: &[StressMode], angles: &[f64]) -> Result<Vec<EigenTableRow>> {
    let mat = eigen_material();
    let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].map(|(x, y)| Vec2::new(x, y));
    let mut rows = Vec::new();
    for &mode in modes {
        for &angle in angles {
            let e = ElementGeometry::new(square.map(|v| rotate(v, angle)))?;
            let k = build_sh_kernel(&e, &mat, &StressBasis::new(&e, mode))?.k;
            let ev = sorted_eigenvalues(&k);
            rows.push(EigenTableRow {
                mode,
                angle,
                fourth: ev[3],
                largest: ev[7],
            });
        }
    }
    Ok(rows)
}

pub fn default_eigen_table() -> Result<Vec<EigenTableRow>> {
    eigen_table(&TABLE_MODES, &TABLE_ANGLES)
}

/// Cell-centred samples of `[a, b]`.
pub fn sweep_grid(range: (f64, f64), n: usize) -> Vec<f64> {
    let (a, b) = range;
    (0..n).map(|i| a + (i as f64 + 0.5) * (b - a) / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub g1: f64,
    pub g2: f64,
    pub fourth: f64,
}

fn sweep(
    range: (f64, f64),
    n: usize,
    quad: fn(f64, f64) -> Result<ElementGeometry>,
) -> Result<Vec<SweepPoint>> {
    let mat = eigen_material();
    let grid = sweep_grid(range, n);
    let pairs: Vec<(f64, f64)> = grid
        .iter()
        .flat_map(|&g1| grid.iter().map(move |&g2| (g1, g2)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(g1, g2)| {
            let e = quad(g1, g2)?;
            Ok(SweepPoint {
                g1,
                g2,
                fourth: fourth_eigenvalue(&e, &mat, StressMode::Rotated5)?,
            })
        })
        .collect()
}

/// Sweep of the free vertex `(g1, g2)` of `(0,0), (1,0), (g1,g2), (0,1)`.
pub fn eigen_sweep_vertex(n: usize) -> Result<Vec<SweepPoint>> {
    sweep(VERTEX_SWEEP_RANGE, n, sweep_vertex_quad)
}

/// Sweep of the two edge angles of the angle-sweep quad.
pub fn eigen_sweep_angle(n: usize) -> Result<Vec<SweepPoint>> {
    sweep(ANGLE_SWEEP_RANGE, n, sweep_angle_quad)
}

pub fn sweep_minimum(points: &[SweepPoint]) -> Option<&SweepPoint> {
    points.iter().min_by(|a, b| a.fourth.total_cmp(&b.fourth))
}
