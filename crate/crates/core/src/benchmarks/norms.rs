//! Discrete error measures against analytic fields.

use crate::assembly::{ElementKernel, Solution};
use crate::error::Result;
use crate::geometry::QuadMesh;
use crate::material::hydrostatic;
use crate::quadrature::element_rule;

use super::cases::BenchmarkCase;

pub const NORM_DEGREE: usize = 8;

/// Absolute errors; `None` when the case lacks the needed exact field.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorNorms {
    /// `||u - Pi u_h||_L2`.
    pub l2: Option<f64>,
    /// `(sum_E ∫ (s - s_h)^T C^-1 (s - s_h))^(1/2)`.
    pub energy: Option<f64>,
    /// `||p - p_h||_L2` of the hydrostatic stress.
    pub hydrostatic: Option<f64>,
}

/// Mean discrete hydrostatic stress of one element.
pub fn element_hydrostatic(case: &BenchmarkCase, ker: &ElementKernel, sol: &Solution, conn: &[usize; 4]) -> Result<f64> {
    let d = sol.element_dofs(conn);
    let nu = case.material.nu;
    let rule = element_rule(&ker.geometry, NORM_DEGREE)?;
    let s: f64 = rule
        .iter()
        .map(|&(x, w)| w * hydrostatic(&ker.stress(&case.material, &d, x), nu))
        .sum();
    Ok(s / ker.geometry.area)
}

pub fn error_norms(
    case: &BenchmarkCase,
    mesh: &QuadMesh,
    kernels: &[ElementKernel],
    sol: &Solution,
) -> Result<ErrorNorms> {
    let mat = &case.material;
    let (mut l2, mut en, mut hy) = (0.0, 0.0, 0.0);
    for (conn, ker) in mesh.elements().iter().zip(kernels) {
        let d = sol.element_dofs(conn);
        let rule = element_rule(&ker.geometry, NORM_DEGREE)?;
        let mean_p = if case.element_averaged_hydrostatic {
            Some(element_hydrostatic(case, ker, sol, conn)?)
        } else {
            None
        };
        for &(x, w) in &rule {
            if let Some(u) = &case.exact_u {
                l2 += w * (u(x) - ker.projected_displacement(&d, x)).norm_squared();
            }
            if let Some(s) = &case.exact_sigma {
                let sh = ker.stress(mat, &d, x);
                let ds = s(x) - sh;
                en += w * ds.dot(&(mat.cinv * ds));
                let ph = mean_p.unwrap_or_else(|| hydrostatic(&sh, mat.nu));
                hy += w * (hydrostatic(&s(x), mat.nu) - ph).powi(2);
            }
        }
    }
    Ok(ErrorNorms {
        l2: case.exact_u.as_ref().map(|_| l2.sqrt()),
        energy: case.exact_sigma.as_ref().map(|_| en.sqrt()),
        hydrostatic: case.exact_sigma.as_ref().map(|_| hy.sqrt()),
    })
}
