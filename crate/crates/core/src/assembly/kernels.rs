use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ElementGeometry, QuadMesh};
use crate::material::PlaneStrainMaterial;
use crate::projection::{build_energy_projection, EnergyProjection, Mat8, Vec8};
use crate::stresshybrid::{
    build_sh_kernel, recover_stress, ShElementKernel, StressBasis, StressMode,
};
use crate::variants::{build_bbar_kernel, build_classic_kernel};
use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Stress-hybrid VEM with the rotated five-term basis.
    ShVem,
    Bbar,
    Classic,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::ShVem, Method::Bbar, Method::Classic];

    pub fn name(self) -> &'static str {
        match self {
            Method::ShVem => "shvem",
            Method::Bbar => "bbar",
            Method::Classic => "classic",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shvem" => Ok(Method::ShVem),
            "bbar" => Ok(Method::Bbar),
            "classic" => Ok(Method::Classic),
            _ => Err(Error::InvalidArgument(format!(
                "unknown method {s:?} (expected shvem, bbar or classic)"
            ))),
        }
    }
}

/// Everything needed to assemble one element and post-process its solution.
#[derive(Debug, Clone)]
pub struct ElementKernel {
    pub geometry: ElementGeometry,
    pub projection: EnergyProjection,
    /// Present for [`Method::ShVem`].
    pub hybrid: Option<(StressBasis, ShElementKernel)>,
    pub k: Mat8,
}

impl ElementKernel {
    pub fn new(geometry: ElementGeometry, mat: &PlaneStrainMaterial, method: Method) -> Result<Self> {
        let projection = build_energy_projection(&geometry, mat)?;
        let (hybrid, k) = match method {
            Method::ShVem => {
                let basis = StressBasis::new(&geometry, StressMode::Rotated5);
                let ker = build_sh_kernel(&geometry, mat, &basis)?;
                let k = ker.k;
                (Some((basis, ker)), k)
            }
            Method::Bbar => (None, build_bbar_kernel(mat, &projection).k),
            Method::Classic => (None, build_classic_kernel(mat, &projection)),
        };
        Ok(Self {
            geometry,
            projection,
            hybrid,
            k,
        })
    }

    /// Discrete stress at `x`: the projected hybrid stress for SH-VEM, the
    /// constitutive stress of the projected strain otherwise.
    pub fn stress(&self, mat: &PlaneStrainMaterial, d: &Vec8, x: Vec2) -> Vector3<f64> {
        match &self.hybrid {
            Some((basis, ker)) => recover_stress(ker, basis, d, x),
            None => mat.c * self.projection.projected_strain(d),
        }
    }

    /// Projected displacement `Pi u_h` at `x`.
    pub fn projected_displacement(&self, d: &Vec8, x: Vec2) -> Vec2 {
        self.projection.basis.eval(x) * (self.projection.pi_star * d)
    }
}

/// Element kernels for every element, computed in parallel. Errors carry
/// the index of the failing element.
pub fn compute_kernels(
    mesh: &QuadMesh,
    mat: &PlaneStrainMaterial,
    method: Method,
) -> Result<Vec<ElementKernel>> {
    (0..mesh.n_elements())
        .into_par_iter()
        .map(|e| {
            let g = mesh.element_geometry(e)?;
            ElementKernel::new(g, mat, method).map_err(|err| err.at_element(e))
        })
        .collect()
}
