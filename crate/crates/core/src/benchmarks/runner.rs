//! Solving a benchmark on one mesh and over a refinement ladder.

use nalgebra::Vector3;

use crate::assembly::{assemble, compute_kernels, condition_number_of, ElementKernel, GlobalSystem, Method, Solution};
use crate::error::{Error, Result};
use crate::geometry::QuadMesh;
use crate::Vec2;

use super::cases::{BenchmarkCase, BoundaryCondition, Components, MeshFamily};
use super::norms::{element_hydrostatic, error_norms, ErrorNorms};
use super::rates::{fit_rate, RateFit};

/// Outward unit normal of a boundary edge `a -> b` (domain on the left).
fn outward_normal(a: Vec2, b: Vec2) -> Vec2 {
    let t = b - a;
    Vec2::new(t.y, -t.x) / t.norm()
}

/// Load and constrain `sys` according to the case's boundary conditions.
pub fn apply_boundary_conditions(case: &BenchmarkCase, mesh: &QuadMesh, sys: &mut GlobalSystem) -> Result<()> {
    if let Some(b) = &case.body_force {
        sys.add_body_force(mesh, |x| b(x))?;
    }
    for bc in &case.bcs {
        match bc {
            BoundaryCondition::Dirichlet {
                tag,
                components,
                value,
                filter,
            } => {
                let nodes: Vec<usize> = mesh
                    .nodes_with_tag(tag)
                    .into_iter()
                    .filter(|&n| filter.as_ref().is_none_or(|f| f(mesh.nodes()[n])))
                    .collect();
                if nodes.is_empty() {
                    return Err(Error::InvalidMesh(format!(
                        "no nodes for Dirichlet condition on boundary tag {tag:?}"
                    )));
                }
                let comps: &[usize] = match components {
                    Components::X => &[0],
                    Components::Y => &[1],
                    Components::Both => &[0, 1],
                };
                for &c in comps {
                    sys.constrain_nodes(mesh, &nodes, c, |x| value(x)[c]);
                }
            }
            BoundaryCondition::Traction { tag, t } => sys.add_traction(mesh, tag, |x| t(x)),
            BoundaryCondition::Pressure { tag, p } => {
                for be in mesh.edges_with_tag(tag) {
                    let (a, b) = (mesh.nodes()[be.a], mesh.nodes()[be.b]);
                    let t = -*p * outward_normal(a, b);
                    let fe = crate::assembly::traction_vector(a, b, |_| t);
                    sys.f[2 * be.a] += fe[0];
                    sys.f[2 * be.a + 1] += fe[1];
                    sys.f[2 * be.b] += fe[2];
                    sys.f[2 * be.b + 1] += fe[3];
                }
            }
        }
    }
    Ok(())
}

/// Vertical displacement at `x`: interpolated along the boundary edge
/// through `x` when there is one, otherwise taken at the nearest node.
pub fn sample_vertical(mesh: &QuadMesh, sol: &Solution, x: Vec2) -> f64 {
    let scale = mesh.max_diameter();
    for be in mesh.boundary_edges() {
        let (a, b) = (mesh.nodes()[be.a], mesh.nodes()[be.b]);
        let t = b - a;
        let s = (x - a).dot(&t) / t.norm_squared();
        if (0.0..=1.0).contains(&s) && (a + s * t - x).norm() <= 1e-9 * scale {
            return (1.0 - s) * sol.node(be.a).y + s * sol.node(be.b).y;
        }
    }
    sol.node(mesh.nearest_node(x)).y
}

/// Everything produced by one solve.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub case: &'static str,
    pub method: Method,
    pub mesh_label: String,
    pub h: f64,
    pub n_elements: usize,
    pub ndof: usize,
    pub errors: ErrorNorms,
    pub cond: Option<f64>,
    pub tip: Option<f64>,
    pub tip_reference: Option<f64>,
    pub solution: Solution,
    /// Sum of all applied nodal loads per component.
    pub applied_load: Vec2,
    /// Element mean of the discrete hydrostatic stress.
    pub element_hydrostatic: Vec<f64>,
    /// Projected strain per element.
    pub element_strain: Vec<Vector3<f64>>,
}

impl RunResult {
    pub fn element_trace(&self) -> Vec<f64> {
        self.element_strain.iter().map(|e| e[0] + e[1]).collect()
    }
}

pub fn solve_case(
    case: &BenchmarkCase,
    mesh: &QuadMesh,
    method: Method,
    mesh_label: &str,
    with_condition: bool,
) -> Result<RunResult> {
    let kernels: Vec<ElementKernel> = compute_kernels(mesh, &case.material, method)?;
    let ks: Vec<_> = kernels.iter().map(|k| k.k).collect();
    let mut sys = assemble(mesh, &ks)?;
    apply_boundary_conditions(case, mesh, &mut sys)?;
    let solution = sys.solve()?;
    let cond = if with_condition {
        Some(condition_number_of(&sys.reduce()?)?)
    } else {
        None
    };
    let errors = error_norms(case, mesh, &kernels, &solution)?;
    let mut applied_load = Vec2::zeros();
    for (i, f) in sys.f.iter().enumerate() {
        applied_load[i % 2] += f;
    }
    let mut element_hydro = Vec::with_capacity(mesh.n_elements());
    let mut element_strain = Vec::with_capacity(mesh.n_elements());
    for (conn, ker) in mesh.elements().iter().zip(&kernels) {
        element_hydro.push(element_hydrostatic(case, ker, &solution, conn)?);
        element_strain.push(ker.projection.projected_strain(&solution.element_dofs(conn)));
    }
    let (tip, tip_reference) = match case.tip {
        Some((x, r)) => (Some(sample_vertical(mesh, &solution, x)), r),
        None => (None, None),
    };
    Ok(RunResult {
        case: case.name(),
        method,
        mesh_label: mesh_label.to_string(),
        h: mesh.max_diameter(),
        n_elements: mesh.n_elements(),
        ndof: mesh.n_dofs(),
        errors,
        cond,
        tip,
        tip_reference,
        solution,
        applied_load,
        element_hydrostatic: element_hydro,
        element_strain,
    })
}

/// Base sizes `n, 2n, 4n, ...`.
pub fn ladder_sizes(base: usize, rungs: usize) -> Vec<usize> {
    (0..rungs).map(|k| base << k).collect()
}

#[derive(Debug, Clone, Default)]
pub struct Rates {
    pub l2: Option<RateFit>,
    pub energy: Option<RateFit>,
    pub hydrostatic: Option<RateFit>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub runs: Vec<RunResult>,
    pub rates: Rates,
}

/// Rates over the finest rungs; absent when fewer than three rungs or a
/// norm is unavailable.
pub fn fit_rates(runs: &[RunResult]) -> Rates {
    let h: Vec<f64> = runs.iter().map(|r| r.h).collect();
    let fit = |f: fn(&ErrorNorms) -> Option<f64>| -> Option<RateFit> {
        let e: Option<Vec<f64>> = runs.iter().map(|r| f(&r.errors)).collect();
        fit_rate(&h, &e?).ok()
    };
    Rates {
        l2: fit(|e| e.l2),
        energy: fit(|e| e.energy),
        hydrostatic: fit(|e| e.hydrostatic),
    }
}

/// Solve the case on each rung of a ladder.
pub fn run_convergence(
    case: &BenchmarkCase,
    family: &MeshFamily,
    method: Method,
    sizes: &[usize],
    with_condition: bool,
) -> Result<ConvergenceReport> {
    let mut runs = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mesh = case.mesh(family, n)?;
        runs.push(solve_case(case, &mesh, method, &family.label(), with_condition)?);
    }
    let rates = fit_rates(&runs);
    Ok(ConvergenceReport { runs, rates })
}
