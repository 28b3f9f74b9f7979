//! The benchmark problems: geometry, material, boundary conditions, and
//! analytic fields.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{
    gen_cook, gen_degenerate_split, gen_nonconvex_split, gen_perturbed, gen_plate_with_hole,
    gen_quarter_annulus, gen_structured_rect, gen_trapezoidal, read_mesh, QuadMesh,
};
use crate::material::PlaneStrainMaterial;
use crate::Vec2;

pub type VectorField = Arc<dyn Fn(Vec2) -> Vec2 + Send + Sync>;
pub type StressField = Arc<dyn Fn(Vec2) -> Vector3<f64> + Send + Sync>;
pub type Predicate = Arc<dyn Fn(Vec2) -> bool + Send + Sync>;

/// Which displacement components a Dirichlet condition prescribes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Components {
    X,
    Y,
    Both,
}

#[derive(Clone)]
pub enum BoundaryCondition {
    /// Prescribe components on every node of the tagged edges whose
    /// position satisfies `filter` (all nodes when `None`).
    Dirichlet {
        tag: &'static str,
        components: Components,
        value: VectorField,
        filter: Option<Predicate>,
    },
    /// Traction from a field evaluated on the edge.
    Traction { tag: &'static str, t: VectorField },
    /// Uniform pressure against the edge normal.
    Pressure { tag: &'static str, p: f64 },
}

/// Mesh family applied to a case's base grid.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshFamily {
    Structured,
    Perturbed { magnitude: f64, seed: u64 },
    Nonconvex { notch: f64 },
    Trapezoidal,
    Degenerate { collapse: f64 },
    /// Perturbed grid sized to roughly the requested element count.
    Unstructured { elements: usize, seed: u64 },
    File(std::path::PathBuf),
}

pub const DEFAULT_PERTURBATION: f64 = 0.3;
pub const DEFAULT_NOTCH: f64 = 0.25;
pub const DEFAULT_COLLAPSE: f64 = 0.05;

impl MeshFamily {
    pub fn label(&self) -> String {
        match self {
            MeshFamily::Structured => "structured".into(),
            MeshFamily::Perturbed { .. } => "perturbed".into(),
            MeshFamily::Nonconvex { .. } => "nonconvex".into(),
            MeshFamily::Trapezoidal => "trapezoidal".into(),
            MeshFamily::Degenerate { .. } => "degenerate".into(),
            MeshFamily::Unstructured { .. } => "unstructured".into(),
            MeshFamily::File(p) => format!("file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Manufactured,
    Beam,
    Cook,
    PlateHole,
    Cylinder,
    Punch,
}

impl CaseKind {
    pub const ALL: [CaseKind; 6] = [
        CaseKind::Manufactured,
        CaseKind::Beam,
        CaseKind::Cook,
        CaseKind::PlateHole,
        CaseKind::Cylinder,
        CaseKind::Punch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Manufactured => "manufactured",
            CaseKind::Beam => "beam",
            CaseKind::Cook => "cook",
            CaseKind::PlateHole => "plate",
            CaseKind::Cylinder => "cylinder",
            CaseKind::Punch => "punch",
        }
    }
}

impl std::str::FromStr for CaseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CaseKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown case {s:?}")))
    }
}

/// A benchmark problem. `base_size` and `refine` describe its default
/// ladder of base-grid sizes.
#[derive(Clone)]
pub struct BenchmarkCase {
    pub kind: CaseKind,
    pub material: PlaneStrainMaterial,
    pub body_force: Option<VectorField>,
    pub exact_u: Option<VectorField>,
    pub exact_sigma: Option<StressField>,
    pub bcs: Vec<BoundaryCondition>,
    /// Point whose vertical displacement is reported, with its reference
    /// value when one is known.
    pub tip: Option<(Vec2, Option<f64>)>,
    /// Use the element average of the discrete hydrostatic stress.
    pub element_averaged_hydrostatic: bool,
    pub default_size: usize,
}

impl BenchmarkCase {
    pub fn new(kind: CaseKind, nu: Option<f64>) -> Result<Self> {
        match kind {
            CaseKind::Manufactured => case_manufactured(nu.unwrap_or(0.4999999)),
            CaseKind::Beam => case_beam_with(nu.unwrap_or(BEAM_NU)),
            CaseKind::Cook => case_cook_with(nu.unwrap_or(0.4999999)),
            CaseKind::PlateHole => case_plate_hole_with(nu.unwrap_or(0.4999999)),
            CaseKind::Cylinder => case_cylinder_with(nu.unwrap_or(0.4999999)),
            CaseKind::Punch => case_punch_with(nu.unwrap_or(0.4999999)),
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Base grid of size `n` (cells per side, or refinement level for the
    /// plate).
    pub fn base_mesh(&self, n: usize) -> Result<QuadMesh> {
        if n == 0 {
            return Err(Error::InvalidArgument("mesh size must be positive".into()));
        }
        match self.kind {
            CaseKind::Manufactured | CaseKind::Punch => gen_structured_rect(n, n, 1.0, 1.0),
            CaseKind::Beam => Ok(gen_structured_rect(10 * n, n, BEAM_L, BEAM_D)?
                .translate(Vec2::new(0.0, -BEAM_D / 2.0))),
            CaseKind::Cook => gen_cook(n, n),
            CaseKind::PlateHole => gen_plate_with_hole(1.0, 5.0, n - 1),
            CaseKind::Cylinder => gen_quarter_annulus(1.0, 5.0, n, n),
        }
    }

    /// Mesh of the given family on base size `n`.
    pub fn mesh(&self, family: &MeshFamily, n: usize) -> Result<QuadMesh> {
        match family {
            MeshFamily::Structured => self.base_mesh(n),
            MeshFamily::Perturbed { magnitude, seed } => {
                gen_perturbed(&self.base_mesh(n)?, *magnitude, *seed)
            }
            MeshFamily::Nonconvex { notch } => gen_nonconvex_split(&self.base_mesh(n)?, *notch),
            MeshFamily::Degenerate { collapse } => {
                gen_degenerate_split(&self.base_mesh(n)?, *collapse)
            }
            MeshFamily::Trapezoidal => match self.kind {
                CaseKind::Beam => Ok(gen_trapezoidal(10 * n, n, BEAM_L, BEAM_D)?
                    .translate(Vec2::new(0.0, -BEAM_D / 2.0))),
                CaseKind::Manufactured | CaseKind::Punch => gen_trapezoidal(n, n, 1.0, 1.0),
                _ => Err(Error::InvalidArgument(format!(
                    "trapezoidal meshes are not defined for case {}",
                    self.name()
                ))),
            },
            MeshFamily::Unstructured { elements, seed } => {
                let per_cell = self.base_mesh(1)?.n_elements() as f64;
                let n = ((*elements as f64 / per_cell).sqrt().round() as usize).max(1);
                gen_perturbed(&self.base_mesh(n)?, DEFAULT_PERTURBATION, *seed)
            }
            MeshFamily::File(path) => read_mesh(path),
        }
    }

    /// Analytic hydrostatic stress, when the stress field is known.
    pub fn exact_hydrostatic(&self, x: Vec2) -> Option<f64> {
        self.exact_sigma
            .as_ref()
            .map(|s| crate::material::hydrostatic(&s(x), self.material.nu))
    }
}

fn dirichlet_all(tag: &'static str, u: VectorField) -> BoundaryCondition {
    BoundaryCondition::Dirichlet {
        tag,
        components: Components::Both,
        value: u,
        filter: None,
    }
}

fn roller(tag: &'static str, components: Components) -> BoundaryCondition {
    BoundaryCondition::Dirichlet {
        tag,
        components,
        value: Arc::new(|_| Vec2::zeros()),
        filter: None,
    }
}

fn traction_from_stress(sigma: StressField, n: Vec2) -> VectorField {
    Arc::new(move |x| {
        let s = sigma(x);
        Vec2::new(s[0] * n.x + s[2] * n.y, s[2] * n.x + s[1] * n.y)
    })
}

/// Unit square, E = 1, with
/// `u = (-cos(pi x) sin(pi y), sin(pi x) cos(pi y))` prescribed on the whole
/// boundary and the body force that balances it.
pub fn case_manufactured(nu: f64) -> Result<BenchmarkCase> {
    let material = PlaneStrainMaterial::new(1.0, nu)?;
    let mu = material.mu;
    let u: VectorField = Arc::new(|x: Vec2| {
        let (sx, cx) = (PI * x.x).sin_cos();
        let (sy, cy) = (PI * x.y).sin_cos();
        Vec2::new(-cx * sy, sx * cy)
    });
    // The field is divergence free, so sigma = 2 mu eps.
    let sigma: StressField = Arc::new(move |x: Vec2| {
        let s = 2.0 * mu * PI * (PI * x.x).sin() * (PI * x.y).sin();
        Vector3::new(s, -s, 0.0)
    });
    let b: VectorField = Arc::new(move |x: Vec2| {
        let (sx, cx) = (PI * x.x).sin_cos();
        let (sy, cy) = (PI * x.y).sin_cos();
        -2.0 * mu * PI * PI * Vec2::new(cx * sy, -sx * cy)
    });
    let bcs = ["bottom", "right", "top", "left"]
        .into_iter()
        .map(|t| dirichlet_all(t, u.clone()))
        .collect();
    Ok(BenchmarkCase {
        kind: CaseKind::Manufactured,
        material,
        body_force: Some(b),
        exact_u: Some(u),
        exact_sigma: Some(sigma),
        bcs,
        tip: None,
        element_averaged_hydrostatic: false,
        default_size: 13,
    })
}

pub const BEAM_L: f64 = 32.0;
pub const BEAM_D: f64 = 1.0;
pub const BEAM_P: f64 = -100.0;
pub const BEAM_E: f64 = 1e5;
pub const BEAM_NU: f64 = 0.49995;

/// Cantilever `[0, 32] x [-0.5, 0.5]` under a parabolic end shear of
/// resultant `P = -100`. Plane-strain form of the classical elasticity
/// solution (E and nu replaced by `E / (1 - nu^2)` and `nu / (1 - nu)`).
pub fn case_beam() -> Result<BenchmarkCase> {
    case_beam_with(BEAM_NU)
}

pub fn beam_fields(nu: f64) -> (VectorField, StressField) {
    let eb = BEAM_E / (1.0 - nu * nu);
    let nb = nu / (1.0 - nu);
    let (l, d, p) = (BEAM_L, BEAM_D, BEAM_P);
    let i = d * d * d / 12.0;
    let u: VectorField = Arc::new(move |x: Vec2| {
        let (x, y) = (x.x, x.y);
        let ux = -p * y / (6.0 * eb * i) * ((6.0 * l - 3.0 * x) * x + (2.0 + nb) * (y * y - d * d / 4.0));
        let uy = p / (6.0 * eb * i)
            * (3.0 * nb * y * y * (l - x) + (4.0 + 5.0 * nb) * d * d * x / 4.0 + (3.0 * l - x) * x * x);
        Vec2::new(ux, uy)
    });
    let sigma: StressField = Arc::new(move |x: Vec2| {
        Vector3::new(
            -p * (l - x.x) * x.y / i,
            0.0,
            p / (2.0 * i) * (d * d / 4.0 - x.y * x.y),
        )
    });
    (u, sigma)
}

fn case_beam_with(nu: f64) -> Result<BenchmarkCase> {
    let material = PlaneStrainMaterial::new(BEAM_E, nu)?;
    let (u, sigma) = beam_fields(nu);
    let tip = u(Vec2::new(BEAM_L, 0.0)).y;
    Ok(BenchmarkCase {
        kind: CaseKind::Beam,
        material,
        body_force: None,
        exact_u: Some(u.clone()),
        exact_sigma: Some(sigma.clone()),
        bcs: vec![
            dirichlet_all("left", u),
            BoundaryCondition::Traction {
                tag: "right",
                t: traction_from_stress(sigma, Vec2::new(1.0, 0.0)),
            },
        ],
        tip: Some((Vec2::new(BEAM_L, 0.0), Some(tip))),
        element_averaged_hydrostatic: false,
        default_size: 1,
    })
}

pub const COOK_REFERENCE_TIP: f64 = 7.769;

/// Cook's tapered membrane: clamped left edge, uniform shear 6.25 per unit
/// length on the right edge.
pub fn case_cook() -> Result<BenchmarkCase> {
    case_cook_with(0.4999999)
}

fn case_cook_with(nu: f64) -> Result<BenchmarkCase> {
    Ok(BenchmarkCase {
        kind: CaseKind::Cook,
        material: PlaneStrainMaterial::new(250.0, nu)?,
        body_force: None,
        exact_u: None,
        exact_sigma: None,
        bcs: vec![
            roller("left", Components::Both),
            BoundaryCondition::Traction {
                tag: "right",
                t: Arc::new(|_| Vec2::new(0.0, 6.25)),
            },
        ],
        tip: Some((Vec2::new(48.0, 60.0), Some(COOK_REFERENCE_TIP))),
        element_averaged_hydrostatic: false,
        default_size: 4,
    })
}

/// Displacement and stress of an infinite plane-strain plate with a
/// traction-free hole of radius `a` under remote tension `s0` along x.
pub fn kirsch_fields(s0: f64, a: f64, material: &PlaneStrainMaterial) -> (VectorField, StressField) {
    let mu = material.mu;
    let kappa = 3.0 - 4.0 * material.nu;
    let u: VectorField = Arc::new(move |x: Vec2| {
        let r = x.norm();
        let t = x.y.atan2(x.x);
        let f = a * s0 / (8.0 * mu);
        let (ra, ar, ar3) = (r / a, a / r, (a / r).powi(3));
        let ux = f * (ra * (kappa + 1.0) * t.cos() + 2.0 * ar * ((1.0 + kappa) * t.cos() + (3.0 * t).cos())
            - 2.0 * ar3 * (3.0 * t).cos());
        let uy = f * (ra * (kappa - 3.0) * t.sin() + 2.0 * ar * ((1.0 - kappa) * t.sin() + (3.0 * t).sin())
            - 2.0 * ar3 * (3.0 * t).sin());
        Vec2::new(ux, uy)
    });
    let sigma: StressField = Arc::new(move |x: Vec2| {
        let r2 = x.norm_squared();
        let t = x.y.atan2(x.x);
        let a2 = a * a / r2;
        let a4 = a2 * a2;
        let (c2, s2) = ((2.0 * t).cos(), (2.0 * t).sin());
        let (c4, s4) = ((4.0 * t).cos(), (4.0 * t).sin());
        Vector3::new(
            s0 * (1.0 - a2 * (1.5 * c2 + c4) + 1.5 * a4 * c4),
            s0 * (-a2 * (0.5 * c2 - c4) - 1.5 * a4 * c4),
            s0 * (-a2 * (0.5 * s2 + s4) + 1.5 * a4 * s4),
        )
    });
    (u, sigma)
}

/// Quarter of a square plate `[0, 5]^2` with a unit hole, loaded by the
/// exact tractions of the infinite-plate solution on its outer edges.
pub fn case_plate_hole() -> Result<BenchmarkCase> {
    case_plate_hole_with(0.4999999)
}

fn case_plate_hole_with(nu: f64) -> Result<BenchmarkCase> {
    let material = PlaneStrainMaterial::new(2e7, nu)?;
    let (u, sigma) = kirsch_fields(1.0, 1.0, &material);
    Ok(BenchmarkCase {
        kind: CaseKind::PlateHole,
        material,
        body_force: None,
        exact_u: Some(u),
        exact_sigma: Some(sigma.clone()),
        bcs: vec![
            roller("left", Components::X),
            roller("bottom", Components::Y),
            BoundaryCondition::Traction {
                tag: "right",
                t: traction_from_stress(sigma.clone(), Vec2::new(1.0, 0.0)),
            },
            BoundaryCondition::Traction {
                tag: "top",
                t: traction_from_stress(sigma, Vec2::new(0.0, 1.0)),
            },
        ],
        tip: None,
        element_averaged_hydrostatic: false,
        default_size: 1,
    })
}

pub const CYL_A: f64 = 1.0;
pub const CYL_B: f64 = 5.0;
pub const CYL_P: f64 = 1e5;

/// Thick cylinder fields under internal pressure (plane strain).
pub fn lame_fields(material: &PlaneStrainMaterial) -> (VectorField, StressField) {
    let (a, b, p) = (CYL_A, CYL_B, CYL_P);
    let big_a = p * a * a / (b * b - a * a);
    let (e, nu) = (material.young, material.nu);
    let u: VectorField = Arc::new(move |x: Vec2| {
        let r = x.norm();
        let ur = (1.0 + nu) * big_a / e * ((1.0 - 2.0 * nu) * r + b * b / r);
        x * (ur / r)
    });
    let sigma: StressField = Arc::new(move |x: Vec2| {
        let r2 = x.norm_squared();
        let srr = big_a * (1.0 - b * b / r2);
        let stt = big_a * (1.0 + b * b / r2);
        let (c2, s2, cs) = (x.x * x.x / r2, x.y * x.y / r2, x.x * x.y / r2);
        Vector3::new(srr * c2 + stt * s2, srr * s2 + stt * c2, (srr - stt) * cs)
    });
    (u, sigma)
}

/// Quarter of a thick cylinder `1 <= r <= 5` under internal pressure 1e5.
pub fn case_cylinder() -> Result<BenchmarkCase> {
    case_cylinder_with(0.4999999)
}

fn case_cylinder_with(nu: f64) -> Result<BenchmarkCase> {
    let material = PlaneStrainMaterial::new(2e5, nu)?;
    let (u, sigma) = lame_fields(&material);
    Ok(BenchmarkCase {
        kind: CaseKind::Cylinder,
        material,
        body_force: None,
        exact_u: Some(u),
        exact_sigma: Some(sigma),
        bcs: vec![
            roller("left", Components::X),
            roller("bottom", Components::Y),
            BoundaryCondition::Pressure {
                tag: "inner",
                p: CYL_P,
            },
        ],
        tip: None,
        element_averaged_hydrostatic: true,
        default_size: 16,
    })
}

pub const PUNCH_DISPLACEMENT: f64 = -0.03;

/// Unit square on rollers with the middle third of the top edge pushed down
/// by 0.03.
pub fn case_punch() -> Result<BenchmarkCase> {
    case_punch_with(0.4999999)
}

fn case_punch_with(nu: f64) -> Result<BenchmarkCase> {
    let tol = 1e-9;
    let middle: Predicate = Arc::new(move |x: Vec2| x.x >= 1.0 / 3.0 - tol && x.x <= 2.0 / 3.0 + tol);
    Ok(BenchmarkCase {
        kind: CaseKind::Punch,
        material: PlaneStrainMaterial::new(250.0, nu)?,
        body_force: None,
        exact_u: None,
        exact_sigma: None,
        bcs: vec![
            roller("left", Components::X),
            roller("right", Components::X),
            roller("bottom", Components::Y),
            BoundaryCondition::Dirichlet {
                tag: "top",
                components: Components::Y,
                value: Arc::new(|_| Vec2::new(0.0, PUNCH_DISPLACEMENT)),
                filter: Some(middle),
            },
        ],
        tip: None,
        element_averaged_hydrostatic: false,
        default_size: 33,
    })
}
