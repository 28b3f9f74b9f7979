//! Plane-strain linear elasticity on quadrilateral meshes with the
//! stress-hybrid virtual element method, plus B-bar and classical VEM
//! baselines, benchmark problems, and error norms.
//!
//! Voigt conventions: strains carry engineering shear `(e_xx, e_yy, g_xy)`
//! with `g_xy = 2 e_xy`; stresses carry `(s_xx, s_yy, t_xy)`. Node `i` owns
//! global dofs `2i` and `2i + 1`.

// Guards like `!(x > 0.0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod benchmarks;
pub mod error;
pub mod geometry;
pub mod material;
pub mod output;
pub mod projection;
pub mod quadrature;
pub mod stresshybrid;
pub mod variants;

pub use assembly::{GlobalSystem, Method, Solution};
pub use error::{Error, Result};
pub use geometry::{BoundaryEdge, ElementGeometry, QuadMesh};
pub use material::{hydrostatic, make_material, PlaneStrainMaterial};
pub use stresshybrid::StressMode;

pub type Vec2 = nalgebra::Vector2<f64>;
