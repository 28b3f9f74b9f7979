//! Quadrilateral meshes, per-element geometry, and mesh generators.

mod element;
mod generators;
mod io;
mod mesh;

pub use element::{
    check_quad, diameter, fold_half_turn, rotate, segments_intersect,
    signed_area, ElementGeometry, AREA_GUARD,
};
pub use generators::*;
pub use io::{parse_mesh, read_mesh, write_mesh, write_mesh_to};
pub use mesh::{BoundaryEdge, QuadMesh};
