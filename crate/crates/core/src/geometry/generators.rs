//! Structured and derived quadrilateral mesh families.
//!
//! Base grids are built by [`grid_mesh`] from an `(i, j) -> point` map; the
//! derived families (perturbed, nonconvex split, degenerate split) take any
//! valid mesh and return a new validated mesh.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::element::{check_quad, ElementGeometry};
use super::mesh::{BoundaryEdge, QuadMesh};
use crate::error::{Error, Result};
use crate::Vec2;

/// Side of a structured `(i, j)` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSide {
    /// `j = 0`
    South,
    /// `i = nx`
    East,
    /// `j = ny`
    North,
    /// `i = 0`
    West,
}

/// Build an `nx x ny` structured mesh. Node `(i, j)` has index
/// `j * (nx + 1) + i`. `tag(side, k)` names the boundary edge of cell `k`
/// along `side`. `point` must be orientation preserving.
pub fn grid_mesh(
    nx: usize,
    ny: usize,
    point: impl Fn(usize, usize) -> Vec2,
    tag: impl Fn(GridSide, usize) -> String,
) -> Result<QuadMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least one cell per direction, got {nx} x {ny}"
        )));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push(point(i, j));
        }
    }
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elements.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut bedges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        bedges.push(BoundaryEdge::new(id(i, 0), id(i + 1, 0), tag(GridSide::South, i)));
    }
    for j in 0..ny {
        bedges.push(BoundaryEdge::new(id(nx, j), id(nx, j + 1), tag(GridSide::East, j)));
    }
    for i in (0..nx).rev() {
        bedges.push(BoundaryEdge::new(id(i + 1, ny), id(i, ny), tag(GridSide::North, i)));
    }
    for j in (0..ny).rev() {
        bedges.push(BoundaryEdge::new(id(0, j + 1), id(0, j), tag(GridSide::West, j)));
    }
    QuadMesh::new(nodes, elements, bedges)
}

fn compass_tag(side: GridSide) -> String {
    match side {
        GridSide::South => "bottom",
        GridSide::East => "right",
        GridSide::North => "top",
        GridSide::West => "left",
    }
    .to_string()
}

/// `nx x ny` axis-aligned rectangles on `[0, width] x [0, height]`, tagged
/// `left`, `right`, `top`, `bottom`.
pub fn gen_structured_rect(nx: usize, ny: usize, width: f64, height: f64) -> Result<QuadMesh> {
    let dx = width / nx.max(1) as f64;
    let dy = height / ny.max(1) as f64;
    grid_mesh(
        nx,
        ny,
        |i, j| {
            let x = if i == nx { width } else { i as f64 * dx };
            let y = if j == ny { height } else { j as f64 * dy };
            Vec2::new(x, y)
        },
        |side, _| compass_tag(side),
    )
}

/// Default tilt used by [`gen_trapezoidal`].
pub fn default_trapezoid_offset(n: usize, height: f64) -> f64 {
    height / (4.0 * n as f64)
}

/// `m x n` alternating trapezoids on `[0, length] x [0, height]` with the
/// default tilt `height / (4n)`.
pub fn gen_trapezoidal(m: usize, n: usize, length: f64, height: f64) -> Result<QuadMesh> {
    gen_trapezoidal_with_offset(m, n, length, height, default_trapezoid_offset(n, height))
}

/// Interior column nodes are shifted horizontally by `±offset`, the sign
/// alternating with both column and row, so every interior vertical edge is
/// tilted and neighbouring elements form alternating trapezoids. The outer
/// rectangle is unchanged; `offset = 0` gives [`gen_structured_rect`].
pub fn gen_trapezoidal_with_offset(
    m: usize,
    n: usize,
    length: f64,
    height: f64,
    offset: f64,
) -> Result<QuadMesh> {
    let dx = length / m.max(1) as f64;
    let dy = height / n.max(1) as f64;
    grid_mesh(
        m,
        n,
        |i, j| {
            let y = if j == n { height } else { j as f64 * dy };
            if i == 0 || i == m {
                return Vec2::new(if i == m { length } else { 0.0 }, y);
            }
            let col = if i % 2 == 1 { -1.0 } else { 1.0 };
            let row = if j % 2 == 0 { 1.0 } else { -1.0 };
            Vec2::new(i as f64 * dx + col * row * offset, y)
        },
        |side, _| compass_tag(side),
    )
}

/// Move interior nodes by a uniform random vector in a disk of radius
/// `magnitude * (shortest incident edge)`. Boundary nodes stay fixed. Each
/// node is resampled up to 100 times until all incident elements are valid.
pub fn gen_perturbed(mesh: &QuadMesh, magnitude: f64, seed: u64) -> Result<QuadMesh> {
    if !(0.0..0.5).contains(&magnitude) {
        return Err(Error::InvalidArgument(format!(
            "perturbation magnitude {magnitude} outside [0, 0.5)"
        )));
    }
    const TRIES: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boundary = mesh.boundary_nodes();
    let incident = mesh.node_elements();
    let elements = mesh.elements();
    let mut nodes = mesh.nodes().to_vec();

    for node in 0..nodes.len() {
        if boundary.contains(&node) || incident[node].is_empty() {
            continue;
        }
        let mut lmin = f64::INFINITY;
        for &e in &incident[node] {
            let conn = elements[e];
            let k = conn.iter().position(|&i| i == node).unwrap();
            for nb in [conn[(k + 1) % 4], conn[(k + 3) % 4]] {
                lmin = lmin.min((nodes[nb] - nodes[node]).norm());
            }
        }
        let radius = magnitude * lmin;
        let origin = nodes[node];
        let mut placed = false;
        for _ in 0..TRIES {
            let r = radius * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            nodes[node] = origin + Vec2::new(r * phi.cos(), r * phi.sin());
            let ok = incident[node]
                .iter()
                .all(|&e| check_quad(&elements[e].map(|i| nodes[i])).is_ok());
            if ok {
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::PerturbationFailed { node, tries: TRIES });
        }
    }
    QuadMesh::new(nodes, elements.to_vec(), mesh.boundary_edges().to_vec())
}

/// Split every element `(v0, v1, v2, v3)` along the diagonal `v0-v2` through
/// a break point pulled from the diagonal midpoint toward `v1` by
/// `notch * h_E`. The child `(v0, v1, v2, b)` is nonconvex with its single
/// reflex vertex at `b`; the child `(v0, b, v2, v3)` is convex.
pub fn gen_nonconvex_split(base: &QuadMesh, notch: f64) -> Result<QuadMesh> {
    if !(notch > 0.0 && notch < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "notch {notch} outside (0, 0.5)"
        )));
    }
    let mut nodes = base.nodes().to_vec();
    let mut elements = Vec::with_capacity(2 * base.n_elements());
    for (e, conn) in base.elements().iter().enumerate() {
        let g = base.element_geometry(e)?;
        let [v0, v1, v2, _] = g.vertices;
        let mid = 0.5 * (v0 + v2);
        let dir = v1 - mid;
        let b = mid + notch * g.diameter * dir / dir.norm();
        let bi = nodes.len();
        nodes.push(b);
        let a = [conn[0], conn[1], conn[2], bi];
        let c = [conn[0], bi, conn[2], conn[3]];
        for child in [a, c] {
            check_quad(&child.map(|i| nodes[i])).map_err(|err| err.at_element(elements.len()))?;
            elements.push(child);
        }
    }
    QuadMesh::new(nodes, elements, base.boundary_edges().to_vec())
}

/// Split every element into four quadrilaterals through the midpoints of its
/// edges and an interior point `c = m01 + collapse * (m23 - m01)`, where
/// `m01` and `m23` are the midpoints of edges v0–v1 and v2–v3. The two
/// children touching edge v0–v1 get a short edge of length
/// `collapse * |m23 - m01|`; `collapse = 0.5` puts `c` at the center.
pub fn gen_degenerate_split(base: &QuadMesh, collapse: f64) -> Result<QuadMesh> {
    if !(collapse > 0.0 && collapse < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "collapse {collapse} outside (0, 1)"
        )));
    }
    let mut nodes = base.nodes().to_vec();
    let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |a: usize, b: usize, nodes: &mut Vec<Vec2>| -> usize {
        let key = if a < b { (a, b) } else { (b, a) };
        *mids.entry(key).or_insert_with(|| {
            nodes.push(0.5 * (nodes[a] + nodes[b]));
            nodes.len() - 1
        })
    };
    let mut elements = Vec::with_capacity(4 * base.n_elements());
    for conn in base.elements() {
        let [a, b, c, d] = *conn;
        let m01 = midpoint(a, b, &mut nodes);
        let m12 = midpoint(b, c, &mut nodes);
        let m23 = midpoint(c, d, &mut nodes);
        let m30 = midpoint(d, a, &mut nodes);
        let center = nodes[m01] + collapse * (nodes[m23] - nodes[m01]);
        let ci = nodes.len();
        nodes.push(center);
        let children = [
            [a, m01, ci, m30],
            [m01, b, m12, ci],
            [ci, m12, c, m23],
            [m30, ci, m23, d],
        ];
        for child in children {
            check_quad(&child.map(|i| nodes[i])).map_err(|err| err.at_element(elements.len()))?;
            elements.push(child);
        }
    }
    let mut bedges = Vec::with_capacity(2 * base.boundary_edges().len());
    for be in base.boundary_edges() {
        let key = if be.a < be.b { (be.a, be.b) } else { (be.b, be.a) };
        let m = mids[&key];
        bedges.push(BoundaryEdge::new(be.a, m, be.tag.clone()));
        bedges.push(BoundaryEdge::new(m, be.b, be.tag.clone()));
    }
    QuadMesh::new(nodes, elements, bedges)
}

/// Polar grid of the quarter annulus `a <= r <= b`, `0 <= phi <= pi/2` with
/// `nr` radial and `nt` angular cells. Tags: `inner`, `outer`, `bottom`
/// (y = 0), `left` (x = 0).
pub fn gen_quarter_annulus(a: f64, b: f64, nr: usize, nt: usize) -> Result<QuadMesh> {
    if !(a > 0.0 && b > a) {
        return Err(Error::InvalidArgument(format!(
            "annulus radii must satisfy 0 < a < b, got a={a}, b={b}"
        )));
    }
    grid_mesh(
        nr,
        nt,
        |i, j| {
            let r = if i == nr { b } else { a + (b - a) * i as f64 / nr as f64 };
            let phi = FRAC_PI_2 * j as f64 / nt as f64;
            if j == nt {
                Vec2::new(0.0, r)
            } else {
                Vec2::new(r * phi.cos(), r * phi.sin())
            }
        },
        |side, _| {
            match side {
                GridSide::South => "bottom",
                GridSide::East => "outer",
                GridSide::North => "left",
                GridSide::West => "inner",
            }
            .to_string()
        },
    )
}

/// Quarter of a square plate `[0, l]^2` with a circular hole of radius `a` at
/// the origin. Level 0 has 16 radial by 16 angular cells (256 elements); each
/// level doubles both counts. Tags: `hole`, `right` (x = l), `top` (y = l),
/// `bottom` (y = 0), `left` (x = 0).
pub fn gen_plate_with_hole(a: f64, l: f64, levels: usize) -> Result<QuadMesh> {
    if !(a > 0.0 && l > a) {
        return Err(Error::InvalidArgument(format!(
            "plate needs 0 < a < L, got a={a}, L={l}"
        )));
    }
    let nr = 16 << levels;
    let half = 8 << levels;
    let nt = 2 * half;
    grid_mesh(
        nr,
        nt,
        |i, j| {
            let phi = FRAC_PI_2 * j as f64 / nt as f64;
            let inner = if j == nt {
                Vec2::new(0.0, a)
            } else {
                Vec2::new(a * phi.cos(), a * phi.sin())
            };
            let outer = if j == half {
                Vec2::new(l, l)
            } else if j < half {
                Vec2::new(l, l * phi.tan())
            } else if j == nt {
                Vec2::new(0.0, l)
            } else {
                Vec2::new(l * (FRAC_PI_2 - phi).tan(), l)
            };
            if i == nr {
                outer
            } else if i == 0 {
                inner
            } else {
                inner + (outer - inner) * (i as f64 / nr as f64)
            }
        },
        |side, k| {
            match side {
                GridSide::South => "bottom",
                GridSide::East if k < half => "right",
                GridSide::East => "top",
                GridSide::North => "left",
                GridSide::West => "hole",
            }
            .to_string()
        },
    )
}

/// Corner vertices of Cook's membrane.
pub const COOK_CORNERS: [(f64, f64); 4] = [(0.0, 0.0), (48.0, 44.0), (48.0, 60.0), (0.0, 44.0)];

/// Bilinear `nx x ny` mesh of Cook's tapered membrane. Tags: `left`
/// (clamped), `right` (loaded), `top`, `bottom`.
pub fn gen_cook(nx: usize, ny: usize) -> Result<QuadMesh> {
    let c = COOK_CORNERS.map(|(x, y)| Vec2::new(x, y));
    grid_mesh(
        nx,
        ny,
        |i, j| {
            let s = i as f64 / nx as f64;
            let t = j as f64 / ny as f64;
            match (i == 0 || i == nx, j == 0 || j == ny) {
                (true, true) => c[match (i == 0, j == 0) {
                    (true, true) => 0,
                    (false, true) => 1,
                    (false, false) => 2,
                    (true, false) => 3,
                }],
                _ => {
                    (1.0 - s) * (1.0 - t) * c[0]
                        + s * (1.0 - t) * c[1]
                        + s * t * c[2]
                        + (1.0 - s) * t * c[3]
                }
            }
        },
        |side, _| compass_tag(side),
    )
}

/// Quadrilateral `(0,0), (1,0), (g1, g2), (0,1)` used by the vertex sweep.
pub fn sweep_vertex_quad(g1: f64, g2: f64) -> Result<ElementGeometry> {
    ElementGeometry::new([
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(g1, g2),
        Vec2::new(0.0, 1.0),
    ])
}

/// Quadrilateral `(0,0), (cos g1, -sin g1), (1,1), (-sin g2, cos g2)` used by
/// the angle sweep.
pub fn sweep_angle_quad(g1: f64, g2: f64) -> Result<ElementGeometry> {
    ElementGeometry::new([
        Vec2::new(0.0, 0.0),
        Vec2::new(g1.cos(), -g1.sin()),
        Vec2::new(1.0, 1.0),
        Vec2::new(-g2.sin(), g2.cos()),
    ])
}

/// Angle range of the angle sweep.
pub const ANGLE_SWEEP_RANGE: (f64, f64) = (-FRAC_PI_4, FRAC_PI_2);
