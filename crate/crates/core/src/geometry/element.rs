use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::Vec2;

/// Elements with signed area below `AREA_GUARD * h_E^2` are rejected.
pub const AREA_GUARD: f64 = 1e-12;

/// Per-element geometric data for a counterclockwise quadrilateral.
///
/// Edge midpoints follow the local-frame construction: `p` and `q` sit on the
/// edges v4–v1 and v2–v3 (so `PQ` runs roughly along the local x axis), `r`
/// and `s` on v1–v2 and v3–v4 (`RS` roughly along the local y axis).
#[derive(Debug, Clone, PartialEq)]
pub struct ElementGeometry {
    pub vertices: [Vec2; 4],
    pub centroid: Vec2,
    pub diameter: f64,
    pub area: f64,
    pub p: Vec2,
    pub q: Vec2,
    pub r: Vec2,
    pub s: Vec2,
    /// Local-frame angle in (-pi/2, pi/2].
    pub theta: f64,
}

/// Map an angle onto (-pi/2, pi/2] modulo pi.
pub fn fold_half_turn(mut a: f64) -> f64 {
    a %= PI;
    if a > FRAC_PI_2 {
        a -= PI;
    } else if a <= -FRAC_PI_2 {
        a += PI;
    }
    a
}

/// Shoelace area, evaluated relative to the vertex mean so that small
/// elements far from the origin keep their digits.
pub fn signed_area(v: &[Vec2; 4]) -> f64 {
    let o = vertex_mean(v);
    let mut twice = 0.0;
    for k in 0..4 {
        twice += cross(v[k] - o, v[(k + 1) % 4] - o);
    }
    0.5 * twice
}

fn vertex_mean(v: &[Vec2; 4]) -> Vec2 {
    (v[0] + v[1] + v[2] + v[3]) * 0.25
}

pub fn diameter(v: &[Vec2; 4]) -> f64 {
    let mut h: f64 = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            h = h.max((v[i] - v[j]).norm());
        }
    }
    h
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, collinear overlaps included.
pub fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a, b, c))
        || (d2 == 0.0 && on_segment(a, b, d))
        || (d3 == 0.0 && on_segment(c, d, a))
        || (d4 == 0.0 && on_segment(c, d, b))
}

/// Area-weighted centroid of a simple polygon from the shoelace moments.
fn polygon_centroid(v: &[Vec2; 4], area: f64) -> Vec2 {
    let o = vertex_mean(v);
    let mut c = Vec2::zeros();
    for k in 0..4 {
        let a = v[k] - o;
        let b = v[(k + 1) % 4] - o;
        c += (a + b) * cross(a, b);
    }
    o + c / (6.0 * area)
}

/// Validate a quadrilateral: positive area above the degeneracy guard and no
/// crossing of opposite edges. Errors carry element index 0; callers remap.
pub fn check_quad(v: &[Vec2; 4]) -> Result<()> {
    let area = signed_area(v);
    let h = diameter(v);
    let guard = AREA_GUARD * h * h;
    if !(area > guard) {
        return Err(Error::DegenerateElement {
            element: 0,
            area,
            guard,
        });
    }
    if segments_intersect(v[0], v[1], v[2], v[3]) || segments_intersect(v[1], v[2], v[3], v[0]) {
        return Err(Error::SelfIntersecting { element: 0 });
    }
    Ok(())
}

impl ElementGeometry {
    pub fn new(vertices: [Vec2; 4]) -> Result<Self> {
        check_quad(&vertices)?;
        let area = signed_area(&vertices);
        let diameter = diameter(&vertices);
        let centroid = polygon_centroid(&vertices, area);
        let [v1, v2, v3, v4] = vertices;
        let p = 0.5 * (v4 + v1);
        let q = 0.5 * (v2 + v3);
        let r = 0.5 * (v1 + v2);
        let s = 0.5 * (v3 + v4);
        let theta = local_angle(p, q, r, s);
        Ok(Self {
            vertices,
            centroid,
            diameter,
            area,
            p,
            q,
            r,
            s,
            theta,
        })
    }

    /// Scaled coordinates (xi, eta) of a physical point.
    pub fn scaled(&self, x: Vec2) -> Vec2 {
        (x - self.centroid) / self.diameter
    }

    /// Indices of vertices with an interior angle above pi.
    pub fn reflex_vertices(&self) -> Vec<usize> {
        (0..4)
            .filter(|&k| {
                let prev = self.vertices[(k + 3) % 4];
                let cur = self.vertices[k];
                let next = self.vertices[(k + 1) % 4];
                cross(cur - prev, next - cur) < 0.0
            })
            .collect()
    }

    pub fn is_convex(&self) -> bool {
        self.reflex_vertices().is_empty()
    }

    /// Edge k runs from vertex k to vertex k+1.
    pub fn edge(&self, k: usize) -> (Vec2, Vec2) {
        (self.vertices[k], self.vertices[(k + 1) % 4])
    }

    /// Outward unit normal and length of edge k.
    pub fn edge_normal(&self, k: usize) -> (Vec2, f64) {
        let (a, b) = self.edge(k);
        let t = b - a;
        let len = t.norm();
        (Vec2::new(t.y, -t.x) / len, len)
    }

    /// Rotation `x' = Q x` with `Q = [[c, s], [-s, c]]` built from `theta`.
    pub fn rotation(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        [[c, s], [-s, c]]
    }
}

/// Weighted local-frame angle from the midpoint segments PQ and RS.
///
/// Both segment angles are folded into (-pi/2, pi/2]; the RS angle is then
/// shifted by pi if needed so the two lie on the same branch before averaging.
fn local_angle(p: Vec2, q: Vec2, r: Vec2, s: Vec2) -> f64 {
    let l1 = (q - p).norm();
    let l2 = (s - r).norm();
    let theta1 = fold_half_turn((q.y - p.y).atan2(q.x - p.x));
    let mut theta2 = fold_half_turn((r.x - s.x).atan2(s.y - r.y));
    if theta2 - theta1 > FRAC_PI_2 {
        theta2 -= PI;
    } else if theta1 - theta2 > FRAC_PI_2 {
        theta2 += PI;
    }
    fold_half_turn((l1 * theta1 + l2 * theta2) / (l1 + l2))
}

pub fn rotate(v: Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, SQRT_2};

    fn unit_square() -> [Vec2; 4] {
        [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn unit_square_geometry() {
        let g = ElementGeometry::new(unit_square()).unwrap();
        assert_eq!(g.theta, 0.0);
        assert!((g.diameter - SQRT_2).abs() < 1e-15);
        assert!((g.centroid - Vec2::new(0.5, 0.5)).norm() < 1e-15);
        assert!((g.area - 1.0).abs() < 1e-15);
        assert_eq!(g.p, Vec2::new(0.0, 0.5));
        assert_eq!(g.q, Vec2::new(1.0, 0.5));
        assert_eq!(g.r, Vec2::new(0.5, 0.0));
        assert_eq!(g.s, Vec2::new(0.5, 1.0));
    }

    #[test]
    fn rotated_square_angle() {
        let v = unit_square().map(|p| rotate(p, FRAC_PI_6));
        let g = ElementGeometry::new(v).unwrap();
        assert!((g.theta - FRAC_PI_6).abs() < 1e-12);
    }

    #[test]
    fn kite_angle_by_hand() {
        // P=(0,.5), Q=(1.5,1), R=(.5,0), S=(1,1.5):
        // theta1 = atan(1/3), theta2 = atan2(-0.5, 1.5) = -atan(1/3), L1 = L2.
        let v = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(0.0, 1.0),
        ];
        let g = ElementGeometry::new(v).unwrap();
        assert!(g.theta.abs() < 1e-15);
        // Shoelace centroid: area 2, first moments by hand.
        assert!((g.area - 2.0).abs() < 1e-15);
        assert!((g.centroid - Vec2::new(5.0 / 6.0, 5.0 / 6.0)).norm() < 1e-14);
    }

    #[test]
    fn skewed_quad_angle_by_hand() {
        // (0,0),(2,0),(2,1),(0,2): P=(0,1), Q=(2,.5), R=(1,0), S=(1,1.5).
        let v = [
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(0.0, 2.0),
        ];
        let g = ElementGeometry::new(v).unwrap();
        let t1 = (-0.5f64).atan2(2.0);
        let t2 = 0.0f64.atan2(1.5);
        let l1 = (4.0f64 + 0.25).sqrt();
        let l2 = 1.5;
        assert!((g.theta - (l1 * t1 + l2 * t2) / (l1 + l2)).abs() < 1e-15);
    }

    #[test]
    fn rotation_covariance_mod_pi() {
        let quads = [
            unit_square(),
            [
                Vec2::new(0.0, 0.0),
                Vec2::new(3.0, 0.2),
                Vec2::new(2.5, 1.7),
                Vec2::new(-0.4, 1.1),
            ],
            [
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.2, 0.3),
                Vec2::new(0.0, 1.0),
            ],
        ];
        for v in quads {
            let base = ElementGeometry::new(v).unwrap().theta;
            for gamma in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
                let rv = v.map(|p| rotate(p, gamma));
                let t = ElementGeometry::new(rv).unwrap().theta;
                let diff = fold_half_turn(t - base - gamma);
                assert!(diff.abs() < 1e-12, "diff {diff}");
            }
        }
    }

    #[test]
    fn degenerate_and_crossing_rejected() {
        let flat = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(3.0, 0.0),
        ];
        assert!(matches!(
            ElementGeometry::new(flat),
            Err(Error::DegenerateElement { .. })
        ));
        let cw = [
            Vec2::new(0.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 0.0),
        ];
        assert!(ElementGeometry::new(cw).is_err());
        // Bow-tie with net positive area.
        let bow = [
            Vec2::new(0.0, 0.0),
            Vec2::new(3.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 1.2),
        ];
        assert!(signed_area(&bow) > 0.0);
        assert!(matches!(
            ElementGeometry::new(bow),
            Err(Error::SelfIntersecting { .. })
        ));
    }

    #[test]
    fn nonconvex_reflex_vertex() {
        let v = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.2, 0.2),
            Vec2::new(0.0, 1.0),
        ];
        let g = ElementGeometry::new(v).unwrap();
        assert_eq!(g.reflex_vertices(), vec![2]);
    }
}
