//! Scaled vector monomials and the displacement energy projection of the
//! lowest-order virtual element space on a quadrilateral.
//!
//! Element dofs are ordered `(u_x, u_y)` per vertex, vertex 0 first.

use nalgebra::{SMatrix, Vector3};

use crate::error::{Error, Result};
use crate::geometry::ElementGeometry;
use crate::material::PlaneStrainMaterial;
use crate::quadrature::GAUSS2_UNIT;
use crate::Vec2;

pub type Mat3x6 = SMatrix<f64, 3, 6>;
pub type Mat6 = SMatrix<f64, 6, 6>;
pub type Mat6x8 = SMatrix<f64, 6, 8>;
pub type Mat8x6 = SMatrix<f64, 8, 6>;
pub type Mat8 = SMatrix<f64, 8, 8>;
pub type Vec8 = SMatrix<f64, 8, 1>;

/// Condition estimate above which element matrices are rejected.
pub const COND_LIMIT: f64 = 1e14;

/// The six scaled vector monomials
/// `(1,0), (0,1), (-eta,xi), (eta,xi), (xi,0), (0,eta)` with
/// `xi = (x - x_E) / h_E`, `eta = (y - y_E) / h_E`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialBasis {
    pub centroid: Vec2,
    pub h: f64,
    /// Engineering-strain Voigt column of each monomial (constant).
    pub sm: Mat3x6,
}

impl MonomialBasis {
    pub fn new(e: &ElementGeometry) -> Self {
        let ih = 1.0 / e.diameter;
        let mut sm = Mat3x6::zeros();
        sm[(2, 3)] = 2.0 * ih;
        sm[(0, 4)] = ih;
        sm[(1, 5)] = ih;
        Self {
            centroid: e.centroid,
            h: e.diameter,
            sm,
        }
    }

    /// Values of all six monomials at `x`, one per column.
    pub fn eval(&self, x: Vec2) -> SMatrix<f64, 2, 6> {
        let xi = (x.x - self.centroid.x) / self.h;
        let eta = (x.y - self.centroid.y) / self.h;
        SMatrix::<f64, 2, 6>::new(1.0, 0.0, -eta, eta, xi, 0.0, 0.0, 1.0, xi, xi, 0.0, eta)
    }

    pub fn eval_one(&self, alpha: usize, x: Vec2) -> Vec2 {
        self.eval(x).column(alpha).into()
    }
}

pub fn build_monomials(e: &ElementGeometry) -> MonomialBasis {
    MonomialBasis::new(e)
}

/// Energy projection matrices of one element.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProjection {
    pub basis: MonomialBasis,
    pub area: f64,
    pub g: Mat6,
    pub b: Mat6x8,
    pub d: Mat8x6,
    /// Monomial coefficients of the projection, `G^-1 B`.
    pub pi_star: Mat6x8,
    /// The projection in dof space, `D G^-1 B`.
    pub pi: Mat8,
}

impl EnergyProjection {
    /// Constant engineering strain of the projection, `SM Pi*`.
    pub fn strain_operator(&self) -> SMatrix<f64, 3, 8> {
        self.basis.sm * self.pi_star
    }

    pub fn projected_strain(&self, d: &Vec8) -> Vector3<f64> {
        self.strain_operator() * d
    }
}

/// Row-equilibrated 1-norm condition estimate of a small square matrix,
/// computed from an explicit inverse. Returns `None` if singular.
fn scaled_condition<const N: usize>(m: &SMatrix<f64, N, N>) -> Option<f64> {
    let mut ms = *m;
    for i in 0..N {
        let r = m.row(i).amax();
        if r == 0.0 {
            return None;
        }
        ms.row_mut(i).scale_mut(1.0 / r);
    }
    let inv = ms.try_inverse()?;
    let norm1 = |a: &SMatrix<f64, N, N>| {
        (0..N)
            .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    Some(norm1(&ms) * norm1(&inv))
}

pub fn build_energy_projection(
    e: &ElementGeometry,
    mat: &PlaneStrainMaterial,
) -> Result<EnergyProjection> {
    let basis = MonomialBasis::new(e);
    let mut g = Mat6::zeros();
    let mut b = Mat6x8::zeros();
    let mut d = Mat8x6::zeros();

    // Rows 1-3: discrete vertex inner product.
    for (k, &v) in e.vertices.iter().enumerate() {
        let m = basis.eval(v);
        for mu in 0..6 {
            d[(2 * k, mu)] = m[(0, mu)];
            d[(2 * k + 1, mu)] = m[(1, mu)];
        }
        for alpha in 0..3 {
            for mu in 0..6 {
                g[(alpha, mu)] += 0.25 * m.column(mu).dot(&m.column(alpha));
            }
            b[(alpha, 2 * k)] = 0.25 * m[(0, alpha)];
            b[(alpha, 2 * k + 1)] = 0.25 * m[(1, alpha)];
        }
    }

    // Boundary form of the mean engineering strain of each dof,
    // ∮ (n_x phi_x, n_y phi_y, n_y phi_x + n_x phi_y) ds. Each hat function
    // integrates to len / 2 along an edge.
    let mut strain_sum = SMatrix::<f64, 3, 8>::zeros();
    for k in 0..4 {
        let (n, len) = e.edge_normal(k);
        let mut w = [0.0; 2];
        for &(tq, wq) in &GAUSS2_UNIT {
            w[0] += wq * (1.0 - tq) * len;
            w[1] += wq * tq * len;
        }
        for (node, wn) in [(k, w[0]), ((k + 1) % 4, w[1])] {
            strain_sum[(0, 2 * node)] += wn * n.x;
            strain_sum[(2, 2 * node)] += wn * n.y;
            strain_sum[(1, 2 * node + 1)] += wn * n.y;
            strain_sum[(2, 2 * node + 1)] += wn * n.x;
        }
    }

    // Rows 4-6: a(m_mu, m_alpha) and a(phi_i, m_alpha).
    let stress = mat.c * basis.sm;
    for alpha in 3..6 {
        for mu in 0..6 {
            g[(alpha, mu)] = e.area * basis.sm.column(mu).dot(&stress.column(alpha));
        }
        let row = stress.column(alpha).transpose() * strain_sum;
        b.row_mut(alpha).copy_from(&row);
    }

    let cond = scaled_condition(&g).ok_or(Error::IllConditioned {
        element: None,
        matrix: "G",
        cond: f64::INFINITY,
    })?;
    if !(cond <= COND_LIMIT) {
        return Err(Error::IllConditioned {
            element: None,
            matrix: "G",
            cond,
        });
    }

    // G is block upper triangular (rigid modes carry no energy), and in the
    // strain block the material cancels: SM_s c_s = mean strain. Solving the
    // blocks separately keeps the projection free of the conditioning of C
    // near the incompressible limit.
    let mut pi_star = Mat6x8::zeros();
    let h = basis.h;
    pi_star.row_mut(3).copy_from(&(strain_sum.row(2) * (h / (2.0 * e.area))));
    pi_star.row_mut(4).copy_from(&(strain_sum.row(0) * (h / e.area)));
    pi_star.row_mut(5).copy_from(&(strain_sum.row(1) * (h / e.area)));
    let a = g.fixed_view::<3, 3>(0, 0).into_owned();
    let ainv = a.try_inverse().ok_or(Error::IllConditioned {
        element: None,
        matrix: "G",
        cond: f64::INFINITY,
    })?;
    let rhs = b.fixed_rows::<3>(0) - g.fixed_view::<3, 3>(0, 3) * pi_star.fixed_rows::<3>(3);
    pi_star.fixed_rows_mut::<3>(0).copy_from(&(ainv * rhs));
    let pi = d * pi_star;
    Ok(EnergyProjection {
        basis,
        area: e.area,
        g,
        b,
        d,
        pi_star,
        pi,
    })
}

/// Element dofs of a displacement field sampled at the vertices.
pub fn interpolate(e: &ElementGeometry, u: impl Fn(Vec2) -> Vec2) -> Vec8 {
    let mut d = Vec8::zeros();
    for (k, &v) in e.vertices.iter().enumerate() {
        let val = u(v);
        d[2 * k] = val.x;
        d[2 * k + 1] = val.y;
    }
    d
}

/// Dofs of the three rigid-body modes (two translations, one rotation about
/// the centroid), one per column.
pub fn rigid_modes(e: &ElementGeometry) -> SMatrix<f64, 8, 3> {
    let mut r = SMatrix::<f64, 8, 3>::zeros();
    for (k, &v) in e.vertices.iter().enumerate() {
        let x = v - e.centroid;
        r[(2 * k, 0)] = 1.0;
        r[(2 * k + 1, 1)] = 1.0;
        r[(2 * k, 2)] = -x.y;
        r[(2 * k + 1, 2)] = x.x;
    }
    r
}
