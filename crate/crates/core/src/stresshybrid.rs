//! Stress-hybrid element kernel: divergence-free linear stress basis in the
//! element's local frame, the compliance matrix `H`, the boundary coupling
//! `L`, the stress projection `H^-1 L`, and the element stiffness.

use nalgebra::{Cholesky, DMatrix, Dyn, Matrix2, Matrix3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{rotate, ElementGeometry};
use crate::material::PlaneStrainMaterial;
use crate::projection::{Mat8, Vec8, COND_LIMIT};
use crate::quadrature::{PolyMoments, GAUSS2_UNIT};
use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StressMode {
    /// Five terms with bending terms aligned to the element frame.
    Rotated5,
    /// Five terms aligned to the global axes.
    Unrotated5,
    /// Seven terms aligned to the global axes.
    Unrotated7,
}

impl StressMode {
    pub fn n_beta(self) -> usize {
        match self {
            StressMode::Rotated5 | StressMode::Unrotated5 => 5,
            StressMode::Unrotated7 => 7,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StressMode::Rotated5 => "rotated5",
            StressMode::Unrotated5 => "unrotated5",
            StressMode::Unrotated7 => "unrotated7",
        }
    }
}

impl std::str::FromStr for StressMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rotated5" => Ok(StressMode::Rotated5),
            "unrotated5" => Ok(StressMode::Unrotated5),
            "unrotated7" => Ok(StressMode::Unrotated7),
            _ => Err(Error::InvalidArgument(format!("unknown stress mode {s:?}"))),
        }
    }
}

/// Stress basis `P(x) = P0 + xi Pxi + eta Peta` (3 x n_beta, stress Voigt)
/// in the scaled coordinates of the element.
#[derive(Debug, Clone, PartialEq)]
pub struct StressBasis {
    pub mode: StressMode,
    pub theta: f64,
    pub centroid: Vec2,
    pub h: f64,
    pub p0: DMatrix<f64>,
    pub pxi: DMatrix<f64>,
    pub peta: DMatrix<f64>,
}

/// Voigt columns of the constant stresses `e1 e1`, `e2 e2` for the frame
/// rotated by `theta`.
fn frame_dyads(c: f64, s: f64) -> (Vector3<f64>, Vector3<f64>) {
    (
        Vector3::new(c * c, s * s, c * s),
        Vector3::new(s * s, c * c, -c * s),
    )
}

impl StressBasis {
    pub fn new(e: &ElementGeometry, mode: StressMode) -> Self {
        let n = mode.n_beta();
        let mut p0 = DMatrix::zeros(3, n);
        let mut pxi = DMatrix::zeros(3, n);
        let mut peta = DMatrix::zeros(3, n);
        for i in 0..3 {
            p0[(i, i)] = 1.0;
        }
        let theta = match mode {
            StressMode::Rotated5 => e.theta,
            _ => 0.0,
        };
        let (c, s) = (theta.cos(), theta.sin());
        // xi' = c xi + s eta, eta' = -s xi + c eta.
        let (d1, d2) = frame_dyads(c, s);
        for i in 0..3 {
            pxi[(i, 3)] = -s * d1[i];
            peta[(i, 3)] = c * d1[i];
            pxi[(i, 4)] = c * d2[i];
            peta[(i, 4)] = s * d2[i];
        }
        if mode == StressMode::Unrotated7 {
            peta[(1, 5)] = 1.0;
            pxi[(2, 5)] = -1.0;
            pxi[(0, 6)] = 1.0;
            peta[(2, 6)] = -1.0;
        }
        Self {
            mode,
            theta,
            centroid: e.centroid,
            h: e.diameter,
            p0,
            pxi,
            peta,
        }
    }

    /// Rotated basis with the constant stresses left as the rotated frame
    /// dyads instead of the global unit stresses. Spans the same space as
    /// [`StressMode::Rotated5`].
    pub fn rotated_frame_constants(e: &ElementGeometry) -> Self {
        let mut b = Self::new(e, StressMode::Rotated5);
        let (c, s) = (b.theta.cos(), b.theta.sin());
        let (d1, d2) = frame_dyads(c, s);
        let d3 = Vector3::new(-2.0 * c * s, 2.0 * c * s, c * c - s * s);
        for (j, d) in [d1, d2, d3].iter().enumerate() {
            b.p0.set_column(j, d);
        }
        b
    }

    pub fn n_beta(&self) -> usize {
        self.p0.ncols()
    }

    pub fn eval_scaled(&self, xi: f64, eta: f64) -> DMatrix<f64> {
        &self.p0 + &self.pxi * xi + &self.peta * eta
    }

    pub fn eval(&self, x: Vec2) -> DMatrix<f64> {
        let z = (x - self.centroid) / self.h;
        self.eval_scaled(z.x, z.y)
    }

    /// Divergence of every column (constant, since `P` is linear).
    pub fn divergence(&self) -> DMatrix<f64> {
        let mut div = DMatrix::zeros(2, self.n_beta());
        for j in 0..self.n_beta() {
            div[(0, j)] = (self.pxi[(0, j)] + self.peta[(2, j)]) / self.h;
            div[(1, j)] = (self.pxi[(2, j)] + self.peta[(1, j)]) / self.h;
        }
        div
    }

    /// `Q = [[c, s], [-s, c]]`, mapping global to local coordinates.
    pub fn rotation(&self) -> Matrix2<f64> {
        let (c, s) = (self.theta.cos(), self.theta.sin());
        Matrix2::new(c, s, -s, c)
    }
}

pub fn build_stress_basis(e: &ElementGeometry, mode: StressMode) -> StressBasis {
    StressBasis::new(e, mode)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShElementKernel {
    pub h: DMatrix<f64>,
    pub l: DMatrix<f64>,
    pub pi_beta: DMatrix<f64>,
    pub k: Mat8,
}

impl ShElementKernel {
    /// Stress coefficients `Pi_beta d`.
    pub fn beta(&self, d: &Vec8) -> DMatrix<f64> {
        &self.pi_beta * DMatrix::from_column_slice(8, 1, d.as_slice())
    }
}

/// `∫_E P^T Cinv P dx`, exact through the second area moments.
pub fn compliance_matrix(
    e: &ElementGeometry,
    basis: &StressBasis,
    cinv: &Matrix3<f64>,
) -> DMatrix<f64> {
    let m = PolyMoments::new(e);
    let ci = DMatrix::from_fn(3, 3, |i, j| cinv[(i, j)]);
    let sym = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
        let t = a.transpose() * &ci * b;
        if std::ptr::eq(a, b) {
            t
        } else {
            &t + t.transpose()
        }
    };
    let (p0, px, py) = (&basis.p0, &basis.pxi, &basis.peta);
    let mut h = sym(p0, p0) * m.moment(0, 0)
        + sym(p0, px) * m.moment(1, 0)
        + sym(p0, py) * m.moment(0, 1)
        + sym(px, px) * m.moment(2, 0)
        + sym(px, py) * m.moment(1, 1)
        + sym(py, py) * m.moment(0, 2);
    h = (&h + h.transpose()) * 0.5;
    h
}

/// `∮ P^T N phi ds` with two Gauss points per edge.
pub fn boundary_matrix(e: &ElementGeometry, basis: &StressBasis) -> DMatrix<f64> {
    let nb = basis.n_beta();
    let mut l = DMatrix::zeros(nb, 8);
    for k in 0..4 {
        let (a, b) = e.edge(k);
        let (n, len) = e.edge_normal(k);
        for &(t, w) in &GAUSS2_UNIT {
            let p = basis.eval(a + t * (b - a));
            for j in 0..nb {
                let tx = n.x * p[(0, j)] + n.y * p[(2, j)];
                let ty = n.x * p[(2, j)] + n.y * p[(1, j)];
                for (node, hat) in [(k, 1.0 - t), ((k + 1) % 4, t)] {
                    l[(j, 2 * node)] += w * len * hat * tx;
                    l[(j, 2 * node + 1)] += w * len * hat * ty;
                }
            }
        }
    }
    l
}

fn ill(matrix: &'static str, cond: f64) -> Error {
    Error::IllConditioned {
        element: None,
        matrix,
        cond,
    }
}

fn to_mat8(m: &DMatrix<f64>) -> Mat8 {
    let mut k = Mat8::from_fn(|i, j| m[(i, j)]);
    k = (k + k.transpose()) * 0.5;
    k
}

/// Build `H`, `L`, `Pi_beta = H^-1 L`, and `K = L^T H^-1 L`.
///
/// Near the incompressible limit `H` inherits the conditioning of the
/// compliance along the volumetric direction. The solve therefore splits off
/// the constant stresses (the first three basis columns): their block is
/// `|E| T^T Cinv T`, whose inverse `T^-1 C T^-T / |E|` is formed from the
/// closed-form stiffness, and only the Schur complement of the linear terms
/// goes through Cholesky.
pub fn build_sh_kernel(
    e: &ElementGeometry,
    mat: &PlaneStrainMaterial,
    basis: &StressBasis,
) -> Result<ShElementKernel> {
    let h = compliance_matrix(e, basis, &mat.cinv);
    let l = boundary_matrix(e, basis);
    let eig = SymmetricEigen::new(h.clone()).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if !(lo > 0.0) {
        return Err(ill("H", f64::INFINITY));
    }
    if !(hi / lo <= COND_LIMIT) {
        return Err(ill("H", hi / lo));
    }

    let nb = basis.n_beta();
    let t = Matrix3::from_fn(|i, j| basis.p0[(i, j)]);
    let tinv = t.try_inverse().ok_or_else(|| ill("H", f64::INFINITY))?;
    let hcc_inv3 = tinv * mat.c * tinv.transpose() / e.area;
    let hcc_inv = DMatrix::from_fn(3, 3, |i, j| hcc_inv3[(i, j)]);
    let hcb = h.view((0, 3), (3, nb - 3)).into_owned();
    let hbb = h.view((3, 3), (nb - 3, nb - 3)).into_owned();
    let lc = l.rows(0, 3).into_owned();
    let lb = l.rows(3, nb - 3).into_owned();

    let g = &hcc_inv * &hcb;
    let schur = &hbb - hcb.transpose() * &g;
    let w = &lb - hcb.transpose() * (&hcc_inv * &lc);
    let chol = Cholesky::<f64, Dyn>::new(schur).ok_or_else(|| ill("H", hi / lo))?;
    let beta_b = chol.solve(&w);
    let beta_c = &hcc_inv * &lc - &g * &beta_b;

    let mut pi_beta = DMatrix::zeros(nb, 8);
    pi_beta.rows_mut(0, 3).copy_from(&beta_c);
    pi_beta.rows_mut(3, nb - 3).copy_from(&beta_b);
    let k = to_mat8(&(lc.transpose() * &hcc_inv * &lc + w.transpose() * &beta_b));
    Ok(ShElementKernel { h, l, pi_beta, k })
}

/// The rotated five-term kernel computed the other way round: build the
/// axis-aligned kernel on the element rotated into its local frame, then
/// rotate the dofs back with `R = diag(Q, Q, Q, Q)`.
pub fn build_sh_kernel_cook_form(e: &ElementGeometry, mat: &PlaneStrainMaterial) -> Result<Mat8> {
    let q = StressBasis::new(e, StressMode::Rotated5).rotation();
    let local = ElementGeometry::new(e.vertices.map(|v| rotate(v, -e.theta)))?;
    let basis = StressBasis::new(&local, StressMode::Unrotated5);
    let kl = build_sh_kernel(&local, mat, &basis)?.k;
    let mut r = Mat8::zeros();
    for k in 0..4 {
        r.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&q);
    }
    let k = r.transpose() * kl * r;
    Ok((k + k.transpose()) * 0.5)
}

/// `sigma(x) = P(x) Pi_beta d`.
pub fn recover_stress(
    kernel: &ShElementKernel,
    basis: &StressBasis,
    d: &Vec8,
    x: Vec2,
) -> Vector3<f64> {
    let s = basis.eval(x) * kernel.beta(d);
    Vector3::new(s[0], s[1], s[2])
}
