use std::collections::BTreeMap;

use faer::prelude::*;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;

use crate::error::{Error, Result};
use crate::geometry::{ElementGeometry, QuadMesh};
use crate::projection::{Mat8, Vec8};
use crate::Vec2;

/// Required normwise backward error `|f - K u| / (|K| |u| + |f|)` (infinity
/// norms) of the reduced solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Compressed sparse row matrix with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match cols.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Assembled stiffness, load vector, and prescribed dofs.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub k: CsrMatrix,
    pub f: Vec<f64>,
    pub dirichlet: BTreeMap<usize, f64>,
}

fn element_dofs(conn: &[usize; 4]) -> [usize; 8] {
    let mut d = [0; 8];
    for (k, &n) in conn.iter().enumerate() {
        d[2 * k] = 2 * n;
        d[2 * k + 1] = 2 * n + 1;
    }
    d
}

/// Scatter one 8x8 kernel per element into a global CSR matrix. Elements
/// are added in index order, so the result does not depend on how the
/// kernels were computed.
pub fn assemble(mesh: &QuadMesh, kernels: &[Mat8]) -> Result<GlobalSystem> {
    if kernels.len() != mesh.n_elements() {
        return Err(Error::DimensionMismatch(format!(
            "{} kernels for {} elements",
            kernels.len(),
            mesh.n_elements()
        )));
    }
    let n = mesh.n_dofs();
    let mut pattern: Vec<Vec<usize>> = vec![Vec::new(); n];
    for conn in mesh.elements() {
        let dofs = element_dofs(conn);
        for &i in &dofs {
            pattern[i].extend_from_slice(&dofs);
        }
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    row_ptr.push(0);
    for row in pattern.iter_mut() {
        row.sort_unstable();
        row.dedup();
        col_idx.extend_from_slice(row);
        row_ptr.push(col_idx.len());
    }
    let mut k = CsrMatrix {
        n,
        row_ptr,
        col_idx,
        vals: Vec::new(),
    };
    k.vals = vec![0.0; k.col_idx.len()];
    for (conn, ke) in mesh.elements().iter().zip(kernels) {
        let dofs = element_dofs(conn);
        for (a, &i) in dofs.iter().enumerate() {
            let start = k.row_ptr[i];
            let cols = &k.col_idx[start..k.row_ptr[i + 1]];
            for (b, &j) in dofs.iter().enumerate() {
                let pos = start + cols.binary_search(&j).expect("pattern covers element");
                k.vals[pos] += ke[(a, b)];
            }
        }
    }
    Ok(GlobalSystem {
        k,
        f: vec![0.0; n],
        dirichlet: BTreeMap::new(),
    })
}

/// One-point body force: each vertex receives `|E| / 4 * b(x_E)`.
pub fn body_force_vector(e: &ElementGeometry, b: impl Fn(Vec2) -> Vec2) -> Vec8 {
    let v = b(e.centroid) * (e.area / 4.0);
    Vec8::from_fn(|i, _| if i % 2 == 0 { v.x } else { v.y })
}

/// `∫ phi^T t ds` over the segment `a-b` with four Gauss points; returns the
/// loads `(f_ax, f_ay, f_bx, f_by)`.
pub fn traction_vector(a: Vec2, b: Vec2, t: impl Fn(Vec2) -> Vec2) -> [f64; 4] {
    const G4: [(f64, f64); 4] = [
        (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    ];
    let len = (b - a).norm();
    let mut out = [0.0; 4];
    for (z, w) in G4 {
        let s = 0.5 * (z + 1.0);
        let tv = t(a + s * (b - a)) * (0.5 * w * len);
        out[0] += (1.0 - s) * tv.x;
        out[1] += (1.0 - s) * tv.y;
        out[2] += s * tv.x;
        out[3] += s * tv.y;
    }
    out
}

impl GlobalSystem {
    pub fn n_dofs(&self) -> usize {
        self.k.n
    }

    /// Add the one-point body-force load of every element.
    pub fn add_body_force(&mut self, mesh: &QuadMesh, b: impl Fn(Vec2) -> Vec2) -> Result<()> {
        for (e, conn) in mesh.elements().iter().enumerate() {
            let fe = body_force_vector(&mesh.element_geometry(e)?, &b);
            for (a, &i) in element_dofs(conn).iter().enumerate() {
                self.f[i] += fe[a];
            }
        }
        Ok(())
    }

    /// Add the traction load on every boundary edge with `tag`.
    pub fn add_traction(&mut self, mesh: &QuadMesh, tag: &str, t: impl Fn(Vec2) -> Vec2) {
        for be in mesh.edges_with_tag(tag) {
            let fe = traction_vector(mesh.nodes()[be.a], mesh.nodes()[be.b], &t);
            self.f[2 * be.a] += fe[0];
            self.f[2 * be.a + 1] += fe[1];
            self.f[2 * be.b] += fe[2];
            self.f[2 * be.b + 1] += fe[3];
        }
    }

    /// Prescribe a dof value; a later call for the same dof overrides.
    pub fn constrain(&mut self, dof: usize, value: f64) {
        self.dirichlet.insert(dof, value);
    }

    /// Prescribe component `comp` (0 = x, 1 = y) at the given nodes from a
    /// field.
    pub fn constrain_nodes(
        &mut self,
        mesh: &QuadMesh,
        nodes: &[usize],
        comp: usize,
        value: impl Fn(Vec2) -> f64,
    ) {
        for &n in nodes {
            self.constrain(2 * n + comp, value(mesh.nodes()[n]));
        }
    }

    /// Eliminate the prescribed dofs: `K_ff u_f = f_f - K_fc u_c`.
    pub fn reduce(&self) -> Result<ReducedSystem> {
        let n = self.n_dofs();
        if let Some((&d, _)) = self.dirichlet.range(n..).next() {
            return Err(Error::DimensionMismatch(format!(
                "constrained dof {d} outside the {n} system dofs"
            )));
        }
        let mut map = vec![usize::MAX; n];
        let mut free = Vec::new();
        for (i, m) in map.iter_mut().enumerate() {
            if !self.dirichlet.contains_key(&i) {
                *m = free.len();
                free.push(i);
            }
        }
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        let mut rhs = Vec::with_capacity(free.len());
        for &i in &free {
            let mut r = self.f[i];
            for (j, v) in self.k.row(i) {
                match self.dirichlet.get(&j) {
                    Some(&uj) => r -= v * uj,
                    None => {
                        col_idx.push(map[j]);
                        vals.push(v);
                    }
                }
            }
            row_ptr.push(col_idx.len());
            rhs.push(r);
        }
        Ok(ReducedSystem {
            k: CsrMatrix {
                n: free.len(),
                row_ptr,
                col_idx,
                vals,
            },
            rhs,
            free,
        })
    }

    /// Solve with Dirichlet elimination and a sparse Cholesky factorization.
    pub fn solve(&self) -> Result<Solution> {
        let red = self.reduce()?;
        let uf = red.solve()?;
        let mut u = vec![0.0; self.n_dofs()];
        for (&d, &v) in &self.dirichlet {
            u[d] = v;
        }
        for (k, &i) in red.free.iter().enumerate() {
            u[i] = uf.x[k];
        }
        let ku = self.k.matvec(&u);
        let reactions = self
            .dirichlet
            .keys()
            .map(|&d| (d, ku[d] - self.f[d]))
            .collect();
        Ok(Solution {
            u,
            residual: uf.residual,
            backward_error: uf.backward_error,
            reactions,
        })
    }
}

/// The system restricted to free dofs.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub k: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Global index of each reduced dof.
    pub free: Vec<usize>,
}

pub(crate) struct ReducedSolution {
    pub x: Vec<f64>,
    pub residual: f64,
    pub backward_error: f64,
}

impl ReducedSystem {
    pub(crate) fn factor(&self) -> Result<Llt<usize, f64>> {
        let n = self.k.n;
        if n == 0 {
            return Err(Error::SingularSystem("no free dofs".into()));
        }
        let mut trips = Vec::with_capacity(self.k.nnz());
        for i in 0..n {
            for (j, v) in self.k.row(i) {
                trips.push(Triplet::new(i, j, v));
            }
        }
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips)
            .map_err(|e| Error::SingularSystem(format!("{e:?}")))?;
        a.sp_cholesky(Side::Lower)
            .map_err(|e| Error::SingularSystem(format!("Cholesky factorization failed: {e:?}")))
    }

    pub(crate) fn solve(&self) -> Result<ReducedSolution> {
        let n = self.k.n;
        if n == 0 {
            return Ok(ReducedSolution {
                x: Vec::new(),
                residual: 0.0,
                backward_error: 0.0,
            });
        }
        let llt = self.factor()?;
        let b = Col::<f64>::from_fn(n, |i| self.rhs[i]);
        let mut x: Vec<f64> = {
            let sol = llt.solve(&b);
            (0..n).map(|i| sol[i]).collect()
        };
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let knorm = (0..n)
            .map(|i| self.k.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        let fnorm = inf(&self.rhs);
        let residual_of = |x: &[f64]| -> (Vec<f64>, f64) {
            let kx = self.k.matvec(x);
            let r: Vec<f64> = self.rhs.iter().zip(&kx).map(|(f, k)| f - k).collect();
            let denom = knorm * inf(x) + fnorm;
            let eta = if denom > 0.0 { inf(&r) / denom } else { 0.0 };
            (r, eta)
        };
        let (mut r, mut eta) = residual_of(&x);
        if !eta.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("non-finite solution".into()));
        }
        // A few steps of iterative refinement with the same factorization.
        for _ in 0..3 {
            if eta < RESIDUAL_TOL * 1e-3 {
                break;
            }
            let rc = Col::<f64>::from_fn(n, |i| r[i]);
            let dx = llt.solve(&rc);
            let cand: Vec<f64> = (0..n).map(|i| x[i] + dx[i]).collect();
            let (rn, etan) = residual_of(&cand);
            if etan >= eta {
                break;
            }
            x = cand;
            r = rn;
            eta = etan;
        }
        if !(eta < RESIDUAL_TOL) {
            return Err(Error::Residual {
                residual: eta,
                tol: RESIDUAL_TOL,
            });
        }
        let l2 = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let f2 = l2(&self.rhs);
        let residual = if f2 > 0.0 { l2(&r) / f2 } else { l2(&r) };
        Ok(ReducedSolution {
            x,
            residual,
            backward_error: eta,
        })
    }
}

/// Nodal displacements with solve diagnostics.
#[derive(Debug, Clone)]
pub struct Solution {
    /// Interleaved `(u_x, u_y)` per node.
    pub u: Vec<f64>,
    /// Relative residual `|f - K u| / |f|` of the reduced system.
    pub residual: f64,
    /// Normwise backward error of the reduced solve.
    pub backward_error: f64,
    /// `(K u - f)` at each constrained dof.
    pub reactions: BTreeMap<usize, f64>,
}

impl Solution {
    pub fn node(&self, i: usize) -> Vec2 {
        Vec2::new(self.u[2 * i], self.u[2 * i + 1])
    }

    pub fn element_dofs(&self, conn: &[usize; 4]) -> Vec8 {
        let dofs = element_dofs(conn);
        Vec8::from_fn(|i, _| self.u[dofs[i]])
    }

    /// Sum of reactions per component.
    pub fn reaction_resultant(&self) -> Vec2 {
        let mut s = Vec2::zeros();
        for (&d, &r) in &self.reactions {
            s[d % 2] += r;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gen_structured_rect;

    fn spd_kernel(seed: f64) -> Mat8 {
        let a = Mat8::from_fn(|i, j| ((i * 8 + j) as f64 * seed).sin());
        a * a.transpose() + Mat8::identity()
    }

    #[test]
    fn single_element_equals_kernel() {
        let mesh = gen_structured_rect(1, 1, 1.0, 1.0).unwrap();
        let ke = spd_kernel(0.37);
        let sys = assemble(&mesh, &[ke]).unwrap();
        let dense = sys.k.to_dense();
        let dofs = element_dofs(&mesh.elements()[0]);
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(dense[(dofs[a], dofs[b])], ke[(a, b)]);
            }
        }
        assert!(assemble(&mesh, &[]).is_err());
    }

    #[test]
    fn disjoint_elements_give_blocks() {
        let nodes = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(3.0, 0.0),
            Vec2::new(3.0, 1.0),
            Vec2::new(2.0, 1.0),
        ];
        let mesh = QuadMesh::new(nodes, vec![[0, 1, 2, 3], [4, 5, 6, 7]], vec![]).unwrap();
        let sys = assemble(&mesh, &[spd_kernel(0.1), spd_kernel(0.2)]).unwrap();
        let d = sys.k.to_dense();
        assert_eq!(d.view((0, 8), (8, 8)).norm(), 0.0);
        assert_eq!(d.view((8, 0), (8, 8)).norm(), 0.0);
    }

    #[test]
    fn loads() {
        let sq = ElementGeometry::new([
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap();
        let f = body_force_vector(&sq, |_| Vec2::new(1.0, 0.0));
        assert_eq!(f, Vec8::from_row_slice(&[0.25, 0.0, 0.25, 0.0, 0.25, 0.0, 0.25, 0.0]));
        assert_eq!(body_force_vector(&sq, |_| Vec2::zeros()), Vec8::zeros());
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(1.0, 0.0);
        let t = traction_vector(a, b, |_| Vec2::new(0.0, -1.0));
        assert_eq!(t, [0.0, -0.5, 0.0, -0.5]);
        // Linear traction p(s) = s: loads 1/6 and 1/3.
        let t = traction_vector(a, b, |x| Vec2::new(x.x, 0.0));
        assert!((t[0] - 1.0 / 6.0).abs() < 1e-15 && (t[2] - 1.0 / 3.0).abs() < 1e-15);
        // Parabolic shear on a unit-height edge with resultant -100.
        let tau = |x: Vec2| Vec2::new(0.0, -150.0 * (1.0 - 4.0 * x.y * x.y));
        let t = traction_vector(Vec2::new(0.0, -0.5), Vec2::new(0.0, 0.5), tau);
        assert!((t[1] + t[3] + 100.0).abs() < 1e-12);
        assert!((t[1] - t[3]).abs() < 1e-12);
    }

    #[test]
    fn clamped_single_element() {
        let mesh = gen_structured_rect(1, 1, 1.0, 1.0).unwrap();
        let mut sys = assemble(&mesh, &[spd_kernel(0.3)]).unwrap();
        for d in 0..8 {
            sys.constrain(d, 0.0);
        }
        assert!(sys.reduce().unwrap().solve().is_ok());
        let sol = sys.solve().unwrap();
        assert!(sol.u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unconstrained_singular_system_errors() {
        let mesh = gen_structured_rect(1, 1, 1.0, 1.0).unwrap();
        let mut ke = Mat8::zeros();
        ke[(0, 0)] = 1.0;
        let mut sys = assemble(&mesh, &[ke]).unwrap();
        sys.f[3] = 1.0;
        assert!(sys.solve().is_err());
    }
}
