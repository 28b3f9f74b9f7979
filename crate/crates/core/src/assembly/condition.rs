use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::system::{CsrMatrix, GlobalSystem, ReducedSystem};
use crate::error::{Error, Result};

/// A symmetric linear operator.
pub trait SymOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

impl SymOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x)
    }
}

struct Inverse<'a> {
    n: usize,
    llt: &'a faer::sparse::linalg::solvers::Llt<usize, f64>,
}

impl SymOperator for Inverse<'_> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        use faer::prelude::*;
        let b = faer::Col::<f64>::from_fn(self.n, |i| x[i]);
        let y = self.llt.solve(&b);
        (0..self.n).map(|i| y[i]).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest eigenvalue of a positive semidefinite `op` by Lanczos with full
/// reorthogonalization, iterated until the largest Ritz pair has residual
/// below `tol` times its value.
pub fn lanczos_largest(op: &dyn SymOperator, tol: f64, max_iter: usize) -> Result<f64> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let nq = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|v| *v /= nq);

    let steps = max_iter.min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alpha: Vec<f64> = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    basis.push(q);
    loop {
        let j = basis.len() - 1;
        let mut w = op.apply(&basis[j]);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let b = dot(&w, &w).sqrt();

        let m = alpha.len();
        let exhausted = m == n || b <= 1e-14 * alpha.iter().fold(0.0f64, |s, a| s.max(a.abs()));
        if !(exhausted || m >= steps || (m >= 3 && m.is_multiple_of(8))) {
            beta.push(b);
            basis.push(w.into_iter().map(|v| v / b).collect());
            continue;
        }
        let t = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let imax = eig.eigenvalues.imax();
        let lmax = eig.eigenvalues[imax];
        let res = b * eig.eigenvectors[(m - 1, imax)].abs();
        if exhausted || res <= tol * lmax.abs() {
            return Ok(lmax);
        }
        if m >= steps {
            return Err(Error::NoConvergence { iterations: m });
        }
        beta.push(b);
        basis.push(w.into_iter().map(|v| v / b).collect());
    }
}

const LANCZOS_TOL: f64 = 1e-6;
const LANCZOS_MAX: usize = 400;

/// Spectral condition number of an SPD matrix: the largest eigenvalue from
/// Lanczos on `K`, the smallest from Lanczos on `K^-1` through a Cholesky
/// factorization.
pub fn condition_number_of(reduced: &ReducedSystem) -> Result<f64> {
    let lmax = lanczos_largest(&reduced.k, LANCZOS_TOL, LANCZOS_MAX)?;
    let llt = reduced.factor()?;
    let inv = Inverse {
        n: reduced.k.n,
        llt: &llt,
    };
    let inv_max = lanczos_largest(&inv, LANCZOS_TOL, LANCZOS_MAX)?;
    if !(inv_max > 0.0) {
        return Err(Error::SingularSystem("non-positive inverse spectrum".into()));
    }
    Ok(lmax * inv_max)
}

/// Condition number of the stiffness restricted to the free dofs.
pub fn condition_number(sys: &GlobalSystem) -> Result<f64> {
    condition_number_of(&sys.reduce()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> ReducedSystem {
        let n = values.len();
        ReducedSystem {
            k: CsrMatrix {
                n,
                row_ptr: (0..=n).collect(),
                col_idx: (0..n).collect(),
                vals: values.to_vec(),
            },
            rhs: vec![0.0; n],
            free: (0..n).collect(),
        }
    }

    #[test]
    fn diagonal_examples() {
        assert!((condition_number_of(&diag(&[1.0; 5])).unwrap() - 1.0).abs() < 1e-12);
        assert!((condition_number_of(&diag(&[1.0, 10.0])).unwrap() - 10.0).abs() < 1e-10);
        let v: Vec<f64> = (1..=500).map(|i| i as f64).collect();
        let c = condition_number_of(&diag(&v)).unwrap();
        assert!((c - 500.0).abs() < 0.01 * 500.0, "{c}");
    }

    #[test]
    fn laplacian_matches_closed_form() {
        let n = 200;
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            if i > 0 {
                col_idx.push(i - 1);
                vals.push(-1.0);
            }
            col_idx.push(i);
            vals.push(2.0);
            if i + 1 < n {
                col_idx.push(i + 1);
                vals.push(-1.0);
            }
            row_ptr.push(col_idx.len());
        }
        let red = ReducedSystem {
            k: CsrMatrix {
                n,
                row_ptr,
                col_idx,
                vals,
            },
            rhs: vec![0.0; n],
            free: (0..n).collect(),
        };
        let h = std::f64::consts::PI / (2.0 * (n + 1) as f64);
        let exact = (n as f64 * h).sin().powi(2) / h.sin().powi(2);
        let c = condition_number_of(&red).unwrap();
        assert!((c - exact).abs() < 0.01 * exact, "{c} vs {exact}");
    }
}
