//! Displacement-based baselines: B-bar VEM and a classical stabilized VEM.

use nalgebra::{Matrix3, SVector};

use crate::material::PlaneStrainMaterial;
use crate::projection::{EnergyProjection, Mat8};

#[derive(Debug, Clone, PartialEq)]
pub struct BbarKernel {
    pub kc_dil: Mat8,
    pub kc_dev: Mat8,
    pub kc: Mat8,
    pub ks: Mat8,
    pub lambda: SVector<f64, 8>,
    pub k: Mat8,
}

/// `Pi*^T (|E| SM^T C SM) Pi*`.
fn consistency(proj: &EnergyProjection, c: &Matrix3<f64>) -> Mat8 {
    let sm = proj.basis.sm;
    let inner = (sm.transpose() * c * sm) * proj.area;
    let k = proj.pi_star.transpose() * inner * proj.pi_star;
    (k + k.transpose()) * 0.5
}

/// `(I - Pi)^T diag(lambda) (I - Pi)`.
fn stabilization(proj: &EnergyProjection, lambda: &SVector<f64, 8>) -> Mat8 {
    let r = Mat8::identity() - proj.pi;
    let k = r.transpose() * Mat8::from_diagonal(lambda) * r;
    (k + k.transpose()) * 0.5
}

fn scaled_diagonal(k: &Mat8, floor: f64) -> SVector<f64, 8> {
    SVector::<f64, 8>::from_fn(|i, _| k[(i, i)].max(floor))
}

/// Consistency split into dilatational and deviatoric parts; the
/// stabilization is scaled by the deviatoric diagonal only.
pub fn build_bbar_kernel(mat: &PlaneStrainMaterial, proj: &EnergyProjection) -> BbarKernel {
    let kc_dil = consistency(proj, &mat.c_dil);
    let kc_dev = consistency(proj, &mat.c_dev);
    let kc = kc_dil + kc_dev;
    let lambda = scaled_diagonal(&kc_dev, mat.mu / 2.0);
    let ks = stabilization(proj, &lambda);
    BbarKernel {
        kc_dil,
        kc_dev,
        kc,
        ks,
        lambda,
        k: kc + ks,
    }
}

/// Full-C consistency with the stabilization scaled by its diagonal.
pub fn build_classic_kernel(mat: &PlaneStrainMaterial, proj: &EnergyProjection) -> Mat8 {
    let kc = consistency(proj, &mat.c);
    let lambda = scaled_diagonal(&kc, mat.mu / 2.0);
    kc + stabilization(proj, &lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ElementGeometry;
    use crate::material::make_material;
    use crate::projection::{build_energy_projection, rigid_modes, Vec8};
    use crate::quadrature::integrate_general;
    use crate::Vec2;
    use nalgebra::SymmetricEigen;

    fn quad(v: [(f64, f64); 4]) -> ElementGeometry {
        ElementGeometry::new(v.map(|(x, y)| Vec2::new(x, y))).unwrap()
    }

    #[test]
    fn split_is_complete() {
        let e = quad([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let mat = make_material(1.0, 0.0).unwrap();
        let p = build_energy_projection(&e, &mat).unwrap();
        let b = build_bbar_kernel(&mat, &p);
        assert!((b.kc - consistency(&p, &mat.c)).norm() < 1e-12);
        assert!(b.lambda.iter().all(|&l| l >= mat.mu / 2.0));
    }

    #[test]
    fn rigid_modes_and_rank() {
        let e = quad([(0.1, 0.0), (1.2, 0.3), (0.5, 0.5), (-0.2, 0.9)]);
        for nu in [0.3, 0.4999999] {
            let mat = make_material(1.0, nu).unwrap();
            let p = build_energy_projection(&e, &mat).unwrap();
            for k in [build_bbar_kernel(&mat, &p).k, build_classic_kernel(&mat, &p)] {
                let r = rigid_modes(&e);
                for j in 0..3 {
                    let d: Vec8 = r.column(j).into();
                    assert!((k * d).norm() < 1e-10 * k.norm(), "nu={nu} j={j} {:e}", (k * d).norm() / k.norm());
                }
                let ev = SymmetricEigen::new(k).eigenvalues;
                let max = ev.max();
                assert_eq!(ev.iter().filter(|&&l| l < 1e-10 * max).count(), 3);
                assert!(ev.min() > -1e-10 * max);
            }
        }
    }

    #[test]
    fn consistency_matches_brute_force() {
        let e = quad([(0.1, 0.0), (1.2, 0.3), (1.0, 1.4), (-0.2, 0.9)]);
        let mat = make_material(1.0, 0.3).unwrap();
        let p = build_energy_projection(&e, &mat).unwrap();
        let b = build_bbar_kernel(&mat, &p);
        let eps = p.strain_operator();
        for i in 0..8 {
            for j in 0..8 {
                let v = integrate_general(
                    &e,
                    |_| eps.column(i).dot(&(mat.c * eps.column(j))),
                    0,
                )
                .unwrap();
                assert!((v - b.kc[(i, j)]).abs() < 1e-10 * b.kc.norm());
            }
        }
    }
}
