//! Isotropic plane-strain constitutive data.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Plane-strain isotropic material. Strain Voigt vectors use engineering
/// shear, stress Voigt vectors a single shear entry.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneStrainMaterial {
    pub young: f64,
    pub nu: f64,
    /// Stress from engineering strain.
    pub c: Matrix3<f64>,
    /// Engineering strain from stress.
    pub cinv: Matrix3<f64>,
    pub kappa: f64,
    pub mu: f64,
    /// Eigenvalues of `c`: volumetric `2 kappa + 2 mu / 3`, then `2 mu`, `mu`.
    pub eigenvalues: [f64; 3],
    /// Unit eigenvectors matching `eigenvalues`.
    pub eigenvectors: [Vector3<f64>; 3],
    pub c_dil: Matrix3<f64>,
    pub c_dev: Matrix3<f64>,
}

impl PlaneStrainMaterial {
    pub fn new(young: f64, nu: f64) -> Result<Self> {
        if !(young > 0.0 && young.is_finite()) {
            return Err(Error::InvalidMaterial(format!(
                "Young's modulus must be positive and finite, got {young}"
            )));
        }
        if !(0.0..0.5).contains(&nu) {
            return Err(Error::InvalidMaterial(format!(
                "Poisson's ratio must satisfy 0 <= nu < 0.5, got {nu}"
            )));
        }
        let one_m_2nu = 1.0 - 2.0 * nu;
        let f = young / ((1.0 + nu) * one_m_2nu);
        let c = Matrix3::new(
            f * (1.0 - nu),
            f * nu,
            0.0,
            f * nu,
            f * (1.0 - nu),
            0.0,
            0.0,
            0.0,
            f * one_m_2nu / 2.0,
        );
        let g = (1.0 + nu) / young;
        let cinv = Matrix3::new(
            g * (1.0 - nu),
            -g * nu,
            0.0,
            -g * nu,
            g * (1.0 - nu),
            0.0,
            0.0,
            0.0,
            2.0 * g,
        );
        let kappa = young / (3.0 * one_m_2nu);
        let mu = young / (2.0 * (1.0 + nu));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p1 = Vector3::new(s, s, 0.0);
        let p2 = Vector3::new(s, -s, 0.0);
        let p3 = Vector3::new(0.0, 0.0, 1.0);
        let l1 = 2.0 * kappa + 2.0 * mu / 3.0;
        let c_dil = l1 * p1 * p1.transpose();
        // Closed form of 2 mu p2 p2^T + mu p3 p3^T.
        let c_dev = Matrix3::new(mu, -mu, 0.0, -mu, mu, 0.0, 0.0, 0.0, mu);
        Ok(Self {
            young,
            nu,
            c,
            cinv,
            kappa,
            mu,
            eigenvalues: [l1, 2.0 * mu, mu],
            eigenvectors: [p1, p2, p3],
            c_dil,
            c_dev,
        })
    }
}

/// Shorthand for [`PlaneStrainMaterial::new`].
pub fn make_material(young: f64, nu: f64) -> Result<PlaneStrainMaterial> {
    PlaneStrainMaterial::new(young, nu)
}

/// Hydrostatic stress `(1 + nu) / 3 (s_xx + s_yy)` of a plane-strain state.
pub fn hydrostatic(sigma: &Vector3<f64>, nu: f64) -> f64 {
    (1.0 + nu) / 3.0 * (sigma[0] + sigma[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_poisson() {
        let m = make_material(1.0, 0.0).unwrap();
        assert_eq!(m.c, Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.5)));
    }

    #[test]
    fn formula_value() {
        let m = make_material(1.0, 0.3).unwrap();
        assert_relative_eq!(m.c[(0, 0)], 0.7 / (1.3 * 0.4), max_relative = 1e-15);
        assert_relative_eq!(m.mu, 1.0 / 2.6, max_relative = 1e-15);
    }

    #[test]
    fn inverse_and_split() {
        for nu in [0.0, 0.3, 0.4999, 0.4999999] {
            let m = make_material(3.5, nu).unwrap();
            let id = m.c * m.cinv;
            assert!((id - Matrix3::identity()).norm() < 1e-12 * m.c.norm() * m.cinv.norm());
            assert!((m.c_dil + m.c_dev - m.c).norm() <= 1e-12 * m.c.norm());
            for (l, p) in m.eigenvalues.iter().zip(&m.eigenvectors) {
                assert!((m.c * p - *l * p).norm() <= 1e-12 * m.c.norm());
            }
            assert!((m.c_dev * m.eigenvectors[0]).norm() < 1e-12 * m.mu);
        }
    }

    #[test]
    fn volumetric_eigenvalue_near_limit() {
        let nu = 0.4999999;
        let m = make_material(1.0, nu).unwrap();
        let direct = 1.0 / ((1.0 + nu) * (1.0 - 2.0 * nu));
        assert_relative_eq!(m.eigenvalues[0], direct, max_relative = 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_material(1.0, 0.5).is_err());
        assert!(make_material(1.0, -0.1).is_err());
        assert!(make_material(0.0, 0.3).is_err());
    }

    #[test]
    fn hydrostatic_values() {
        let nu = 0.5 - 1e-12;
        assert!((hydrostatic(&Vector3::new(1.0, 1.0, 0.0), nu) - 1.0).abs() < 1e-11);
        assert_eq!(hydrostatic(&Vector3::new(1.0, -1.0, 5.0), 0.3), 0.0);
        let s = 8_333.333_333_333_33 * 0.5;
        let p = hydrostatic(&Vector3::new(s, s, 12.0), 0.4999999);
        assert!((p - 4166.6666).abs() < 1e-3);
    }
}
