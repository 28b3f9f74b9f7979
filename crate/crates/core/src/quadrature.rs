//! Exact polynomial integration over simple quadrilaterals and Gauss rules
//! for edges and general integrands.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::geometry::{signed_area, ElementGeometry};
use crate::Vec2;

/// Highest total degree stored by [`Poly2`].
pub const MAX_DEGREE: usize = 4;
const N_COEFFS: usize = (MAX_DEGREE + 1) * (MAX_DEGREE + 2) / 2;

fn index(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

fn exponents(i: usize) -> (usize, usize) {
    let mut d = 0;
    while (d + 1) * (d + 2) / 2 <= i {
        d += 1;
    }
    let b = i - d * (d + 1) / 2;
    (d - b, b)
}

/// Bivariate polynomial in the scaled coordinates `(xi, eta)` of an element,
/// total degree at most [`MAX_DEGREE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poly2 {
    coeffs: [f64; N_COEFFS],
}

impl Default for Poly2 {
    fn default() -> Self {
        Self::zero()
    }
}

impl Poly2 {
    pub fn zero() -> Self {
        Self {
            coeffs: [0.0; N_COEFFS],
        }
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.coeffs[0] = c;
        p
    }

    /// `coef * xi^a * eta^b`.
    pub fn monomial(a: usize, b: usize, coef: f64) -> Result<Self> {
        if a + b > MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                degree: a + b,
                max: MAX_DEGREE,
            });
        }
        let mut p = Self::zero();
        p.coeffs[index(a, b)] = coef;
        Ok(p)
    }

    /// Build from `(a, b, coef)` terms; repeated exponents are summed.
    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Result<Self> {
        let mut p = Self::zero();
        for &(a, b, c) in terms {
            p = p + Self::monomial(a, b, c)?;
        }
        Ok(p)
    }

    pub fn coeff(&self, a: usize, b: usize) -> f64 {
        if a + b > MAX_DEGREE {
            0.0
        } else {
            self.coeffs[index(a, b)]
        }
    }

    /// Total degree of the highest nonzero term (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        (0..N_COEFFS)
            .rev()
            .find(|&i| self.coeffs[i] != 0.0)
            .map(|i| {
                let (a, b) = exponents(i);
                a + b
            })
            .unwrap_or(0)
    }

    pub fn eval(&self, xi: f64, eta: f64) -> f64 {
        let mut xp = [1.0; MAX_DEGREE + 1];
        let mut yp = [1.0; MAX_DEGREE + 1];
        for k in 1..=MAX_DEGREE {
            xp[k] = xp[k - 1] * xi;
            yp[k] = yp[k - 1] * eta;
        }
        (0..N_COEFFS)
            .map(|i| {
                let (a, b) = exponents(i);
                self.coeffs[i] * xp[a] * yp[b]
            })
            .sum()
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
        self
    }

    /// Product; fails if the result would exceed [`MAX_DEGREE`].
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let degree = self.degree() + other.degree();
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                degree,
                max: MAX_DEGREE,
            });
        }
        let mut out = Self::zero();
        for i in 0..N_COEFFS {
            if self.coeffs[i] == 0.0 {
                continue;
            }
            let (a1, b1) = exponents(i);
            for j in 0..N_COEFFS {
                if other.coeffs[j] == 0.0 {
                    continue;
                }
                let (a2, b2) = exponents(j);
                out.coeffs[index(a1 + a2, b1 + b2)] += self.coeffs[i] * other.coeffs[j];
            }
        }
        Ok(out)
    }
}

impl Add for Poly2 {
    type Output = Poly2;
    fn add(mut self, rhs: Poly2) -> Poly2 {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl Sub for Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: Poly2) -> Poly2 {
        self + rhs.scale(-1.0)
    }
}

impl Mul<f64> for Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: f64) -> Poly2 {
        self.scale(rhs)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.into_iter()
        .zip(w)
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect()
}

/// Two-point rule on `[0, 1]`.
pub const GAUSS2_UNIT: [(f64, f64); 2] = [
    (0.211_324_865_405_187_1, 0.5),
    (0.788_675_134_594_812_9, 0.5),
];

/// `∫_a^b f ds` with an `order`-point Gauss rule; `f` receives the edge
/// parameter `t ∈ [0, 1]` and the point.
pub fn integrate_edge(a: Vec2, b: Vec2, f: impl Fn(f64, Vec2) -> f64, order: usize) -> f64 {
    let len = (b - a).norm();
    gauss_legendre_unit(order)
        .into_iter()
        .map(|(t, w)| w * f(t, a + t * (b - a)))
        .sum::<f64>()
        * len
}

/// Area moments `∫_E xi^a eta^b dx` for `a + b <= MAX_DEGREE`, computed by
/// Green's theorem from the edges. Exact for any simple polygon.
#[derive(Debug, Clone, Copy)]
pub struct PolyMoments {
    m: [f64; N_COEFFS],
}

impl PolyMoments {
    pub fn new(e: &ElementGeometry) -> Self {
        // ∫∫ xi^a eta^b dxi deta = ∮ xi^(a+1)/(a+1) eta^b deta; the edge
        // integrand has degree <= MAX_DEGREE + 1 in the edge parameter.
        let rule = gauss_legendre_unit(MAX_DEGREE / 2 + 2);
        let h2 = e.diameter * e.diameter;
        let mut m = [0.0; N_COEFFS];
        for k in 0..4 {
            let p = e.scaled(e.vertices[k]);
            let q = e.scaled(e.vertices[(k + 1) % 4]);
            let deta = q.y - p.y;
            if deta == 0.0 {
                continue;
            }
            for &(t, w) in &rule {
                let z = p + t * (q - p);
                let mut xp = [1.0; MAX_DEGREE + 2];
                let mut yp = [1.0; MAX_DEGREE + 1];
                for j in 1..=MAX_DEGREE + 1 {
                    xp[j] = xp[j - 1] * z.x;
                }
                for j in 1..=MAX_DEGREE {
                    yp[j] = yp[j - 1] * z.y;
                }
                for (i, mi) in m.iter_mut().enumerate() {
                    let (a, b) = exponents(i);
                    *mi += w * deta * xp[a + 1] * yp[b] / (a + 1) as f64;
                }
            }
        }
        m.iter_mut().for_each(|v| *v *= h2);
        // The zeroth and first moments are known exactly.
        m[0] = e.area;
        m[1] = 0.0;
        m[2] = 0.0;
        Self { m }
    }

    /// `∫_E xi^a eta^b dx`.
    pub fn moment(&self, a: usize, b: usize) -> f64 {
        self.m[index(a, b)]
    }

    pub fn integrate(&self, p: &Poly2) -> f64 {
        p.coeffs.iter().zip(&self.m).map(|(c, m)| c * m).sum()
    }
}

/// Exact `∫_E p dx` for a polynomial in the scaled coordinates of `e`.
pub fn integrate_poly(e: &ElementGeometry, p: &Poly2) -> f64 {
    PolyMoments::new(e).integrate(p)
}

/// Quadrature points and weights on `e` from a two-triangle fan with a
/// collapsed Gauss rule exact for total degree `max(degree, 8)`. For a
/// nonconvex quad the fan starts at the reflex vertex.
pub fn element_rule(e: &ElementGeometry, degree: usize) -> Result<Vec<(Vec2, f64)>> {
    let reflex = e.reflex_vertices();
    let apex = match reflex.as_slice() {
        [] => 0,
        [k] => *k,
        _ => return Err(Error::NoFanVertex),
    };
    let v = |k: usize| e.vertices[(apex + k) % 4];
    let tris = [[v(0), v(1), v(2)], [v(0), v(2), v(3)]];
    let n = ((degree.max(8) + 2).div_ceil(2)).max(5);
    let rule = gauss_legendre_unit(n);
    let mut out = Vec::with_capacity(2 * n * n);
    for t in tris {
        let area = signed_area(&[t[0], t[1], t[2], t[2]]);
        if !(area > 0.0) {
            return Err(Error::NoFanVertex);
        }
        for &(u, wu) in &rule {
            for &(s, ws) in &rule {
                let p = t[0] + u * ((1.0 - s) * (t[1] - t[0]) + s * (t[2] - t[0]));
                out.push((p, 2.0 * area * u * wu * ws));
            }
        }
    }
    Ok(out)
}

/// `∫_E f dx` for a pointwise field.
pub fn integrate_general(
    e: &ElementGeometry,
    f: impl Fn(Vec2) -> f64,
    degree_hint: usize,
) -> Result<f64> {
    Ok(element_rule(e, degree_hint)?
        .into_iter()
        .map(|(p, w)| w * f(p))
        .sum())
}
