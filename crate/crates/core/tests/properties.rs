use nalgebra::{Matrix2, SMatrix, SymmetricEigen};
use proptest::prelude::*;

use shvem_core::assembly::{assemble, compute_kernels, ElementKernel};
use shvem_core::geometry::{gen_perturbed, gen_structured_rect, rotate};
use shvem_core::projection::Mat8;
use shvem_core::quadrature::{integrate_general, integrate_poly, Poly2};
use shvem_core::{make_material, ElementGeometry, Method, QuadMesh, Vec2};

fn quad_strategy() -> impl Strategy<Value = ElementGeometry> {
    prop::array::uniform8(-0.3f64..0.3).prop_filter_map("invalid quad", |d| {
        let base = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let v = std::array::from_fn(|k| Vec2::new(base[k].0 + d[2 * k], base[k].1 + d[2 * k + 1]));
        ElementGeometry::new(v).ok()
    })
}

fn kernel(e: &ElementGeometry, nu: f64, method: Method) -> Mat8 {
    let mat = make_material(1.0, nu).unwrap();
    ElementKernel::new(e.clone(), &mat, method).unwrap().k
}

fn rel(a: &Mat8, b: &Mat8) -> f64 {
    (a - b).norm() / a.norm()
}

/// Linear displacement field with constant strain.
fn linear(c: [f64; 6]) -> impl Fn(Vec2) -> Vec2 {
    move |x| Vec2::new(c[0] + c[1] * x.x + c[2] * x.y, c[3] + c[4] * x.x + c[5] * x.y)
}

/// Dirichlet data from `u` on the whole boundary, no loads.
fn solve_patch(mesh: &QuadMesh, nu: f64, method: Method, u: &impl Fn(Vec2) -> Vec2) -> Vec<f64> {
    let mat = make_material(1.0, nu).unwrap();
    let ks: Vec<Mat8> = compute_kernels(mesh, &mat, method).unwrap().into_iter().map(|k| k.k).collect();
    let mut sys = assemble(mesh, &ks).unwrap();
    let bnodes: Vec<usize> = mesh.boundary_nodes().into_iter().collect();
    sys.constrain_nodes(mesh, &bnodes, 0, |x| u(x).x);
    sys.constrain_nodes(mesh, &bnodes, 1, |x| u(x).y);
    sys.solve().unwrap().u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rotation_covariance(e in quad_strategy(), angle in -3.1f64..3.1, nu in 0.0f64..0.4999) {
        let rotated = ElementGeometry::new(e.vertices.map(|v| rotate(v, angle))).unwrap();
        let r = Matrix2::new(angle.cos(), -angle.sin(), angle.sin(), angle.cos());
        let mut q = Mat8::zeros();
        for k in 0..4 {
            q.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&r);
        }
        let k0 = kernel(&e, nu, Method::ShVem);
        let k1 = kernel(&rotated, nu, Method::ShVem);
        prop_assert!(rel(&k1, &(q * k0 * q.transpose())) < 1e-9);
    }

    #[test]
    fn translation_invariance(e in quad_strategy(), dx in -50.0f64..50.0, dy in -50.0f64..50.0) {
        let moved = ElementGeometry::new(e.vertices.map(|v| v + Vec2::new(dx, dy))).unwrap();
        for m in Method::ALL {
            prop_assert!(rel(&kernel(&e, 0.3, m), &kernel(&moved, 0.3, m)) < 1e-8);
        }
    }

    #[test]
    fn three_zero_eigenvalues(e in quad_strategy(), nu in prop::sample::select(vec![0.0, 0.25, 0.49, 0.4999999])) {
        for m in Method::ALL {
            let k = kernel(&e, nu, m);
            let ev = SymmetricEigen::new(k).eigenvalues;
            let max = ev.max();
            prop_assert_eq!(ev.iter().filter(|&&l| l.abs() < 1e-10 * max).count(), 3);
            prop_assert!(ev.min() > -1e-10 * max);
        }
    }

    #[test]
    fn element_reproduces_linear_fields(e in quad_strategy(), c in prop::array::uniform6(-1.0f64..1.0)) {
        // A linear field is a constant-stress state: the element forces are
        // the boundary tractions of that stress, which sum to zero and carry
        // no moment.
        let u = linear(c);
        let d = SMatrix::<f64, 8, 1>::from_fn(|i, _| {
            let p = u(e.vertices[i / 2]);
            if i % 2 == 0 { p.x } else { p.y }
        });
        for m in Method::ALL {
            let f = kernel(&e, 0.3, m) * d;
            let scale = kernel(&e, 0.3, m).norm() * d.norm().max(1e-12);
            let (mut fx, mut fy, mut moment) = (0.0, 0.0, 0.0);
            for k in 0..4 {
                let x = e.vertices[k];
                fx += f[2 * k];
                fy += f[2 * k + 1];
                moment += x.x * f[2 * k + 1] - x.y * f[2 * k];
            }
            prop_assert!(fx.abs() < 1e-10 * scale && fy.abs() < 1e-10 * scale && moment.abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn patch_test(seed in 0u64..10_000, mag in 0.0f64..0.35, c in prop::array::uniform6(-1.0f64..1.0)) {
        let mesh = gen_perturbed(&gen_structured_rect(4, 4, 1.0, 1.0).unwrap(), mag, seed).unwrap();
        let u = linear(c);
        for m in Method::ALL {
            let uh = solve_patch(&mesh, 0.3, m, &u);
            for (i, &p) in mesh.nodes().iter().enumerate() {
                let ex = u(p);
                prop_assert!((uh[2 * i] - ex.x).abs() < 1e-10 && (uh[2 * i + 1] - ex.y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn renumbering_invariance(seed in 0u64..10_000, shuffle in 0u64..10_000) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mesh = gen_perturbed(&gen_structured_rect(4, 3, 2.0, 1.0).unwrap(), 0.25, seed).unwrap();
        let mut perm: Vec<usize> = (0..mesh.n_nodes()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle));
        let renumbered = mesh.renumber_nodes(&perm).unwrap();
        // Quadratic data so the interior solution is nontrivial.
        let u = |x: Vec2| Vec2::new(x.x * x.y, x.x * x.x - x.y);
        for m in Method::ALL {
            let a = solve_patch(&mesh, 0.3, m, &u);
            let b = solve_patch(&renumbered, 0.3, m, &u);
            for (old, &new) in perm.iter().enumerate() {
                prop_assert!((a[2 * old] - b[2 * new]).abs() < 1e-11);
                prop_assert!((a[2 * old + 1] - b[2 * new + 1]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn quadrature_agreement(e in quad_strategy(), a in 0usize..=4, b in 0usize..=4, coef in -2.0f64..2.0) {
        prop_assume!(a + b <= 4);
        let exact = integrate_poly(&e, &Poly2::monomial(a, b, coef).unwrap());
        let q = integrate_general(&e, |x| {
            let z = e.scaled(x);
            coef * z.x.powi(a as i32) * z.y.powi(b as i32)
        }, a + b).unwrap();
        prop_assert!((exact - q).abs() < 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn reaction_equilibrium(seed in 0u64..10_000, tx in -1.0f64..1.0, ty in -1.0f64..1.0) {
        let mesh = gen_perturbed(&gen_structured_rect(6, 3, 3.0, 1.0).unwrap(), 0.2, seed).unwrap();
        let mat = make_material(1.0, 0.45).unwrap();
        for m in Method::ALL {
            let ks: Vec<Mat8> = compute_kernels(&mesh, &mat, m).unwrap().into_iter().map(|k| k.k).collect();
            let mut sys = assemble(&mesh, &ks).unwrap();
            sys.add_traction(&mesh, "right", |_| Vec2::new(tx, ty));
            sys.add_body_force(&mesh, |x| Vec2::new(0.0, -x.x)).unwrap();
            let load = sys.f.chunks(2).fold(Vec2::zeros(), |s, p| s + Vec2::new(p[0], p[1]));
            let left = mesh.nodes_with_tag("left");
            sys.constrain_nodes(&mesh, &left, 0, |_| 0.0);
            sys.constrain_nodes(&mesh, &left, 1, |_| 0.0);
            let sol = sys.solve().unwrap();
            let r = sol.reaction_resultant();
            prop_assert!((r + load).norm() < 1e-9 * (1.0 + load.norm()), "{r} vs {load}");
        }
    }
}
