use shvem_core::assembly::{assemble, compute_kernels};
use shvem_core::geometry::{gen_perturbed, gen_structured_rect, read_mesh};
use shvem_core::projection::Mat8;
use shvem_core::{make_material, Method, Vec2};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/perturbed_15x10.mesh");

#[test]
fn loads_and_matches_generator() {
    let mesh = read_mesh(FIXTURE).unwrap();
    assert_eq!(mesh.n_elements(), 150);
    assert_eq!(mesh.n_nodes(), 16 * 11);
    assert!((mesh.total_area() - 1.5).abs() < 1e-12);
    let mut tags = mesh.tags();
    tags.sort();
    assert_eq!(tags, vec!["bottom", "left", "right", "top"]);
    let regen = gen_perturbed(&gen_structured_rect(15, 10, 1.5, 1.0).unwrap(), 0.3, 150).unwrap();
    assert_eq!(mesh.nodes(), regen.nodes());
    assert_eq!(mesh.elements(), regen.elements());
}

#[test]
fn fixture_passes_patch_test() {
    let mesh = read_mesh(FIXTURE).unwrap();
    let u = |x: Vec2| Vec2::new(0.1 + 0.3 * x.x - 0.2 * x.y, -0.4 + 0.5 * x.x + 0.1 * x.y);
    let mat = make_material(1.0, 0.3).unwrap();
    for m in Method::ALL {
        let ks: Vec<Mat8> = compute_kernels(&mesh, &mat, m).unwrap().into_iter().map(|k| k.k).collect();
        let mut sys = assemble(&mesh, &ks).unwrap();
        let b: Vec<usize> = mesh.boundary_nodes().into_iter().collect();
        sys.constrain_nodes(&mesh, &b, 0, |x| u(x).x);
        sys.constrain_nodes(&mesh, &b, 1, |x| u(x).y);
        let sol = sys.solve().unwrap();
        for (i, &p) in mesh.nodes().iter().enumerate() {
            assert!((sol.node(i) - u(p)).norm() < 1e-11, "{m} node {i}");
        }
    }
}
