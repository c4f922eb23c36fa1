use std::f64::consts::PI;
use std::sync::OnceLock;

use minlab::mesh::io::{read_mesh, write_mesh};
use minlab::mesh::{area_growth_fit, convex_hull_check, surface_area};
use minlab::surfaces::param_radius_for_ball;
use minlab::{fit, triangulate, BallComponent, ImmersionSpec, SurfaceMesh};
use proptest::prelude::*;

fn covering(spec: &ImmersionSpec, radius: f64, h: f64) -> SurfaceMesh {
    triangulate(spec, param_radius_for_ball(spec, radius).unwrap(), h).unwrap()
}

fn enneper_16() -> &'static SurfaceMesh {
    static MESH: OnceLock<SurfaceMesh> = OnceLock::new();
    MESH.get_or_init(|| covering(&ImmersionSpec::enneper(1).unwrap(), 16.0, 0.2))
}

#[test]
fn plane_triangle_count_estimate() {
    let mesh = triangulate(&ImmersionSpec::plane(), 1.0, 0.1).unwrap();
    let estimate = PI / (0.01 * 0.433);
    let t = mesh.triangle_count() as f64;
    assert!(t > estimate / 2.0 && t < estimate * 2.0, "{t} vs {estimate}");
    assert_eq!(mesh.euler_characteristic(), 1);
}

#[test]
fn enneper_mesh_is_conformal() {
    let mesh = triangulate(&ImmersionSpec::enneper(1).unwrap(), 3.0, 0.05).unwrap();
    let (conformal, minimal) = mesh.max_defects();
    assert!(conformal <= 1e-10 && minimal <= 1e-10, "{conformal} {minimal}");
}

#[test]
fn catenoid_mesh_is_periodic_annulus() {
    let mesh = triangulate(&ImmersionSpec::catenoid(), 2.0, 0.05).unwrap();
    assert!(mesh.periodic_v());
    assert_eq!(mesh.euler_characteristic(), 0);
}

#[test]
fn edge_lengths_are_graded() {
    for spec in [ImmersionSpec::enneper(2).unwrap(), ImmersionSpec::helicoid(), ImmersionSpec::catenoid()] {
        let h = 0.1;
        let mesh = covering(&spec, 6.0, h);
        let stats = mesh.edge_length_stats();
        assert!(stats.min >= h / 4.0 && stats.max <= 4.0 * h, "{spec:?}: {stats:?}");
    }
}

#[test]
fn enneper_area_ratio_at_50_matches_quadrature() {
    // dense polar quadrature of lambda over the component of {|F| < 50}: 2.838
    let mesh = covering(&ImmersionSpec::enneper(1).unwrap(), 50.0, 0.2);
    let comp = BallComponent::new(&mesh, mesh.vertex_at_param(0.0, 0.0), 50.0).unwrap();
    let ratio = surface_area(&mesh, comp.triangles()) / (PI * 2500.0);
    assert!((ratio / 2.838 - 1.0).abs() <= 0.01, "{ratio}");
}

#[test]
fn enneper_area_growth_matches_quadrature() {
    // quadrature oracle: k=1 max ratio 2.899 at r=100, log-log slope 2.058 over
    // 10..100; k=3 max ratio 6.932, slope 2.030
    let radii = [10.0, 20.0, 40.0, 80.0, 100.0];
    for (k, c_over_pi, slope) in [(1, 2.899, 2.058), (3, 6.932, 2.030)] {
        let mesh = covering(&ImmersionSpec::enneper(k).unwrap(), 100.0, 0.5);
        let fit = area_growth_fit(&mesh, mesh.vertex_at_param(0.0, 0.0), &radii).unwrap();
        assert!((fit.c_a / PI / c_over_pi - 1.0).abs() <= 0.015, "k={k}: {}", fit.c_a / PI);
        assert!((fit.exponent - slope).abs() <= 0.02, "k={k}: {}", fit.exponent);
        assert!((fit.exponent - 2.0).abs() <= 0.1);
    }
}

#[test]
fn helicoid_area_is_cubic() {
    let spec = ImmersionSpec::helicoid();
    let radii = [4.0, 8.0, 16.0];
    let areas: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let mesh = covering(&spec, r, r / 40.0);
            let comp = BallComponent::new(&mesh, mesh.vertex_at_param(0.0, 0.0), r).unwrap();
            surface_area(&mesh, comp.triangles())
        })
        .collect();
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = areas.iter().map(|a| a.ln()).collect();
    let slope = fit::fit_line(&xs, &ys).unwrap().slope;
    // continuum slope over these radii is 2.88
    assert!((slope - 3.0).abs() <= 0.15, "{slope}");
}

#[test]
fn whole_patch_area_converges_at_second_order() {
    // exact area of |z| <= 2 on Enneper k=1: 2 pi ((1 + rho^2)^3 - 1) / 6
    let rho: f64 = 2.0;
    let exact = 2.0 * PI * ((1.0 + rho * rho).powi(3) - 1.0) / 6.0;
    let spec = ImmersionSpec::enneper(1).unwrap();
    let hs = [0.2, 0.1, 0.05];
    let errs: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let mesh = triangulate(&spec, rho, h).unwrap();
            let all: Vec<usize> = (0..mesh.triangle_count()).collect();
            (surface_area(&mesh, &all) - exact).abs()
        })
        .collect();
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let order = fit::fit_line(&xs, &ys).unwrap().slope;
    assert!(order >= 1.8, "{errs:?} order {order}");
}

#[test]
fn convex_hull_examples() {
    let plane = triangulate(&ImmersionSpec::plane(), 2.0, 0.1).unwrap();
    let comp = BallComponent::new(&plane, plane.vertex_at_param(0.0, 0.0), 1.0).unwrap();
    assert_eq!(convex_hull_check(&plane, &comp).unwrap(), 0.0);
    for (spec, r) in [(ImmersionSpec::enneper(1).unwrap(), 2.0), (ImmersionSpec::helicoid(), 3.0)] {
        let h = 0.05;
        let mesh = covering(&spec, r, h);
        let comp = BallComponent::new(&mesh, mesh.vertex_at_param(0.0, 0.0), r).unwrap();
        let violation = convex_hull_check(&mesh, &comp).unwrap();
        assert!(violation <= 2.0 * h, "{spec:?}: {violation}");
    }
}

#[test]
fn ball_components_on_disk_families_are_disks() {
    for spec in [ImmersionSpec::enneper(2).unwrap(), ImmersionSpec::helicoid()] {
        let mesh = covering(&spec, 8.0, 0.2);
        let comp = BallComponent::new(&mesh, mesh.vertex_at_param(0.0, 0.0), 8.0).unwrap();
        assert_eq!(comp.euler_characteristic(&mesh), 1);
        let centre = mesh.position(comp.root());
        for &t in comp.triangles() {
            assert!(mesh.triangles()[t].iter().all(|&v| (mesh.position(v) - centre).norm() < 8.0));
        }
    }
}

#[test]
fn file_round_trip_for_every_family() {
    for spec in [
        ImmersionSpec::plane(),
        ImmersionSpec::enneper(3).unwrap(),
        ImmersionSpec::helicoid(),
        ImmersionSpec::catenoid(),
    ] {
        let mesh = triangulate(&spec, 1.5, 0.25).unwrap();
        let mut bytes = Vec::new();
        write_mesh(&mesh, &mut bytes).unwrap();
        let back = read_mesh(bytes.as_slice()).unwrap();
        assert_eq!(back.positions(), mesh.positions());
        assert_eq!(back.triangles(), mesh.triangles());
        assert_eq!(back.euler_characteristic(), mesh.euler_characteristic());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn components_are_nested(r in 0.5f64..15.0, grow in 1.0f64..8.0, theta in 0.0f64..std::f64::consts::TAU) {
        let mesh = enneper_16();
        let root = mesh.vertex_at_param(0.8 * theta.cos(), 0.8 * theta.sin());
        let s = (r + grow).min(15.9);
        prop_assume!(s > r);
        let Ok(small) = BallComponent::new(mesh, root, r) else { return Ok(()) };
        let large = BallComponent::new(mesh, root, s).unwrap();
        prop_assert!(small.triangles().iter().all(|&t| large.contains_triangle(t)));
        prop_assert!(small.area(mesh) <= large.area(mesh));
    }

    #[test]
    fn triangulation_is_deterministic(rho in 0.5f64..2.0, h in 0.1f64..0.4, k in 1u32..4) {
        let spec = ImmersionSpec::enneper(k).unwrap();
        let a = triangulate(&spec, rho, h).unwrap();
        let b = triangulate(&spec, rho, h).unwrap();
        prop_assert_eq!(a, b);
    }
}
