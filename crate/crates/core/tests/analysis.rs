use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use minlab::analysis::{
    decay_certificate, decay_curve, growth_exponent, holder_estimate, liouville_threshold, mean_value_ratio,
    oscillation, GrowthModel, RatioStatus,
};
use minlab::harmonic::{level_set, solve_dirichlet, ScalarField};
use minlab::mesh::{area_growth_fit, dyadic_radii};
use minlab::rng::SplitMix64;
use minlab::surfaces::param_radius_for_ball;
use minlab::{triangulate, BallComponent, ImmersionSpec, SurfaceMesh};
use proptest::prelude::*;

fn covering(spec: &ImmersionSpec, radius: f64, h: f64) -> SurfaceMesh {
    triangulate(spec, param_radius_for_ball(spec, radius).unwrap(), h).unwrap()
}

fn origin(mesh: &SurfaceMesh) -> usize {
    mesh.vertex_at_param(0.0, 0.0)
}

fn enneper_16() -> &'static SurfaceMesh {
    static M: OnceLock<SurfaceMesh> = OnceLock::new();
    M.get_or_init(|| covering(&ImmersionSpec::enneper(1).unwrap(), 16.0, 0.2))
}

fn random_harmonic(mesh: &SurfaceMesh, comp: &BallComponent, seed: u64) -> ScalarField {
    let mut rng = SplitMix64::new(seed);
    let c: Vec<f64> = (0..5).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let data = ScalarField::from_fn(mesh, |v| {
        let p = mesh.position(v) / 16.0;
        let t = mesh.params()[v][1].atan2(mesh.params()[v][0]);
        c[0] * p.x + c[1] * p.y + c[2] * p.z + c[3] * (2.0 * t).cos() + c[4] * (5.0 * t).sin()
    });
    solve_dirichlet(mesh, comp, &data).unwrap().0
}

#[test]
fn plane_x1_decay_curve() {
    let mesh = covering(&ImmersionSpec::plane(), 32.0, 0.08);
    let bound = liouville_threshold(PI).unwrap();
    let curve = decay_curve(&mesh, &ScalarField::coordinate(&mesh, 0), origin(&mesh), &dyadic_radii(1.0, 6), &bound).unwrap();
    for d in &curve.ratios {
        let q = d.ratio.unwrap();
        assert!((q - 0.5).abs() <= 0.02, "r={}: {q}", d.radius);
        assert!(q <= bound.gamma);
        assert_eq!(d.status, RatioStatus::Pass);
    }
    assert!(curve.dyadic && curve.is_monotone());
}

#[test]
fn enneper_certificate_at_radius_4() {
    let mesh = covering(&ImmersionSpec::enneper(1).unwrap(), 8.0, 0.1);
    let root = origin(&mesh);
    let c_a = area_growth_fit(&mesh, root, &[2.0, 4.0, 8.0]).unwrap().c_a;
    let (lo, _) = ScalarField::coordinate(&mesh, 2).range_on(&BallComponent::new(&mesh, root, 8.0).unwrap());
    let x3 = ScalarField::coordinate(&mesh, 2).affine(1.0, 1.0 - lo);
    let cert = decay_certificate(&mesh, &x3, root, 4.0, c_a).unwrap();
    assert!(cert.passed(), "{cert:?}");
    assert_eq!(cert.recheck(), [cert.energy_pass, cert.m_pass, cert.level_pass, cert.ratio_pass]);
    assert_eq!(cert.levels.len(), 32);
    assert!(cert.levels.iter().all(|l| l.level > 0.0 && l.level < cert.m));
}

#[test]
fn enneper_holder_exponent() {
    // two-sided oscillation of x3 on the balls of radius 4..32 (dense polar
    // sampling of the closed form): 7.893, 14.217, 24.139, 39.737, slope 0.776
    let spec = ImmersionSpec::enneper(1).unwrap();
    let mesh = covering(&spec, 128.0, 0.5);
    let x3 = ScalarField::coordinate(&mesh, 2);
    let fit = holder_estimate(&mesh, &x3, 64.0, &[4.0, 8.0, 16.0, 32.0], 8192, 7).unwrap();
    let alpha = fit.alpha.unwrap();
    assert!((alpha - 0.776).abs() <= 0.03, "{fit:?}");
    let c_a = area_growth_fit(&mesh, origin(&mesh), &[16.0, 32.0, 64.0, 128.0]).unwrap().c_a;
    assert!(alpha >= liouville_threshold(c_a).unwrap().alpha_threshold);
    assert!(fit.c.unwrap() > 0.0 && fit.l1_norm > 0.0);
}

#[test]
fn enneper_mean_value_ratio_is_stable() {
    let spec = ImmersionSpec::enneper(1).unwrap();
    let ratios: Vec<f64> = [0.05, 0.025]
        .iter()
        .map(|&h| {
            let mesh = covering(&spec, 4.0, h);
            mean_value_ratio(&mesh, &ScalarField::coordinate(&mesh, 2), origin(&mesh), 2.0).unwrap()
        })
        .collect();
    assert!((ratios[1] / ratios[0] - 1.0).abs() <= 0.05, "{ratios:?}");
}

#[test]
fn catenoid_height_grows_logarithmically() {
    let mesh = covering(&ImmersionSpec::catenoid(), 32.0, 0.25);
    let fit = growth_exponent(&mesh, &ScalarField::coordinate(&mesh, 2), origin(&mesh), &dyadic_radii(2.0, 5)).unwrap();
    assert_eq!(fit.preferred, GrowthModel::Log);
    assert!(fit.log_residual < fit.power_residual);
    assert_eq!(mesh.euler_characteristic(), 0);
}

#[test]
fn helicoid_parameter_grows_logarithmically() {
    let mesh = covering(&ImmersionSpec::helicoid(), 16.0, 0.25);
    let fit = growth_exponent(&mesh, &ScalarField::parameter(&mesh, 0), origin(&mesh), &dyadic_radii(2.0, 4)).unwrap();
    assert_eq!(fit.preferred, GrowthModel::Log, "{fit:?}");
}

#[test]
fn harmonic_fields_satisfy_the_ratio_bound() {
    let mesh = enneper_16();
    let root = origin(mesh);
    let domain = BallComponent::new(mesh, root, 16.0).unwrap();
    let c_a = area_growth_fit(mesh, root, &[4.0, 8.0, 16.0]).unwrap().c_a;
    let bound = liouville_threshold(c_a).unwrap();
    for seed in 0..8 {
        let u = random_harmonic(mesh, &domain, seed);
        let curve = decay_curve(mesh, &u, root, &[2.0, 4.0, 8.0, 16.0], &bound).unwrap();
        assert_eq!(curve.failures(), 0);
        let cert = decay_certificate(mesh, &u, root, 4.0, c_a).unwrap();
        assert!(cert.energy <= cert.energy_bound && cert.m <= cert.m_bound, "{cert:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn affine_invariance(seed in any::<u64>(), a in 0.01f64..100.0, b in -50.0f64..50.0) {
        let mesh = enneper_16();
        let root = origin(mesh);
        let domain = BallComponent::new(mesh, root, 16.0).unwrap();
        let u = random_harmonic(mesh, &domain, seed);
        let w = u.affine(a, b);
        let bound = liouville_threshold(10.0).unwrap();
        let radii = [2.0, 4.0, 8.0, 16.0];
        let cu = decay_curve(mesh, &u, root, &radii, &bound).unwrap();
        let cw = decay_curve(mesh, &w, root, &radii, &bound).unwrap();
        let close = |x: f64, y: f64, tol: f64| (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300);
        // the affine map is applied per vertex, so oscillations agree only up
        // to the rounding of the shifted values
        let tol = 1e-12 * (1.0 + b.abs() / a);
        for i in 0..radii.len() {
            prop_assert!(close(cw.osc0[i], a * cu.osc0[i], tol));
            prop_assert!(close(cw.osc2[i], a * cu.osc2[i], tol));
        }
        for (x, y) in cu.ratios.iter().zip(&cw.ratios) {
            prop_assert!(close(x.ratio.unwrap(), y.ratio.unwrap(), 4.0 * tol));
        }
        let gu = growth_exponent(mesh, &u, root, &radii).unwrap();
        let gw = growth_exponent(mesh, &w, root, &radii).unwrap();
        prop_assert!((gu.alpha - gw.alpha).abs() <= 1e-9 * (1.0 + b.abs() / a));
        let inner = BallComponent::new(mesh, root, 8.0).unwrap();
        prop_assert!(close(oscillation(&w, &inner, false), a * oscillation(&u, &inner, false), tol));
        let (lo, hi) = u.range_on(&inner);
        let s = 0.5 * (lo + hi);
        let lu = level_set(mesh, &u, s, &domain);
        let lw = level_set(mesh, &w, a * s + b, &domain);
        let flags = |l: &minlab::harmonic::LevelSet| l.components.iter().map(|c| c.touches_boundary).collect::<Vec<_>>();
        prop_assert_eq!(flags(&lu), flags(&lw));
    }

    #[test]
    fn oscillations_are_monotone(seed in any::<u64>(), theta in 0.0f64..6.3, rad in 0.0f64..1.0) {
        let mesh = enneper_16();
        let domain = BallComponent::new(mesh, origin(mesh), 16.0).unwrap();
        let u = random_harmonic(mesh, &domain, seed);
        let root = mesh.vertex_at_param(rad * theta.cos(), rad * theta.sin());
        let curve = decay_curve(mesh, &u, root, &[1.0, 2.0, 3.0, 5.0, 8.0], &liouville_threshold(10.0).unwrap()).unwrap();
        prop_assert!(curve.is_monotone());
        for i in 0..curve.radii.len() {
            prop_assert!(curve.osc2[i] >= curve.osc0[i] && curve.osc0[i] >= 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn threshold_is_decreasing(c in 1e-4f64..25.0, f in 1.0001f64..3.0) {
        let a = liouville_threshold(c).unwrap();
        let b = liouville_threshold(c * f).unwrap();
        prop_assert!(b.ln_alpha_threshold < a.ln_alpha_threshold);
        prop_assert!(a.gamma > 0.0 && a.gamma <= 1.0 && a.alpha_threshold > 0.0);
        prop_assert!(a.ln_growth_factor(a.alpha_threshold * (1.0 - 1e-9)) < 0.0);
        prop_assert!(a.ln_growth_factor(a.alpha_threshold * (1.0 + 1e-9)) > 0.0);
    }
}

#[test]
fn threshold_anchor() {
    let b = liouville_threshold(LN_2 / 24.0).unwrap();
    assert!((b.alpha_threshold - 1.0).abs() <= 1e-15);
    assert!((b.gamma - 0.5).abs() <= 1e-15);
}
