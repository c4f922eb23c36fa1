//! Discrete harmonic functions on ball components.
//!
//! Fields are piecewise linear over the parameter triangulation. Because
//! the charts are conformal, the Dirichlet energy of a field on the surface
//! equals its flat energy in the parameter plane, so the stiffness matrix
//! uses parameter-domain cotangent weights.

mod energy;
pub mod io;
mod level;

use crate::mesh::{BallComponent, SurfaceMesh};
use crate::rng::SplitMix64;

pub use energy::{
    assemble_energy, cotangent_weights, dirichlet_energy, gradient_l1, solve_dirichlet,
    surface_energy, EnergyForm, SolveStats,
};
pub use level::{
    coarea_check, level_set, nodal_length, CoareaCheck, LevelComponent, LevelSegment, LevelSet,
    EXACT_HIT_SHIFT,
};

/// One value per mesh vertex; `NaN` marks vertices outside the field's
/// domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn from_fn(mesh: &SurfaceMesh, f: impl Fn(usize) -> f64) -> Self {
        Self { values: (0..mesh.vertex_count()).map(f).collect() }
    }

    pub fn constant(mesh: &SurfaceMesh, c: f64) -> Self {
        Self { values: vec![c; mesh.vertex_count()] }
    }

    /// Ambient coordinate `x_{axis+1}` (axis 0, 1 or 2).
    pub fn coordinate(mesh: &SurfaceMesh, axis: usize) -> Self {
        Self::from_fn(mesh, |v| mesh.position(v)[axis])
    }

    /// Pulled-back parameter coordinate (`0` for `u`, `1` for `v`).
    pub fn parameter(mesh: &SurfaceMesh, axis: usize) -> Self {
        Self::from_fn(mesh, |v| mesh.params()[v][axis])
    }

    /// Smooth seeded boundary data: a degree-6 trigonometric polynomial in
    /// the parameter angle (coefficients decaying like `1/k`) plus a random
    /// linear function of the position scaled by the patch extent.
    pub fn random_boundary(mesh: &SurfaceMesh, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let coef: Vec<(f64, f64)> =
            (1..=6).map(|k| (rng.uniform(-1.0, 1.0) / k as f64, rng.uniform(-1.0, 1.0) / k as f64)).collect();
        let lin = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
        let scale = mesh.positions().iter().map(|p| p.norm()).fold(0.0, f64::max).max(1.0);
        Self::from_fn(mesh, |v| {
            let [u, w] = mesh.params()[v];
            let t = w.atan2(u);
            let p = mesh.position(v) / scale;
            let trig: f64 = coef
                .iter()
                .enumerate()
                .map(|(k, (a, b))| a * ((k + 1) as f64 * t).cos() + b * ((k + 1) as f64 * t).sin())
                .sum();
            trig + lin[0] * p.x + lin[1] * p.y + lin[2] * p.z
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, v: usize) -> Option<f64> {
        self.values.get(v).copied().filter(|x| !x.is_nan())
    }

    pub(crate) fn at(&self, v: usize) -> f64 {
        self.values[v]
    }

    /// Copy with every vertex outside `component` marked absent.
    pub fn restricted(&self, component: &BallComponent) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(v, &x)| if component.contains_vertex(v) { x } else { f64::NAN })
            .collect();
        Self { values }
    }

    /// `a * u + b`.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        Self { values: self.values.iter().map(|x| a * x + b).collect() }
    }

    /// Pointwise map, preserving absent entries.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|&x| if x.is_nan() { x } else { f(x) }).collect() }
    }

    /// `(min, max)` over the component's vertices.
    pub fn range_on(&self, component: &BallComponent) -> (f64, f64) {
        component
            .vertices()
            .iter()
            .map(|&v| self.values[v])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    }
}
