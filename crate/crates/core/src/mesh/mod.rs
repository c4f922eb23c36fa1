//! Triangulated parameter-domain patches and extrinsic ball components.

mod component;
mod hull;
pub mod io;
mod layout;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::surfaces::{evaluate, ImmersionSpec, Vec3};

pub use component::BallComponent;
pub use hull::convex_hull_check;

pub const DEFAULT_VERTEX_CAP: usize = 4_000_000;

/// Sentinel in [`SurfaceMesh::neighbors`] for an edge on the patch boundary.
pub const NO_NEIGHBOR: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    spec: ImmersionSpec,
    target_h: f64,
    periodic_v: bool,
    params: Vec<[f64; 2]>,
    positions: Vec<Vec3>,
    lambdas: Vec<f64>,
    triangles: Vec<[usize; 3]>,
    /// `neighbors[t][e]` is the triangle across edge `(tri[e], tri[e+1])`.
    neighbors: Vec<[usize; 3]>,
}

pub fn triangulate(spec: &ImmersionSpec, rho: f64, target_h: f64) -> Result<SurfaceMesh> {
    triangulate_with_cap(spec, rho, target_h, DEFAULT_VERTEX_CAP)
}

/// Structured triangulation of the parameter patch of radius `rho`: the disk
/// `|z| <= rho` for disk families (clipped to `|sinh u| <= rho` for the
/// helicoid) and the cylinder `|u| <= rho` for the catenoid.
pub fn triangulate_with_cap(
    spec: &ImmersionSpec,
    rho: f64,
    target_h: f64,
    max_vertices: usize,
) -> Result<SurfaceMesh> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Argument(format!("parameter radius must be positive, got {rho}")));
    }
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(Error::Argument(format!("target_h must be positive, got {target_h}")));
    }
    let layout = layout::build(spec, rho, target_h, max_vertices)?;
    let mut positions = Vec::with_capacity(layout.params.len());
    let mut lambdas = Vec::with_capacity(layout.params.len());
    for p in &layout.params {
        let jet = evaluate(spec, (p[0], p[1]))?;
        positions.push(jet.position);
        lambdas.push(jet.lambda);
    }
    SurfaceMesh::from_parts(
        *spec,
        target_h,
        layout.periodic_v,
        layout.params,
        positions,
        lambdas,
        layout.triangles,
    )
}

impl SurfaceMesh {
    /// Assembles a mesh from raw arrays and builds the edge adjacency.
    pub fn from_parts(
        spec: ImmersionSpec,
        target_h: f64,
        periodic_v: bool,
        params: Vec<[f64; 2]>,
        positions: Vec<Vec3>,
        lambdas: Vec<f64>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self> {
        let n = params.len();
        if positions.len() != n || lambdas.len() != n {
            return Err(Error::Argument("vertex arrays have different lengths".into()));
        }
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&i| i >= n)) {
            return Err(Error::Argument(format!("triangle {t:?} references a missing vertex")));
        }
        let neighbors = build_neighbors(&triangles)?;
        Ok(Self { spec, target_h, periodic_v, params, positions, lambdas, triangles, neighbors })
    }

    pub fn spec(&self) -> &ImmersionSpec {
        &self.spec
    }

    pub fn target_h(&self) -> f64 {
        self.target_h
    }

    pub fn periodic_v(&self) -> bool {
        self.periodic_v
    }

    pub fn vertex_count(&self) -> usize {
        self.params.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn params(&self) -> &[[f64; 2]] {
        &self.params
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn neighbors(&self) -> &[[usize; 3]] {
        &self.neighbors
    }

    pub fn position(&self, v: usize) -> Vec3 {
        self.positions[v]
    }

    /// Parameter corners of triangle `t`, with `v` unwrapped across the seam.
    pub fn param_triangle(&self, t: usize) -> [[f64; 2]; 3] {
        layout::unwrap_params(&self.params, self.triangles[t], self.periodic_v)
    }

    /// Signed parameter-plane area (positive for counter-clockwise).
    pub fn param_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.param_triangle(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    }

    pub fn ambient_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|i| self.positions[i]);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    /// Vertex whose parameter coordinates are closest to `(u, v)`.
    pub fn vertex_at_param(&self, u: f64, v: f64) -> usize {
        let dist = |p: &[f64; 2]| {
            let mut dv = p[1] - v;
            if self.periodic_v {
                dv -= 2.0 * PI * (dv / (2.0 * PI)).round();
            }
            (p[0] - u).powi(2) + dv * dv
        };
        argmin(self.params.iter().map(dist))
    }

    /// Vertex closest to an ambient point.
    pub fn nearest_vertex(&self, point: &Vec3) -> usize {
        argmin(self.positions.iter().map(|p| (p - point).norm_squared()))
    }

    pub fn edge_count(&self) -> usize {
        let boundary: usize = self
            .neighbors
            .iter()
            .map(|n| n.iter().filter(|&&x| x == NO_NEIGHBOR).count())
            .sum();
        (3 * self.triangles.len() + boundary) / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangle_count() as i64
    }

    /// Lumped vertex areas: a third of each incident ambient triangle area.
    pub fn vertex_areas(&self, triangles: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.vertex_count()];
        for &t in triangles {
            let a = self.ambient_area(t) / 3.0;
            for &v in &self.triangles[t] {
                out[v] += a;
            }
        }
        out
    }

    pub fn edge_length_stats(&self) -> EdgeStats {
        let mut stats = EdgeStats { min: f64::INFINITY, max: 0.0, mean: 0.0 };
        let mut count = 0usize;
        for (t, tri) in self.triangles.iter().enumerate() {
            for e in 0..3 {
                let nb = self.neighbors[t][e];
                if nb != NO_NEIGHBOR && nb < t {
                    continue;
                }
                let len = (self.positions[tri[e]] - self.positions[tri[(e + 1) % 3]]).norm();
                stats.min = stats.min.min(len);
                stats.max = stats.max.max(len);
                stats.mean += len;
                count += 1;
            }
        }
        stats.mean /= count.max(1) as f64;
        stats
    }

    /// Largest conformal and minimality defects over all vertices.
    pub fn max_defects(&self) -> (f64, f64) {
        let mut conformal: f64 = 0.0;
        let mut minimal: f64 = 0.0;
        for (p, lambda) in self.params.iter().zip(&self.lambdas) {
            let param = (p[0], p[1]);
            conformal = conformal.max(crate::surfaces::conformal_defect(&self.spec, param).unwrap_or(f64::NAN));
            let m = crate::surfaces::minimality_defect(&self.spec, param).unwrap_or(f64::NAN);
            minimal = minimal.max(m / (1.0 + lambda));
        }
        (conformal, minimal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, d) in values.enumerate() {
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

fn build_neighbors(triangles: &[[usize; 3]]) -> Result<Vec<[usize; 3]>> {
    let mut half: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(3 * triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        for e in 0..3 {
            let (a, b) = (tri[e], tri[(e + 1) % 3]);
            half.push((a.min(b), a.max(b), t, e));
        }
    }
    half.sort_unstable();
    let mut neighbors = vec![[NO_NEIGHBOR; 3]; triangles.len()];
    let mut i = 0;
    while i < half.len() {
        let mut j = i + 1;
        while j < half.len() && half[j].0 == half[i].0 && half[j].1 == half[i].1 {
            j += 1;
        }
        match j - i {
            1 => {}
            2 => {
                let (_, _, t1, e1) = half[i];
                let (_, _, t2, e2) = half[i + 1];
                neighbors[t1][e1] = t2;
                neighbors[t2][e2] = t1;
            }
            _ => {
                return Err(Error::Argument(format!(
                    "edge ({}, {}) is shared by {} triangles",
                    half[i].0,
                    half[i].1,
                    j - i
                )))
            }
        }
        i = j;
    }
    Ok(neighbors)
}

/// Ambient area of a triangle subset (flat-triangle approximation).
pub fn surface_area(mesh: &SurfaceMesh, triangles: &[usize]) -> f64 {
    triangles.iter().map(|&t| mesh.ambient_area(t)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaGrowth {
    pub radii: Vec<f64>,
    pub areas: Vec<f64>,
    /// `max_r area(r) / r^2`.
    pub c_a: f64,
    /// Least-squares slope of `log area` against `log r`.
    pub exponent: f64,
    pub fit: LineFit,
}

pub fn area_growth_fit(mesh: &SurfaceMesh, root: usize, radii: &[f64]) -> Result<AreaGrowth> {
    if radii.len() < 3 {
        return Err(Error::Fit(format!("area growth needs at least 3 radii, got {}", radii.len())));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Argument("radii must be strictly increasing".into()));
    }
    let areas = radii
        .iter()
        .map(|&r| BallComponent::new(mesh, root, r).map(|c| c.area(mesh)))
        .collect::<Result<Vec<_>>>()?;
    let c_a = radii.iter().zip(&areas).map(|(r, a)| a / (r * r)).fold(0.0, f64::max);
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = areas.iter().map(|a| a.ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(AreaGrowth { radii: radii.to_vec(), areas, c_a, exponent: fit.slope, fit })
}

/// Dyadic schedule `base, 2 base, ..., 2^(count-1) base`.
pub fn dyadic_radii(base: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| base * 2f64.powi(i as i32)).collect()
}
