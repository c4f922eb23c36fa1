use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::harmonic::ScalarField;
use crate::mesh::{BallComponent, SurfaceMesh};
use crate::rng::{radical_inverse, SplitMix64};
use crate::surfaces::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderFit {
    pub r: f64,
    pub centre: usize,
    pub s: Vec<f64>,
    pub max_difference: Vec<f64>,
    /// `None` when every sampled difference is zero or the fit has fewer
    /// than two usable scales.
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub l1_norm: f64,
    pub fit: Option<LineFit>,
}

/// Halton pairs over the component's vertex list. The starting index is
/// drawn from SplitMix64 so different seeds give disjoint-looking samples.
fn sampled_pairs(n: usize, count: usize, seed: u64) -> impl Iterator<Item = (usize, usize)> {
    let start = SplitMix64::new(seed).next_u64() >> 44;
    (0..count as u64).map(move |k| {
        let i = (radical_inverse(start + k + 1, 2) * n as f64) as usize;
        let j = (radical_inverse(start + k + 1, 3) * n as f64) as usize;
        (i.min(n - 1), j.min(n - 1))
    })
}

/// Fits `max |u(x) - u(y)|` over sampled pairs in `Σ_s` against `s / r`.
/// Balls are centred at the vertex nearest the ambient origin; the L1 norm
/// is taken over the component of radius `2r`.
pub fn holder_estimate(
    mesh: &SurfaceMesh,
    field: &ScalarField,
    r: f64,
    s_list: &[f64],
    pair_samples: usize,
    seed: u64,
) -> Result<HolderFit> {
    if s_list.is_empty() {
        return Err(Error::Argument("empty scale list".into()));
    }
    if s_list.iter().any(|&s| !(s > 0.0 && s < r)) {
        return Err(Error::Argument(format!("scales must lie in (0, {r})")));
    }
    if pair_samples == 0 {
        return Err(Error::Argument("need at least one sample pair".into()));
    }
    let centre = mesh.nearest_vertex(&Vec3::zeros());
    let max_difference = s_list
        .par_iter()
        .map(|&s| {
            let comp = BallComponent::new(mesh, centre, s)?;
            let verts = comp.vertices();
            let vals = field.values();
            Ok(sampled_pairs(verts.len(), pair_samples, seed)
                .map(|(i, j)| (vals[verts[i]] - vals[verts[j]]).abs())
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    let outer = BallComponent::new(mesh, centre, 2.0 * r)?;
    let areas = mesh.vertex_areas(outer.triangles());
    let l1_norm: f64 = outer.vertices().iter().map(|&v| field.values()[v].abs() * areas[v]).sum();

    let usable: Vec<(f64, f64)> = s_list
        .iter()
        .zip(&max_difference)
        .filter(|(_, d)| **d > 0.0)
        .map(|(s, d)| ((s / r).ln(), d.ln()))
        .collect();
    let (alpha, c, fit) = if usable.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
        let fit = fit_line(&xs, &ys)?;
        let c = (l1_norm > 0.0).then(|| fit.intercept.exp() / l1_norm);
        (Some(fit.slope), c, Some(fit))
    } else {
        (None, None, None)
    };
    Ok(HolderFit { r, centre, s: s_list.to_vec(), max_difference, alpha, c, l1_norm, fit })
}

/// `sup_{Σ_r} |u| r^2 / ∫_{Σ_2r} |u| dA` with lumped vertex areas.
pub fn mean_value_ratio(mesh: &SurfaceMesh, field: &ScalarField, root: usize, r: f64) -> Result<f64> {
    let inner = BallComponent::new(mesh, root, r)?;
    let outer = BallComponent::new(mesh, root, 2.0 * r)?;
    let vals = field.values();
    let sup = inner.vertices().iter().map(|&v| vals[v].abs()).fold(0.0, f64::max);
    let areas = mesh.vertex_areas(outer.triangles());
    let integral: f64 = outer.vertices().iter().map(|&v| vals[v].abs() * areas[v]).sum();
    if !(integral > 0.0) {
        return Err(Error::Degenerate("field integrates to zero on the outer ball".into()));
    }
    Ok(sup * r * r / integral)
}
