use rayon::prelude::*;

use super::ScalarField;
use crate::error::{Error, Result};
use crate::mesh::{BallComponent, SurfaceMesh};

const CG_TOLERANCE: f64 = 1e-10;
const UNKNOWN: usize = usize::MAX;

/// Edge weights `w_ij = (cot a + cot b) / 2` summed over the given triangles,
/// computed from parameter-plane angles. Returned sorted by `(i, j)`, `i < j`.
///
/// With these weights `sum w_ij (f_i - f_j)^2` is the exact Dirichlet energy
/// of the piecewise-linear interpolant.
pub fn cotangent_weights(mesh: &SurfaceMesh, triangles: &[usize]) -> Vec<(usize, usize, f64)> {
    let mut entries = Vec::with_capacity(3 * triangles.len());
    for &t in triangles {
        let tri = mesh.triangles()[t];
        let p = mesh.param_triangle(t);
        let twice_area = ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
            - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]))
            .abs();
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let e1 = [p[i][0] - p[k][0], p[i][1] - p[k][1]];
            let e2 = [p[j][0] - p[k][0], p[j][1] - p[k][1]];
            let cot = (e1[0] * e2[0] + e1[1] * e2[1]) / twice_area;
            let (a, b) = (tri[i].min(tri[j]), tri[i].max(tri[j]));
            entries.push((a, b, 0.5 * cot));
        }
    }
    entries.sort_unstable_by_key(|x| (x.0, x.1));
    let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len() / 2 + 1);
    for (a, b, w) in entries {
        match merged.last_mut() {
            Some(last) if last.0 == a && last.1 == b => last.2 += w,
            _ => merged.push((a, b, w)),
        }
    }
    merged
}

/// Stiffness operator of a ball component, partitioned into interior
/// unknowns and boundary data.
#[derive(Debug, Clone)]
pub struct EnergyForm {
    weights: Vec<(usize, usize, f64)>,
    interior: Vec<usize>,
    // CSR over interior unknowns, off-diagonal entries are -w
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
    // interior row -> (boundary vertex, w)
    coupling_ptr: Vec<usize>,
    coupling: Vec<(usize, f64)>,
}

pub fn assemble_energy(mesh: &SurfaceMesh, component: &BallComponent) -> EnergyForm {
    let weights = cotangent_weights(mesh, component.triangles());
    let interior = component.interior_vertices().to_vec();
    let mut index = vec![UNKNOWN; mesh.vertex_count()];
    for (k, &v) in interior.iter().enumerate() {
        index[v] = k;
    }
    let n = interior.len();
    let mut diag = vec![0.0; n];
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut coupling_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(a, b, w) in &weights {
        let (ia, ib) = (index[a], index[b]);
        if ia != UNKNOWN {
            diag[ia] += w;
        }
        if ib != UNKNOWN {
            diag[ib] += w;
        }
        match (ia != UNKNOWN, ib != UNKNOWN) {
            (true, true) => {
                rows[ia].push((ib, -w));
                rows[ib].push((ia, -w));
            }
            (true, false) => coupling_rows[ia].push((b, w)),
            (false, true) => coupling_rows[ib].push((a, w)),
            (false, false) => {}
        }
    }
    let mut row_ptr = vec![0];
    let (mut cols, mut vals) = (Vec::new(), Vec::new());
    for mut row in rows {
        row.sort_unstable_by_key(|e| e.0);
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    let mut coupling_ptr = vec![0];
    let mut coupling = Vec::new();
    for row in coupling_rows {
        coupling.extend(row);
        coupling_ptr.push(coupling.len());
    }
    EnergyForm { weights, interior, row_ptr, cols, vals, diag, coupling_ptr, coupling }
}

impl EnergyForm {
    pub fn weights(&self) -> &[(usize, usize, f64)] {
        &self.weights
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// `sum_edges w_ij (f_i - f_j)^2`.
    pub fn energy(&self, field: &ScalarField) -> f64 {
        self.weights
            .iter()
            .map(|&(a, b, w)| w * (field.at(a) - field.at(b)).powi(2))
            .sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().map(|e| e.2).fold(f64::INFINITY, f64::min)
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            let mut acc = self.diag[i] * x[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimises the Dirichlet energy on `component` with the component's
/// boundary vertices fixed to `boundary`. Returns the field on the component
/// (absent elsewhere) and solver statistics.
pub fn solve_dirichlet(
    mesh: &SurfaceMesh,
    component: &BallComponent,
    boundary: &ScalarField,
) -> Result<(ScalarField, SolveStats)> {
    let bverts = component.boundary_vertices();
    if bverts.is_empty() {
        return Err(Error::Singular("component has no boundary vertices".into()));
    }
    if let Some(&v) = bverts.iter().find(|&&v| !boundary.at(v).is_finite()) {
        return Err(Error::Argument(format!("boundary value at vertex {v} is not finite")));
    }
    let form = assemble_energy(mesh, component);
    let n = form.interior.len();
    let mut values = vec![f64::NAN; mesh.vertex_count()];
    for &v in bverts {
        values[v] = boundary.at(v);
    }
    if n == 0 {
        return Ok((ScalarField::new(values), SolveStats { iterations: 0, relative_residual: 0.0 }));
    }

    let rhs: Vec<f64> = (0..n)
        .map(|i| {
            form.coupling[form.coupling_ptr[i]..form.coupling_ptr[i + 1]]
                .iter()
                .map(|&(b, w)| w * boundary.at(b))
                .sum()
        })
        .collect();
    let mean = bverts.iter().map(|&v| boundary.at(v)).sum::<f64>() / bverts.len() as f64;
    let mut x = vec![mean; n];
    let stats = conjugate_gradients(&form, &rhs, &mut x)?;
    for (k, &v) in form.interior.iter().enumerate() {
        values[v] = x[k];
    }
    Ok((ScalarField::new(values), stats))
}

fn conjugate_gradients(form: &EnergyForm, b: &[f64], x: &mut [f64]) -> Result<SolveStats> {
    let n = b.len();
    if let Some(i) = form.diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::Singular(format!("non-positive diagonal at interior vertex {}", form.interior[i])));
    }
    let inv_diag: Vec<f64> = form.diag.iter().map(|d| 1.0 / d).collect();
    let mut ax = vec![0.0; n];
    form.apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let b_norm = dot(b, b).sqrt();
    let scale = if b_norm > 0.0 { b_norm } else { 1.0 };
    let mut res = dot(&r, &r).sqrt() / scale;
    if res <= CG_TOLERANCE {
        return Ok(SolveStats { iterations: 0, relative_residual: res });
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let cap = 10 * n.max(10);
    for it in 1..=cap {
        form.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Singular("operator is not positive definite".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = dot(&r, &r).sqrt() / scale;
        if res <= CG_TOLERANCE {
            return Ok(SolveStats { iterations: it, relative_residual: res });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged { iterations: cap, residual: res })
}

/// Gradient of the linear interpolant on a parameter triangle.
fn param_gradient(p: &[[f64; 2]; 3], f: [f64; 3]) -> ([f64; 2], f64) {
    let (e1, e2) = ([p[1][0] - p[0][0], p[1][1] - p[0][1]], [p[2][0] - p[0][0], p[2][1] - p[0][1]]);
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    let (d1, d2) = (f[1] - f[0], f[2] - f[0]);
    let g = [(d1 * e2[1] - d2 * e1[1]) / det, (e1[0] * d2 - e2[0] * d1) / det];
    (g, 0.5 * det.abs())
}

fn corner_values(field: &ScalarField, tri: [usize; 3]) -> [f64; 3] {
    tri.map(|v| field.at(v))
}

/// `sum_T |grad_param f|^2 * area_param(T)`; by conformal invariance this is
/// the surface Dirichlet energy.
pub fn dirichlet_energy(mesh: &SurfaceMesh, field: &ScalarField, triangles: &[usize]) -> f64 {
    triangles
        .iter()
        .map(|&t| {
            let (g, area) = param_gradient(&mesh.param_triangle(t), corner_values(field, mesh.triangles()[t]));
            (g[0] * g[0] + g[1] * g[1]) * area
        })
        .sum()
}

fn mean_lambda(mesh: &SurfaceMesh, t: usize) -> f64 {
    mesh.triangles()[t].iter().map(|&v| mesh.lambdas()[v]).sum::<f64>() / 3.0
}

/// Same energy through the surface quantities: `|grad_S f|^2 = |grad_param f|^2 / lambda`
/// integrated against `dA_S = lambda dA_param`, with `lambda` the mean over
/// the triangle's corners.
pub fn surface_energy(mesh: &SurfaceMesh, field: &ScalarField, triangles: &[usize]) -> f64 {
    triangles
        .iter()
        .map(|&t| {
            let (g, area) = param_gradient(&mesh.param_triangle(t), corner_values(field, mesh.triangles()[t]));
            let lambda = mean_lambda(mesh, t);
            let grad_sq = (g[0] * g[0] + g[1] * g[1]) / lambda;
            grad_sq * (lambda * area)
        })
        .sum()
}

/// `int |grad_S f| dA` with `|grad_S f| = |grad_param f| / sqrt(lambda)` and the
/// flat ambient triangle area as `dA`.
pub fn gradient_l1(mesh: &SurfaceMesh, field: &ScalarField, triangles: &[usize]) -> f64 {
    triangles
        .iter()
        .map(|&t| {
            let (g, _) = param_gradient(&mesh.param_triangle(t), corner_values(field, mesh.triangles()[t]));
            (g[0] * g[0] + g[1] * g[1]).sqrt() / mean_lambda(mesh, t).sqrt() * mesh.ambient_area(t)
        })
        .sum()
}
