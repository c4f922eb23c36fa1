use chull::ConvexHull;
use nalgebra::{Matrix3, SymmetricEigen};

use super::{BallComponent, SurfaceMesh};
use crate::error::{Error, Result};
use crate::surfaces::Vec3;

/// Largest distance by which an interior vertex of `component` lies outside
/// the convex hull of its boundary vertices (signed facet distances, 0 when
/// inside). Coplanar boundaries fall back to a planar hull.
pub fn convex_hull_check(mesh: &SurfaceMesh, component: &BallComponent) -> Result<f64> {
    let boundary: Vec<Vec3> = component.boundary_vertices().iter().map(|&v| mesh.position(v)).collect();
    let interior: Vec<Vec3> = component.interior_vertices().iter().map(|&v| mesh.position(v)).collect();
    if boundary.is_empty() {
        return Err(Error::Degenerate("component has no boundary vertices".into()));
    }
    if interior.is_empty() {
        return Ok(0.0);
    }
    let planes = hull_planes(&boundary)?;
    let worst = interior
        .iter()
        .map(|p| planes.iter().map(|(n, d)| n.dot(p) - d).fold(f64::NEG_INFINITY, f64::max))
        .fold(0.0, f64::max);
    Ok(worst)
}

/// Outward unit normals and offsets `(n, d)` with the hull being `n.x <= d`.
fn hull_planes(points: &[Vec3]) -> Result<Vec<(Vec3, f64)>> {
    let centroid = points.iter().sum::<Vec3>() / points.len() as f64;
    let scale = points.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max).max(1e-300);
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let imin = eig.eigenvalues.imin();
    let normal: Vec3 = eig.eigenvectors.column(imin).into_owned();
    let thickness = points.iter().map(|p| normal.dot(&(p - centroid)).abs()).fold(0.0, f64::max);

    if points.len() < 4 || thickness <= 1e-9 * scale {
        return planar_planes(points, centroid, normal, scale);
    }

    let raw: Vec<Vec<f64>> = points.iter().map(|p| vec![p.x, p.y, p.z]).collect();
    let mut last_err = None;
    for rel in [1e-12, 1e-9, 1e-6] {
        match ConvexHull::try_new(&raw, rel * scale.powi(3), None) {
            Ok(hull) => {
                let (verts, indices) = hull.vertices_indices();
                let verts: Vec<Vec3> = verts.iter().map(|v| Vec3::new(v[0], v[1], v[2])).collect();
                let inner = verts.iter().sum::<Vec3>() / verts.len() as f64;
                let planes = indices
                    .chunks(3)
                    .filter_map(|f| {
                        let (a, b, c) = (verts[f[0]], verts[f[1]], verts[f[2]]);
                        let n = (b - a).cross(&(c - a));
                        let len = n.norm();
                        if len <= 1e-300 {
                            return None;
                        }
                        let mut n = n / len;
                        if n.dot(&(a - inner)) < 0.0 {
                            n = -n;
                        }
                        Some((n, n.dot(&a)))
                    })
                    .collect();
                return Ok(planes);
            }
            Err(chull::ErrorKind::Degenerated) => {
                return planar_planes(points, centroid, normal, scale);
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::Degenerate(format!("convex hull failed: {}", last_err.unwrap())))
}

/// Hull of nearly coplanar points: the two faces of the slab plus the edges
/// of the 2D hull extruded along the normal.
fn planar_planes(points: &[Vec3], centroid: Vec3, normal: Vec3, scale: f64) -> Result<Vec<(Vec3, f64)>> {
    let e1 = normal.cross(&if normal.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() }).normalize();
    let e2 = normal.cross(&e1);
    let mut flat: Vec<[f64; 2]> = points
        .iter()
        .map(|p| {
            let d = p - centroid;
            [d.dot(&e1), d.dot(&e2)]
        })
        .collect();
    let hull = monotone_chain(&mut flat);
    let top = points.iter().map(|p| normal.dot(p)).fold(f64::NEG_INFINITY, f64::max);
    let bottom = points.iter().map(|p| normal.dot(p)).fold(f64::INFINITY, f64::min);
    let mut planes = vec![(normal, top), (-normal, -bottom)];
    if hull.len() < 3 {
        return Err(Error::Degenerate(format!(
            "boundary points are collinear (extent {scale:e})"
        )));
    }
    for i in 0..hull.len() {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        // counter-clockwise hull: outward normal is (dy, -dx)
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = (dx * dx + dy * dy).sqrt();
        if len == 0.0 {
            continue;
        }
        let n = (e1 * dy - e2 * dx) / len;
        let anchor = centroid + e1 * a[0] + e2 * a[1];
        planes.push((n, n.dot(&anchor)));
    }
    Ok(planes)
}

fn monotone_chain(points: &mut [[f64; 2]]) -> Vec<[f64; 2]> {
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in points.iter() {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in points.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
