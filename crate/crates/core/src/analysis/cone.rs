use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::SurfaceMesh;
use crate::surfaces::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeProfile {
    pub alpha: f64,
    /// Smallest `C` with `|x3| <= C (|x1|^alpha + |x2|^alpha + 1)` on the mesh.
    pub c: f64,
    pub vertex: usize,
    pub position: [f64; 3],
}

pub fn cone_containment_profile(mesh: &SurfaceMesh, alpha: f64) -> Result<ConeProfile> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Argument(format!("alpha must be positive, got {alpha}")));
    }
    let ratio = |p: &Vec3| p.z.abs() / (p.x.abs().powf(alpha) + p.y.abs().powf(alpha) + 1.0);
    let (vertex, c) = mesh
        .positions()
        .iter()
        .map(ratio)
        .enumerate()
        .fold((0, 0.0), |best, (i, c)| if c > best.1 { (i, c) } else { best });
    let p = mesh.position(vertex);
    Ok(ConeProfile { alpha, c, vertex, position: [p.x, p.y, p.z] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::triangulate;
    use crate::surfaces::ImmersionSpec;

    #[test]
    fn plane_is_flat() {
        let mesh = triangulate(&ImmersionSpec::plane(), 3.0, 0.3).unwrap();
        for alpha in [0.1, 0.5, 2.0] {
            assert_eq!(cone_containment_profile(&mesh, alpha).unwrap().c, 0.0);
        }
        assert!(cone_containment_profile(&mesh, 0.0).is_err());
    }

    #[test]
    fn enneper_small_patch() {
        // on |z| <= 1 the ratio peaks on the axes at |z| = 1, e.g. (2/3, 0, 1)
        let mesh = triangulate(&ImmersionSpec::enneper(1).unwrap(), 1.0, 0.01).unwrap();
        let p = cone_containment_profile(&mesh, 1.0).unwrap();
        assert!((p.c - 1.0 / (2.0 / 3.0 + 1.0)).abs() < 1e-3, "{p:?}");
    }
}
