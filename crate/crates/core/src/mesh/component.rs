use std::collections::VecDeque;

use super::{SurfaceMesh, NO_NEIGHBOR};
use crate::error::{Error, Result};

/// Connected component of `B_r(root) ∩ Σ` through the root vertex.
///
/// Membership is vertex-strict: a triangle belongs to the ball when all three
/// corners satisfy `|x - x_root| < r` (open ball).
#[derive(Debug, Clone, PartialEq)]
pub struct BallComponent {
    root: usize,
    radius: f64,
    triangles: Vec<usize>,
    vertices: Vec<usize>,
    boundary: Vec<usize>,
    interior: Vec<usize>,
    member: Vec<bool>,
    vertex_member: Vec<bool>,
    boundary_flag: Vec<bool>,
}

impl BallComponent {
    pub fn new(mesh: &SurfaceMesh, root: usize, radius: f64) -> Result<Self> {
        if root >= mesh.vertex_count() {
            return Err(Error::Argument(format!("root vertex {root} out of range")));
        }
        if !(radius > 0.0) {
            return Err(Error::Argument(format!("radius must be positive, got {radius}")));
        }
        let centre = mesh.position(root);
        let r2 = radius * radius;
        let inside: Vec<bool> = mesh
            .positions()
            .iter()
            .map(|p| (p - centre).norm_squared() < r2)
            .collect();
        let tri_inside = |t: usize| mesh.triangles()[t].iter().all(|&v| inside[v]);

        let mut member = vec![false; mesh.triangle_count()];
        let mut queue = VecDeque::new();
        for (t, tri) in mesh.triangles().iter().enumerate() {
            if tri.contains(&root) && tri_inside(t) {
                member[t] = true;
                queue.push_back(t);
            }
        }
        if queue.is_empty() {
            return Err(Error::DegenerateRadius { root, radius });
        }
        while let Some(t) = queue.pop_front() {
            for &n in &mesh.neighbors()[t] {
                if n != NO_NEIGHBOR && !member[n] && tri_inside(n) {
                    member[n] = true;
                    queue.push_back(n);
                }
            }
        }
        Ok(Self::from_membership(mesh, root, radius, member))
    }

    /// The whole mesh as a subcomplex (infinite radius).
    pub fn whole(mesh: &SurfaceMesh, root: usize) -> Self {
        Self::from_membership(mesh, root, f64::INFINITY, vec![true; mesh.triangle_count()])
    }

    fn from_membership(mesh: &SurfaceMesh, root: usize, radius: f64, member: Vec<bool>) -> Self {
        let n = mesh.vertex_count();
        let mut vertex_member = vec![false; n];
        let mut boundary_flag = vec![false; n];
        let mut triangles = Vec::new();
        for (t, _) in member.iter().enumerate().filter(|(_, &m)| m) {
            triangles.push(t);
            let tri = mesh.triangles()[t];
            for e in 0..3 {
                vertex_member[tri[e]] = true;
                let nb = mesh.neighbors()[t][e];
                if nb == NO_NEIGHBOR || !member[nb] {
                    boundary_flag[tri[e]] = true;
                    boundary_flag[tri[(e + 1) % 3]] = true;
                }
            }
        }
        let vertices: Vec<usize> = (0..n).filter(|&v| vertex_member[v]).collect();
        let (boundary, interior) = vertices.iter().partition(|&&v| boundary_flag[v]);
        Self {
            root,
            radius,
            triangles,
            vertices,
            boundary,
            interior,
            member,
            vertex_member,
            boundary_flag,
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Member triangles in ascending index order.
    pub fn triangles(&self) -> &[usize] {
        &self.triangles
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary
    }

    pub fn interior_vertices(&self) -> &[usize] {
        &self.interior
    }

    pub fn contains_triangle(&self, t: usize) -> bool {
        self.member[t]
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertex_member[v]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_flag[v]
    }

    /// True when edge `e` of member triangle `t` has no member triangle on
    /// its other side.
    pub fn is_boundary_edge(&self, mesh: &SurfaceMesh, t: usize, e: usize) -> bool {
        let nb = mesh.neighbors()[t][e];
        nb == NO_NEIGHBOR || !self.member[nb]
    }

    pub fn area(&self, mesh: &SurfaceMesh) -> f64 {
        super::surface_area(mesh, &self.triangles)
    }

    pub fn euler_characteristic(&self, mesh: &SurfaceMesh) -> i64 {
        let mut edges = 0i64;
        for &t in &self.triangles {
            for e in 0..3 {
                let nb = mesh.neighbors()[t][e];
                if nb == NO_NEIGHBOR || !self.member[nb] || nb > t {
                    edges += 1;
                }
            }
        }
        self.vertices.len() as i64 - edges + self.triangles.len() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::triangulate;
    use crate::surfaces::{param_radius_for_ball, ImmersionSpec, Vec3};
    use std::f64::consts::PI;

    #[test]
    fn plane_unit_disk() {
        let h = 0.05;
        let mesh = triangulate(&ImmersionSpec::plane(), 1.5, h).unwrap();
        let comp = BallComponent::new(&mesh, 0, 1.0).unwrap();
        for &v in comp.vertices() {
            assert!(mesh.position(v).norm() < 1.0);
        }
        for &v in comp.boundary_vertices() {
            let d = 1.0 - mesh.position(v).norm();
            assert!(d >= 0.0 && d <= h, "boundary vertex at distance {d} from the circle");
        }
        // every triangle fully inside the disk of radius 1 - h is a member
        for t in 0..mesh.triangle_count() {
            if mesh.triangles()[t].iter().all(|&v| mesh.position(v).norm() < 1.0 - h) {
                assert!(comp.contains_triangle(t));
            }
        }
        assert_eq!(comp.euler_characteristic(&mesh), 1);
        let area = comp.area(&mesh);
        assert!(area < PI && area > PI * (1.0 - 2.0 * h), "{area}");
    }

    #[test]
    fn enneper_small_ball_is_disk() {
        let spec = ImmersionSpec::enneper(1).unwrap();
        let mesh = triangulate(&spec, 2.0, 0.05).unwrap();
        let comp = BallComponent::new(&mesh, 0, 0.5).unwrap();
        assert_eq!(comp.euler_characteristic(&mesh), 1);
    }

    /// Flood fill over vertices through mesh edges, independent of the
    /// triangle-adjacency search.
    fn flood_vertices(mesh: &crate::mesh::SurfaceMesh, root: usize, r: f64) -> usize {
        let c = mesh.position(root);
        let inside = |v: usize| (mesh.position(v) - c).norm() < r;
        let mut adj = vec![Vec::new(); mesh.vertex_count()];
        for tri in mesh.triangles() {
            if tri.iter().all(|&v| inside(v)) {
                for e in 0..3 {
                    adj[tri[e]].push(tri[(e + 1) % 3]);
                    adj[tri[(e + 1) % 3]].push(tri[e]);
                }
            }
        }
        let mut seen = vec![false; mesh.vertex_count()];
        let mut stack = vec![root];
        seen[root] = true;
        let mut count = 0;
        while let Some(v) = stack.pop() {
            count += 1;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        count
    }

    #[test]
    fn catenoid_ball_encircles_neck() {
        let spec = ImmersionSpec::catenoid();
        let rho = param_radius_for_ball(&spec, 10.0).unwrap();
        let mesh = triangulate(&spec, rho, 0.1).unwrap();
        let root = mesh.vertex_at_param(0.0, 0.0);
        assert!((mesh.position(root) - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        let comp = BallComponent::new(&mesh, root, 10.0).unwrap();
        assert_eq!(comp.euler_characteristic(&mesh), 0);
        assert_eq!(comp.vertices().len(), flood_vertices(&mesh, root, 10.0));
    }

    #[test]
    fn components_are_nested() {
        let spec = ImmersionSpec::enneper(1).unwrap();
        let mesh = triangulate(&spec, param_radius_for_ball(&spec, 8.0).unwrap(), 0.2).unwrap();
        let radii = [0.7, 1.3, 2.0, 3.5, 5.0, 8.0];
        let comps: Vec<_> = radii.iter().map(|&r| BallComponent::new(&mesh, 0, r).unwrap()).collect();
        for w in comps.windows(2) {
            for &t in w[0].triangles() {
                assert!(w[1].contains_triangle(t));
            }
        }
    }

    #[test]
    fn tiny_radius_is_degenerate() {
        let mesh = triangulate(&ImmersionSpec::plane(), 1.0, 0.1).unwrap();
        assert!(matches!(
            BallComponent::new(&mesh, 0, 0.01),
            Err(Error::DegenerateRadius { .. })
        ));
    }
}
