use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{gradient_l1, ScalarField};
use crate::error::{Error, Result};
use crate::mesh::{BallComponent, SurfaceMesh};
use crate::surfaces::Vec3;

/// Relative shift applied to vertex values that hit the level exactly.
pub const EXACT_HIT_SHIFT: f64 = 1e-14;

/// One straight piece of a level set inside a single triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSegment {
    pub start: Vec3,
    pub end: Vec3,
    pub triangle: usize,
    /// Undirected mesh edges `(min, max)` carrying the two endpoints.
    pub edges: [(usize, usize); 2],
    pub component: usize,
}

impl LevelSegment {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelComponent {
    pub segments: Vec<usize>,
    pub length: f64,
    /// Some endpoint lies on a boundary edge of the subcomplex.
    pub touches_boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub level: f64,
    pub segments: Vec<LevelSegment>,
    pub components: Vec<LevelComponent>,
    pub total_length: f64,
}

impl LevelSet {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Components with at least one endpoint strictly inside `B_r(centre)`.
    pub fn components_meeting_ball(&self, centre: Vec3, r: f64) -> impl Iterator<Item = &LevelComponent> {
        let r2 = r * r;
        self.components.iter().filter(move |c| {
            c.segments.iter().any(|&s| {
                let seg = &self.segments[s];
                (seg.start - centre).norm_squared() < r2 || (seg.end - centre).norm_squared() < r2
            })
        })
    }

    /// CSV rows `x1,y1,z1,x2,y2,z2,component_id` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x1,y1,z1,x2,y2,z2,component_id\n");
        for s in &self.segments {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.start.x, s.start.y, s.start.z, s.end.x, s.end.y, s.end.z, s.component
            ));
        }
        out
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Marching-triangles extraction of `{field = level}` over the component's
/// triangles, on the flat ambient triangles.
pub fn level_set(mesh: &SurfaceMesh, field: &ScalarField, level: f64, component: &BallComponent) -> LevelSet {
    let shift = EXACT_HIT_SHIFT * (1.0 + level.abs());
    let value = |v: usize| {
        let x = field.at(v);
        if x == level {
            x + shift
        } else {
            x
        }
    };
    let crossing = |a: usize, b: usize| -> Vec3 {
        // canonical orientation so both triangles sharing the edge agree
        let (a, b) = (a.min(b), a.max(b));
        let (fa, fb) = (value(a), value(b));
        let t = (level - fa) / (fb - fa);
        mesh.position(a) + (mesh.position(b) - mesh.position(a)) * t
    };

    let mut segments = Vec::new();
    let mut on_boundary = Vec::new();
    for &t in component.triangles() {
        let tri = mesh.triangles()[t];
        let f = tri.map(value);
        let mut hits = [(0usize, 0usize, 0usize); 2];
        let mut n = 0;
        for e in 0..3 {
            let (i, j) = (e, (e + 1) % 3);
            if (f[i] < level) != (f[j] < level) {
                if n < 2 {
                    hits[n] = (tri[i], tri[j], e);
                }
                n += 1;
            }
        }
        if n != 2 {
            continue;
        }
        let key = |h: (usize, usize, usize)| (h.0.min(h.1), h.0.max(h.1));
        segments.push(LevelSegment {
            start: crossing(hits[0].0, hits[0].1),
            end: crossing(hits[1].0, hits[1].1),
            triangle: t,
            edges: [key(hits[0]), key(hits[1])],
            component: 0,
        });
        on_boundary.push(
            component.is_boundary_edge(mesh, t, hits[0].2) || component.is_boundary_edge(mesh, t, hits[1].2),
        );
    }

    let mut parent: Vec<usize> = (0..segments.len()).collect();
    let mut first_on_edge: HashMap<(usize, usize), usize> = HashMap::with_capacity(2 * segments.len());
    for (s, seg) in segments.iter().enumerate() {
        for e in seg.edges {
            if let Some(&other) = first_on_edge.get(&e) {
                let (ra, rb) = (find(&mut parent, s), find(&mut parent, other));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            } else {
                first_on_edge.insert(e, s);
            }
        }
    }

    let mut id_of_root: HashMap<usize, usize> = HashMap::new();
    let mut components: Vec<LevelComponent> = Vec::new();
    for s in 0..segments.len() {
        let root = find(&mut parent, s);
        let id = *id_of_root.entry(root).or_insert_with(|| {
            components.push(LevelComponent { segments: Vec::new(), length: 0.0, touches_boundary: false });
            components.len() - 1
        });
        segments[s].component = id;
        let c = &mut components[id];
        c.segments.push(s);
        c.length += segments[s].length();
        c.touches_boundary |= on_boundary[s];
    }
    let total_length = components.iter().map(|c| c.length).sum();
    LevelSet { level, segments, components, total_length }
}

/// Total length of the zero set.
pub fn nodal_length(mesh: &SurfaceMesh, field: &ScalarField, component: &BallComponent) -> f64 {
    level_set(mesh, field, 0.0, component).total_length
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoareaCheck {
    pub gradient_l1: f64,
    /// Midpoint-rule integral over levels of the level-set length.
    pub level_integral: f64,
    pub relative_error: f64,
    pub n_levels: usize,
}

/// Compares `int |grad f|` with `int length({f = s}) ds`, sampling `n_levels`
/// midpoints uniformly over the field's range on the component.
pub fn coarea_check(
    mesh: &SurfaceMesh,
    field: &ScalarField,
    component: &BallComponent,
    n_levels: usize,
) -> Result<CoareaCheck> {
    if n_levels < 16 {
        return Err(Error::Argument(format!("coarea check needs at least 16 levels, got {n_levels}")));
    }
    let (lo, hi) = field.range_on(component);
    if !(hi > lo) {
        return Err(Error::Degenerate("field is constant on the component; both sides are zero".into()));
    }
    let step = (hi - lo) / n_levels as f64;
    let lengths: Vec<f64> = (0..n_levels)
        .into_par_iter()
        .map(|j| level_set(mesh, field, lo + (j as f64 + 0.5) * step, component).total_length)
        .collect();
    let level_integral = step * lengths.iter().sum::<f64>();
    let g = gradient_l1(mesh, field, component.triangles());
    Ok(CoareaCheck {
        gradient_l1: g,
        level_integral,
        relative_error: (g - level_integral).abs() / g.max(1e-300),
        n_levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::triangulate;
    use crate::surfaces::ImmersionSpec;
    use approx::assert_relative_eq;

    fn disk(h: f64) -> (SurfaceMesh, BallComponent) {
        let mesh = triangulate(&ImmersionSpec::plane(), 1.0, h).unwrap();
        let comp = BallComponent::whole(&mesh, 0);
        (mesh, comp)
    }

    #[test]
    fn diameter_level() {
        let (mesh, comp) = disk(0.02);
        let x1 = ScalarField::coordinate(&mesh, 0);
        let ls = level_set(&mesh, &x1, 0.0, &comp);
        assert_eq!(ls.components.len(), 1);
        assert!(ls.components[0].touches_boundary);
        assert_relative_eq!(ls.total_length, 2.0, max_relative = 0.01);
        assert_relative_eq!(nodal_length(&mesh, &x1, &comp), 2.0, max_relative = 0.01);
        for s in &ls.segments {
            // endpoints sit on the level to rounding
            assert!(s.start.x.abs() < 1e-12 && s.end.x.abs() < 1e-12);
        }
    }

    #[test]
    fn level_outside_range_is_empty() {
        let (mesh, comp) = disk(0.1);
        let ls = level_set(&mesh, &ScalarField::coordinate(&mesh, 0), 2.0, &comp);
        assert!(ls.is_empty());
        assert_eq!(ls.total_length, 0.0);
    }

    #[test]
    fn cubic_nodal_set_is_three_diameters() {
        let (mesh, comp) = disk(0.02);
        let f = ScalarField::from_fn(&mesh, |v| {
            let [x, y] = mesh.params()[v];
            x * x * x - 3.0 * x * y * y
        });
        assert_relative_eq!(nodal_length(&mesh, &f, &comp), 6.0, max_relative = 0.02);
    }

    #[test]
    fn coarea_plane_x1() {
        let (mesh, comp) = disk(0.02);
        let c = coarea_check(&mesh, &ScalarField::coordinate(&mesh, 0), &comp, 64).unwrap();
        assert!(c.relative_error <= 0.01, "{c:?}");
    }

    #[test]
    fn coarea_rejects_constant_and_few_levels() {
        let (mesh, comp) = disk(0.1);
        assert!(matches!(
            coarea_check(&mesh, &ScalarField::constant(&mesh, 1.0), &comp, 32),
            Err(Error::Degenerate(_))
        ));
        assert!(coarea_check(&mesh, &ScalarField::coordinate(&mesh, 0), &comp, 8).is_err());
    }

    #[test]
    fn exact_hits_are_perturbed() {
        // vertex values equal to the level never produce degenerate segments
        let (mesh, comp) = disk(0.1);
        let f = ScalarField::from_fn(&mesh, |v| (mesh.params()[v][0] * 10.0).round());
        let ls = level_set(&mesh, &f, 0.0, &comp);
        assert!(ls.segments.iter().all(|s| s.length().is_finite()));
        assert!(ls.total_length > 0.0);
    }

    #[test]
    fn csv_has_one_row_per_segment() {
        let (mesh, comp) = disk(0.1);
        let ls = level_set(&mesh, &ScalarField::coordinate(&mesh, 1), 0.1, &comp);
        assert_eq!(ls.to_csv().lines().count(), ls.segments.len() + 1);
    }
}
