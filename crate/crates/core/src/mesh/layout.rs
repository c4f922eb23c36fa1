//! Structured parameter-domain layouts.
//!
//! Three layouts cover the four families:
//!
//! * polar rings around a centre vertex (plane, Enneper), ring spacing graded
//!   by `1/sqrt(lambda)` along the radius;
//! * open rows of constant `u` (helicoid), graded in `u`, clipped to the
//!   parameter disk and to `|sinh u| <= rho`;
//! * closed rows of constant `u` (catenoid), periodic in `v`.
//!
//! Consecutive rings/rows are stitched by merging along the row coordinate,
//! then a Lawson flip pass makes the triangulation Delaunay in the parameter
//! plane so every cotangent weight is non-negative.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::surfaces::{ImmersionSpec, SurfaceKind};

/// Radial spacing factor for near-equilateral triangles.
const ROW_FACTOR: f64 = 0.866_025_403_784_438_6;

pub(crate) struct Layout {
    pub params: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub periodic_v: bool,
}

/// Stations `a = t_0 < ... < t_n = b` with `int_{t_i}^{t_{i+1}} density <= spacing`,
/// equally spaced in the integrated density.
pub(crate) fn graded_stations(density: impl Fn(f64) -> f64, a: f64, b: f64, spacing: f64) -> Vec<f64> {
    const SAMPLES: usize = 8192;
    let dt = (b - a) / SAMPLES as f64;
    let mut cumulative = Vec::with_capacity(SAMPLES + 1);
    cumulative.push(0.0);
    let mut prev = density(a);
    for i in 1..=SAMPLES {
        let t = a + dt * i as f64;
        let cur = density(t);
        let last = *cumulative.last().unwrap();
        // Simpson on each sub-interval.
        let mid = density(t - 0.5 * dt);
        cumulative.push(last + dt * (prev + 4.0 * mid + cur) / 6.0);
        prev = cur;
    }
    let total = cumulative[SAMPLES];
    let n = ((total / spacing).ceil() as usize).max(1);
    let mut out = Vec::with_capacity(n + 1);
    out.push(a);
    let mut k = 0;
    for i in 1..n {
        let target = total * i as f64 / n as f64;
        while cumulative[k + 1] < target {
            k += 1;
        }
        let frac = (target - cumulative[k]) / (cumulative[k + 1] - cumulative[k]);
        out.push(a + dt * (k as f64 + frac));
    }
    out.push(b);
    out
}

/// Triangulates the strip between two rows. Entries are `(vertex, coordinate)`
/// sorted by coordinate; for cyclic rows the coordinate is a fraction of the
/// period in `[0, 1)`. Row `a` sits at the smaller transverse coordinate, so
/// the emitted triangles are counter-clockwise in `(transverse, along)`.
fn stitch(a: &[(usize, f64)], b: &[(usize, f64)], cyclic: bool, out: &mut Vec<[usize; 3]>) {
    let (na, nb) = (a.len(), b.len());
    if cyclic {
        let next = |row: &[(usize, f64)], i: usize| -> f64 {
            if i + 1 < row.len() {
                row[i + 1].1
            } else {
                row[0].1 + 1.0
            }
        };
        let (mut i, mut j) = (0, 0);
        while i < na || j < nb {
            let advance_a = j == nb || (i < na && next(a, i) <= next(b, j));
            if advance_a {
                out.push([a[i % na].0, b[j % nb].0, a[(i + 1) % na].0]);
                i += 1;
            } else {
                out.push([a[i % na].0, b[j % nb].0, b[(j + 1) % nb].0]);
                j += 1;
            }
        }
    } else {
        let (mut i, mut j) = (0, 0);
        while i + 1 < na || j + 1 < nb {
            let advance_a = j + 1 == nb || (i + 1 < na && a[i + 1].1 <= b[j + 1].1);
            if advance_a {
                out.push([a[i].0, b[j].0, a[i + 1].0]);
                i += 1;
            } else {
                out.push([a[i].0, b[j].0, b[j + 1].0]);
                j += 1;
            }
        }
    }
}

fn ring_count(circumference: f64, h: f64) -> usize {
    ((circumference / h).ceil() as usize).max(6)
}

fn check_cap(required: usize, cap: usize) -> Result<()> {
    if required > cap {
        Err(Error::Resource { required, cap })
    } else {
        Ok(())
    }
}

fn polar(spec: &ImmersionSpec, rho: f64, h: f64, cap: usize) -> Result<Layout> {
    let radii = graded_stations(|r| spec.lambda(r, 0.0).sqrt(), 0.0, rho, h * ROW_FACTOR);
    let counts: Vec<usize> = radii[1..]
        .iter()
        .map(|&r| ring_count(2.0 * PI * r * spec.lambda(r, 0.0).sqrt(), h))
        .collect();
    check_cap(1 + counts.iter().sum::<usize>(), cap)?;

    let mut params = vec![[0.0, 0.0]];
    let mut triangles = Vec::new();
    let mut prev: Vec<(usize, f64)> = Vec::new();
    for (ring, (&r, &n)) in radii[1..].iter().zip(&counts).enumerate() {
        let offset = if ring % 2 == 1 { 0.5 } else { 0.0 };
        let row: Vec<(usize, f64)> = (0..n)
            .map(|j| {
                let frac = (j as f64 + offset) / n as f64;
                let theta = 2.0 * PI * frac;
                params.push([r * theta.cos(), r * theta.sin()]);
                (params.len() - 1, frac)
            })
            .collect();
        if ring == 0 {
            for j in 0..n {
                triangles.push([0, row[j].0, row[(j + 1) % n].0]);
            }
        } else {
            stitch(&prev, &row, true, &mut triangles);
        }
        prev = row;
    }
    Ok(Layout { params, triangles, periodic_v: false })
}

/// Symmetric graded `u` stations on `[-extent, extent]` including `u = 0`.
fn symmetric_rows(extent: f64, h: f64) -> Vec<f64> {
    let half = graded_stations(|u: f64| u.cosh(), 0.0, extent, h * ROW_FACTOR);
    let mut rows: Vec<f64> = half.iter().rev().map(|u| -u).collect();
    rows.extend_from_slice(&half[1..]);
    rows
}

fn helicoid_rows(rho: f64, h: f64, cap: usize) -> Result<Layout> {
    let extent = rho.asinh().min(rho * (1.0 - 1e-9));
    let rows = symmetric_rows(extent, h);
    let shapes: Vec<(f64, usize)> = rows
        .iter()
        .map(|&u| {
            let w = (rho * rho - u * u).max(0.0).sqrt();
            let n = 2 * ((w * u.cosh() / h).ceil() as usize).max(1);
            (w, n)
        })
        .collect();
    check_cap(shapes.iter().map(|(_, n)| n + 1).sum(), cap)?;

    let mut params = Vec::new();
    let mut triangles = Vec::new();
    let mut prev: Vec<(usize, f64)> = Vec::new();
    for (i, (&u, &(w, n))) in rows.iter().zip(&shapes).enumerate() {
        let row: Vec<(usize, f64)> = (0..=n)
            .map(|j| {
                let v = if 2 * j == n { 0.0 } else { -w + 2.0 * w * j as f64 / n as f64 };
                params.push([u, v]);
                (params.len() - 1, v)
            })
            .collect();
        if i > 0 {
            stitch(&prev, &row, false, &mut triangles);
        }
        prev = row;
    }
    Ok(Layout { params, triangles, periodic_v: false })
}

fn catenoid_rows(rho: f64, h: f64, cap: usize) -> Result<Layout> {
    let rows = symmetric_rows(rho, h);
    let centre = rows.len() / 2;
    let counts: Vec<usize> = rows.iter().map(|&u| ring_count(2.0 * PI * u.cosh(), h)).collect();
    check_cap(counts.iter().sum(), cap)?;

    let mut params = Vec::new();
    let mut triangles = Vec::new();
    let mut prev: Vec<(usize, f64)> = Vec::new();
    for (i, (&u, &n)) in rows.iter().zip(&counts).enumerate() {
        let offset = if i.abs_diff(centre) % 2 == 1 { 0.5 } else { 0.0 };
        let row: Vec<(usize, f64)> = (0..n)
            .map(|j| {
                let frac = (j as f64 + offset) / n as f64;
                params.push([u, 2.0 * PI * frac]);
                (params.len() - 1, frac)
            })
            .collect();
        if i > 0 {
            stitch(&prev, &row, true, &mut triangles);
        }
        prev = row;
    }
    Ok(Layout { params, triangles, periodic_v: true })
}

pub(crate) fn build(spec: &ImmersionSpec, rho: f64, h: f64, cap: usize) -> Result<Layout> {
    let mut layout = match spec.kind() {
        SurfaceKind::Plane | SurfaceKind::Enneper => polar(spec, rho, h, cap)?,
        SurfaceKind::Helicoid => helicoid_rows(rho, h, cap)?,
        SurfaceKind::Catenoid => catenoid_rows(rho, h, cap)?,
    };
    delaunay_flip(&layout.params, &mut layout.triangles, layout.periodic_v);
    Ok(layout)
}

/// Parameter coordinates of `pts` with `v` unwrapped next to the first point.
pub(crate) fn unwrap_params<const N: usize>(params: &[[f64; 2]], pts: [usize; N], periodic: bool) -> [[f64; 2]; N] {
    let base = params[pts[0]];
    pts.map(|p| {
        let mut q = params[p];
        if periodic {
            let period = 2.0 * PI;
            let dv = q[1] - base[1];
            q[1] = base[1] + dv - period * (dv / period).round();
        }
        q
    })
}

fn cot(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    // cotangent of the angle at `a` in triangle (a, b, c)
    let (e1, e2) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
    let dot = e1[0] * e2[0] + e1[1] * e2[1];
    let cross = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
    dot / cross
}

/// Lawson flips until every interior edge satisfies `cot c + cot d >= 0`.
fn delaunay_flip(params: &[[f64; 2]], triangles: &mut [[usize; 3]], periodic: bool) {
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    let mut edges: HashMap<(usize, usize), [usize; 2]> = HashMap::with_capacity(triangles.len() * 2);
    for (t, tri) in triangles.iter().enumerate() {
        for e in 0..3 {
            edges
                .entry(key(tri[e], tri[(e + 1) % 3]))
                .and_modify(|s| s[1] = t)
                .or_insert([t, usize::MAX]);
        }
    }
    let mut stack: Vec<(usize, usize)> = edges
        .iter()
        .filter(|(_, s)| s[1] != usize::MAX)
        .map(|(k, _)| *k)
        .collect();
    stack.sort_unstable();

    let opposite = |tri: &[usize; 3], a: usize, b: usize| -> usize {
        *tri.iter().find(|&&x| x != a && x != b).unwrap()
    };
    let mut guard = 0usize;
    let limit = 50 * triangles.len() + 1000;
    while let Some((a, b)) = stack.pop() {
        guard += 1;
        if guard > limit {
            break;
        }
        let Some(&[t1, t2]) = edges.get(&(a, b)) else { continue };
        if t2 == usize::MAX {
            continue;
        }
        let c = opposite(&triangles[t1], a, b);
        let d = opposite(&triangles[t2], a, b);
        let [pa, pb, pc, pd] = unwrap_params(params, [a, b, c, d], periodic);
        let weight = cot(pc, pa, pb) + cot(pd, pa, pb);
        if weight >= -1e-12 {
            continue;
        }
        // Orient the two new triangles counter-clockwise.
        let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
            (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        };
        let new1 = if orient(pc, pd, pa) > 0.0 { [c, d, a] } else { [d, c, a] };
        let new2 = if orient(pc, pd, pb) > 0.0 { [c, d, b] } else { [d, c, b] };
        if orient(pc, pd, pa) * orient(pc, pd, pb) >= 0.0 {
            // non-convex quad; cannot happen for an illegal edge
            continue;
        }
        triangles[t1] = new1;
        triangles[t2] = new2;
        edges.remove(&(a, b));
        edges.insert(key(c, d), [t1, t2]);
        // Edges (a,c),(a,d) now belong to t1; (b,c),(b,d) to t2.
        for (x, y, new_t, old_t) in [(a, d, t1, t2), (b, c, t2, t1)] {
            if let Some(s) = edges.get_mut(&key(x, y)) {
                for slot in s.iter_mut() {
                    if *slot == old_t {
                        *slot = new_t;
                    }
                }
            }
        }
        for e in [key(a, c), key(a, d), key(b, c), key(b, d)] {
            stack.push(e);
        }
    }
}
