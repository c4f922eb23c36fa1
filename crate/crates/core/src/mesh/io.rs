//! `minlab-mesh v1` text format.
//!
//! ```text
//! minlab-mesh v1 <kind> <order> <periodic_v>
//! v <u> <v> <x> <y> <z> <lambda>
//! ...
//! t <i> <j> <k>
//! ...
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so a write/read cycle is
//! exact. `order` is 0 for every kind except Enneper. Triangle indices are
//! 0-based.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::SurfaceMesh;
use crate::error::{Error, Result};
use crate::surfaces::{ImmersionSpec, SurfaceKind, Vec3};

pub const MESH_MAGIC: &str = "minlab-mesh";

pub fn write_mesh<W: Write>(mesh: &SurfaceMesh, mut out: W) -> Result<()> {
    let mut buf = String::with_capacity(64 * mesh.vertex_count());
    let spec = mesh.spec();
    writeln!(
        buf,
        "{MESH_MAGIC} v1 {} {} {}",
        spec.kind(),
        spec.order().unwrap_or(0),
        mesh.periodic_v()
    )
    .unwrap();
    for ((p, x), l) in mesh.params().iter().zip(mesh.positions()).zip(mesh.lambdas()) {
        writeln!(buf, "v {} {} {} {} {} {}", p[0], p[1], x.x, x.y, x.z, l).unwrap();
    }
    for t in mesh.triangles() {
        writeln!(buf, "t {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse { line, message: format!("missing {what}") })?
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("bad {what}") })
}

/// Reads a mesh. `target_h` is not stored in the file; it is restored as the
/// mean ambient edge length.
pub fn read_mesh<R: BufRead>(input: R) -> Result<SurfaceMesh> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty file".into() })?;
    let header = header?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some(MESH_MAGIC) || tok.next() != Some("v1") {
        return Err(Error::Parse { line: 1, message: format!("not a {MESH_MAGIC} v1 header") });
    }
    let kind: SurfaceKind = parse(tok.next(), 1, "kind")?;
    let order: u32 = parse(tok.next(), 1, "order")?;
    let periodic: bool = parse(tok.next(), 1, "periodic flag")?;
    let spec = ImmersionSpec::new(kind, (kind == SurfaceKind::Enneper).then_some(order))?;

    let (mut params, mut positions, mut lambdas, mut triangles) = (vec![], vec![], vec![], vec![]);
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut f = [0.0; 6];
                for (k, slot) in f.iter_mut().enumerate() {
                    *slot = parse(tok.next(), lineno, &format!("vertex field {k}"))?;
                }
                params.push([f[0], f[1]]);
                positions.push(Vec3::new(f[2], f[3], f[4]));
                lambdas.push(f[5]);
            }
            Some("t") => {
                let mut t = [0usize; 3];
                for (k, slot) in t.iter_mut().enumerate() {
                    *slot = parse(tok.next(), lineno, &format!("triangle index {k}"))?;
                }
                triangles.push(t);
            }
            None => {}
            Some(other) => {
                return Err(Error::Parse { line: lineno, message: format!("unknown record `{other}`") })
            }
        }
    }
    let mut mesh = SurfaceMesh::from_parts(spec, 1.0, periodic, params, positions, lambdas, triangles)?;
    mesh.target_h = mesh.edge_length_stats().mean;
    Ok(mesh)
}
