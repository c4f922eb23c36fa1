use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use minlab::analysis::{
    cone_containment_profile, decay_certificate, decay_curve, growth_exponent, holder_estimate, liouville_threshold,
    mean_value_ratio, discretization_slack, RatioStatus,
};
use minlab::harmonic::io::{read_field, write_field};
use minlab::harmonic::{coarea_check, dirichlet_energy, level_set, nodal_length, solve_dirichlet, ScalarField};
use minlab::mesh::io::{read_mesh, write_mesh};
use minlab::mesh::{area_growth_fit, triangulate_with_cap};
use minlab::surfaces::param_radius_for_ball;
use minlab::{BallComponent, Error, SurfaceMesh};

use crate::config::{Boundary, FieldSource, RunConfig};
use crate::CliError;

/// Inputs resolved for one run.
pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub mesh_path: Option<PathBuf>,
}

struct Loaded {
    mesh: SurfaceMesh,
    root: usize,
}

#[derive(Serialize)]
struct Header<'a> {
    command: &'a str,
    surface: String,
    order: Option<u32>,
    field: String,
    patch_radius: f64,
    target_h: f64,
    vertices: usize,
    triangles: usize,
}

impl Context {
    fn load_mesh(&self) -> Result<Loaded, CliError> {
        let mesh = match &self.mesh_path {
            Some(path) => read_mesh(BufReader::new(open(path)?))?,
            None => {
                let spec = self.config.spec()?;
                let rho = param_radius_for_ball(&spec, self.config.radius)?;
                triangulate_with_cap(&spec, rho, self.config.target_h, self.config.max_vertices)?
            }
        };
        let root = mesh.vertex_at_param(0.0, 0.0);
        Ok(Loaded { mesh, root })
    }

    /// The configured field. Dirichlet problems are solved on the component
    /// of radius `R` and are absent outside it.
    fn load_field(&self, m: &Loaded) -> Result<(ScalarField, Option<Value>), CliError> {
        let mesh = &m.mesh;
        Ok(match &self.config.field {
            FieldSource::Coordinate(i) => (ScalarField::coordinate(mesh, *i as usize - 1), None),
            FieldSource::Parameter(i) => (ScalarField::parameter(mesh, *i as usize), None),
            FieldSource::File(path) => (read_field(BufReader::new(open(path)?), Some(mesh.vertex_count()))?, None),
            FieldSource::Dirichlet(b) => {
                let data = match b {
                    Boundary::Coordinate(i) => ScalarField::coordinate(mesh, *i as usize - 1),
                    Boundary::Parameter(i) => ScalarField::parameter(mesh, *i as usize),
                    Boundary::Random(seed) => ScalarField::random_boundary(mesh, *seed),
                };
                let domain = BallComponent::new(mesh, m.root, self.config.radius)?;
                let (u, stats) = solve_dirichlet(mesh, &domain, &data)?;
                let info = json!({
                    "boundary": b.to_string(),
                    "interior_vertices": domain.interior_vertices().len(),
                    "boundary_vertices": domain.boundary_vertices().len(),
                    "iterations": stats.iterations,
                    "relative_residual": stats.relative_residual,
                    "energy": dirichlet_energy(mesh, &u, domain.triangles()),
                });
                (u, Some(info))
            }
        })
    }

    fn header<'a>(&self, command: &'a str, m: &Loaded) -> Header<'a> {
        let spec = m.mesh.spec();
        Header {
            command,
            surface: spec.kind().to_string(),
            order: spec.order(),
            field: self.config.field.label(),
            patch_radius: self.config.radius,
            target_h: m.mesh.target_h(),
            vertices: m.mesh.vertex_count(),
            triangles: m.mesh.triangle_count(),
        }
    }

    fn write_report(&self, command: &str, m: &Loaded, result: Value) -> Result<(), CliError> {
        let mut report = serde_json::to_value(self.header(command, m)).expect("header serializes");
        report["result"] = result;
        let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        self.write_text(&format!("{command}.json"), &text)
    }

    fn write_text(&self, name: &str, text: &str) -> Result<(), CliError> {
        fs::write(self.out_dir.join(name), text).map_err(|e| CliError::from(Error::from(e)))
    }

    fn prepare(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.out_dir).map_err(Error::from)?;
        self.write_text("run.conf", &self.config.render())
    }
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::MissingInput(format!("{}: {e}", path.display())))
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Radii `r` of the schedule whose doubled ball `2r` still fits the patch.
fn certifiable(cfg: &RunConfig) -> Vec<f64> {
    cfg.radii_values().into_iter().filter(|&r| 2.0 * r <= cfg.radius).collect()
}

/// Area constant: the configured value, or `max area(r) / r^2` over the
/// schedule.
fn area_constant(cfg: &RunConfig, m: &Loaded) -> Result<f64, CliError> {
    if let Some(c) = cfg.c_a {
        return Ok(c);
    }
    let ratios = cfg
        .radii_values()
        .par_iter()
        .map(|&r| BallComponent::new(&m.mesh, m.root, r).map(|c| c.area(&m.mesh) / (r * r)))
        .collect::<Result<Vec<f64>, Error>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

pub fn mesh(ctx: &Context) -> Result<(), CliError> {
    ctx.prepare()?;
    let m = ctx.load_mesh()?;
    let mesh = &m.mesh;
    let (conformal, minimal) = mesh.max_defects();
    let edges = mesh.edge_length_stats();
    let chi = mesh.euler_characteristic();
    let periodic = mesh.periodic_v();
    write_mesh(mesh, BufWriter::new(File::create(ctx.out_dir.join("mesh.minlab")).map_err(Error::from)?))?;
    println!("surface {}", mesh.spec());
    println!("vertices {}", mesh.vertex_count());
    println!("triangles {}", mesh.triangle_count());
    println!("max conformal defect {conformal:e}");
    println!("max minimality defect {minimal:e}");
    println!("euler characteristic {chi}");
    println!("periodic {periodic}");
    ctx.write_report(
        "mesh",
        &m,
        json!({
            "max_conformal_defect": conformal,
            "max_minimality_defect": minimal,
            "euler_characteristic": chi,
            "periodic": periodic,
            "edge_lengths": edges,
        }),
    )
}

pub fn solve(ctx: &Context) -> Result<(), CliError> {
    ctx.prepare()?;
    let m = ctx.load_mesh()?;
    let (field, info) = ctx.load_field(&m)?;
    write_field(&field, BufWriter::new(File::create(ctx.out_dir.join("field.minlab")).map_err(Error::from)?))?;
    let present: Vec<f64> = field.values().iter().copied().filter(|x| !x.is_nan()).collect();
    let min = present.iter().copied().fold(f64::INFINITY, f64::min);
    let max = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("field {} on {} of {} vertices, range [{min}, {max}]", ctx.config.field.label(), present.len(), field.len());
    if let Some(info) = &info {
        println!("cg iterations {}, relative residual {:e}", info["iterations"], info["relative_residual"].as_f64().unwrap_or(f64::NAN));
    }
    ctx.write_report("solve", &m, json!({ "defined_vertices": present.len(), "min": min, "max": max, "dirichlet": info }))
}

pub fn area_growth(ctx: &Context) -> Result<(), CliError> {
    ctx.prepare()?;
    let m = ctx.load_mesh()?;
    let fit = area_growth_fit(&m.mesh, m.root, &ctx.config.radii_values())?;
    println!("area exponent {:.4}, C_a {:.4} (C_a/pi {:.4})", fit.exponent, fit.c_a, fit.c_a / std::f64::consts::PI);
    let euler: Vec<i64> = fit
        .radii
        .iter()
        .map(|&r| BallComponent::new(&m.mesh, m.root, r).map(|c| c.euler_characteristic(&m.mesh)))
        .collect::<Result<_, _>>()?;
    ctx.write_text(
        "area-growth.csv",
        &csv(
            "radius,area,area_over_r2",
            fit.radii.iter().zip(&fit.areas).map(|(r, a)| format!("{r},{a},{}", a / (r * r))),
        ),
    )?;
    ctx.write_report("area-growth", &m, json!({ "fit": fit, "euler_characteristic": euler }))
}

pub fn osc_decay(ctx: &Context) -> Result<(), CliError> {
    ctx.prepare()?;
    let m = ctx.load_mesh()?;
    let (field, _) = ctx.load_field(&m)?;
    let c_a = area_constant(&ctx.config, &m)?;
    let bound = liouville_threshold(c_a)?;
    let curve = decay_curve(&m.mesh, &field, m.root, &ctx.config.radii_values(), &bound)?;
    for d in &curve.ratios {
        println!("r {} -> {}: ratio {} ({:?})", d.radius, d.outer_radius, opt(d.ratio), d.status);
    }
    ctx.write_text("osc-decay.csv", &curve.to_csv())?;
    ctx.write_report(
        "osc-decay",
        &m,
        json!({
            "bound": bound,
            "curve": curve,
            "a_k": curve.a_k(),
            "monotone": curve.is_monotone(),
            "failures": curve.failures(),
        }),
    )
}

pub fn certify(ctx: &Context) -> Result<(), CliError> {
    ctx.prepare()?;
    let m = ctx.load_mesh()?;
    let (field, _) = ctx.load_field(&m)?;
    let c_a = area_constant(&ctx.config, &m)?;
    let bound = liouville_threshold(c_a)?;
    let curve = decay_curve(&m.mesh, &field, m.root, &ctx.config.radii_values(), &bound)?;
    let radii = certifiable(&ctx.config);
    if radii.is_empty() {
        return Err(Error::Argument(format!("no schedule radius r has 2r <= {}", ctx.config.radius)).into());
    }
    let certs: Vec<Result<_, Error>> =
        radii.par_iter().map(|&r| decay_certificate(&m.mesh, &field, m.root, r, c_a)).collect();

    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let (mut failed, mut degenerate) = (0usize, 0usize);
    for (&r, cert) in radii.iter().zip(certs) {
        match cert {
            Ok(c) => {
                let pass = c.passed();
                failed += usize::from(!pass);
                println!(
                    "r {r}: energy {} / {} | M {} / {} | level {} / {} | ratio {} -> {}",
                    c.energy, c.energy_bound, c.m, c.m_bound, c.min_level_length, c.level_length_bound, c.ratio,
                    if pass { "pass" } else { "FAIL" }
                );
                rows.push(format!(
                    "{r},{},{},{},{},{},{},{},{pass}",
                    c.energy, c.energy_bound, c.m, c.m_bound, c.min_level_length, c.level_length_bound, c.ratio
                ));
                entries.push(json!({ "radius": r, "status": if pass { "pass" } else { "fail" }, "certificate": c }));
            }
            Err(e @ (Error::Degenerate(_) | Error::DegenerateRadius { .. })) => {
                degenerate += 1;
                println!("r {r}: degenerate ({e})");
                rows.push(format!("{r},,,,,,,,degenerate"));
                entries.push(json!({ "radius": r, "status": "degenerate", "reason": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let ratio_failures = curve.failures();
    for d in curve.ratios.iter().filter(|d| d.status == RatioStatus::Fail) {
        println!("ratio r {} -> {}: {} exceeds {}", d.radius, d.outer_radius, opt(d.ratio), d.bound);
    }
    let all_degenerate = degenerate == radii.len() && curve.all_degenerate();
    let passed = !all_degenerate && failed == 0 && ratio_failures == 0;
    ctx.write_text(
        "certify.csv",
        &csv("radius,energy,energy_bound,m,m_bound,min_level_length,level_length_bound,ratio,pass", rows),
    )?;
    ctx.write_report(
        "certify",
        &m,
        json!({
            "c_a": c_a,
            "bound": bound,
            "curve": curve,
            "certificates": entries,
            "certificate_failures": failed,
            "ratio_failures": ratio_failures,
            "degenerate": degenerate,
            "passed": passed,
        }),
    )?;
    if all_degenerate {
        return Err(Error::Degenerate("field has zero one-sided oscillation at every radius".into()).into());
    }
    if !passed {
        return Err(CliError::ChecksFailed(format!(
            "{failed} certificate(s) and {ratio_failures} ratio(s) failed"
        )));
    }
    println!("all non-degenerate checks pass");
    Ok(())
}

pub fn growth_fit(ctx: &Context) -> Result<(), CliError> {
    ctx.prepare()?;
    let m = ctx.load_mesh()?;
    let (field, _) = ctx.load_field(&m)?;
    let fit = growth_exponent(&m.mesh, &field, m.root, &ctx.config.radii_values())?;
    println!(
        "alpha {:.4} (power residual {:.3e}), log residual {:.3e}, preferred {:?}",
        fit.alpha, fit.power_residual, fit.log_residual, fit.preferred
    );
    ctx.write_text(
        "growth-fit.csv",
        &csv("radius,osc2", fit.radii.iter().zip(&fit.osc2).map(|(r, o)| format!("{r},{o}"))),
    )?;
    ctx.write_report("growth-fit", &m, json!({ "fit": fit }))
}

pub fn holder(ctx: &Context) -> Result<(), CliError> {
    ctx.prepare()?;
    let cfg = &ctx.config;
    let m = ctx.load_mesh()?;
    let (field, _) = ctx.load_field(&m)?;
    let r = cfg.holder_r.unwrap_or(cfg.radius / 2.0);
    let s: Vec<f64> = if cfg.holder_s.is_empty() {
        cfg.radii_values().into_iter().filter(|&s| s < r).collect()
    } else {
        cfg.holder_s.clone()
    };
    let fit = holder_estimate(&m.mesh, &field, r, &s, cfg.pairs, cfg.seed)?;
    let mean_value = certifiable(cfg)
        .into_iter()
        .map(|r| match mean_value_ratio(&m.mesh, &field, m.root, r) {
            Ok(q) => Ok(json!({ "radius": r, "ratio": q })),
            Err(Error::Degenerate(_)) => Ok(json!({ "radius": r, "ratio": null })),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>, _>>()?;
    match fit.alpha {
        Some(a) => println!("holder alpha {a:.4}, C {}", opt(fit.c)),
        None => println!("holder alpha undefined (all sampled differences vanish)"),
    }
    ctx.write_text(
        "holder.csv",
        &csv("s,max_difference", fit.s.iter().zip(&fit.max_difference).map(|(s, d)| format!("{s},{d}"))),
    )?;
    ctx.write_report("holder", &m, json!({ "fit": fit, "pairs": cfg.pairs, "seed": cfg.seed, "mean_value": mean_value }))
}

pub fn nodal(ctx: &Context) -> Result<(), CliError> {
    ctx.prepare()?;
    let cfg = &ctx.config;
    let m = ctx.load_mesh()?;
    let (field, _) = ctx.load_field(&m)?;
    // level through the root, so the zero set passes through the centre
    let u0 = field.values()[m.root];
    let shifted = field.map(|x| x - u0);
    let radii = cfg.radii_values();
    let lengths = radii
        .par_iter()
        .map(|&r| BallComponent::new(&m.mesh, m.root, r).map(|c| nodal_length(&m.mesh, &shifted, &c)))
        .collect::<Result<Vec<f64>, Error>>()?;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for (&r, &len) in radii.iter().zip(&lengths) {
        let bound = 0.5 * r * (1.0 - discretization_slack(&m.mesh, r));
        println!("r {r}: nodal length {len} (bound {bound})");
        rows.push(format!("{r},{len},{bound}"));
        entries.push(json!({ "radius": r, "length": len, "bound": bound, "pass": len >= bound }));
    }
    let outer = BallComponent::new(&m.mesh, m.root, *radii.last().expect("schedule is non-empty"))?;
    ctx.write_text("nodal.csv", &csv("radius,length,bound", rows))?;
    ctx.write_text("nodal-segments.csv", &level_set(&m.mesh, &shifted, 0.0, &outer).to_csv())?;
    let coarea = match coarea_check(&m.mesh, &field, &outer, cfg.levels) {
        Ok(c) => {
            println!("coarea relative error {:.3e} at {} levels", c.relative_error, c.n_levels);
            serde_json::to_value(c).expect("coarea serializes")
        }
        Err(Error::Degenerate(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    ctx.write_report("nodal", &m, json!({ "level": u0, "radii": entries, "coarea": coarea }))
}

pub fn cone_profile(ctx: &Context) -> Result<(), CliError> {
    ctx.prepare()?;
    let m = ctx.load_mesh()?;
    if ctx.config.alphas.is_empty() {
        return Err(Error::Argument("no alphas configured".into()).into());
    }
    let profiles = ctx
        .config
        .alphas
        .iter()
        .map(|&a| cone_containment_profile(&m.mesh, a))
        .collect::<Result<Vec<_>, _>>()?;
    for p in &profiles {
        println!("alpha {}: C {} at vertex {}", p.alpha, p.c, p.vertex);
    }
    ctx.write_text(
        "cone-profile.csv",
        &csv("alpha,c", profiles.iter().map(|p| format!("{},{}", p.alpha, p.c))),
    )?;
    ctx.write_report("cone-profile", &m, json!({ "profiles": profiles }))
}
