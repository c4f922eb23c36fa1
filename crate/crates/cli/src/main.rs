use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minlab::{Error, SurfaceKind};

mod commands;
mod config;
mod report;

use commands::Context;
use config::{Boundary, FieldSource, Radii, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    MissingInput(String),
    /// The run finished but some certificate or ratio check failed.
    ChecksFailed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::MissingInput(_) => 2,
            CliError::ChecksFailed(_) => 5,
            CliError::Lib(e) => match e {
                Error::Argument(_) | Error::Parse { .. } | Error::Io(_) => 2,
                Error::Resource { .. } => 3,
                Error::Degenerate(_) | Error::DegenerateRadius { .. } => 4,
                Error::Domain(_)
                | Error::Range(_)
                | Error::Singular(_)
                | Error::NotConverged { .. }
                | Error::Fit(_) => 5,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::MissingInput(m) => write!(f, "missing input: {m}"),
            CliError::ChecksFailed(m) => write!(f, "checks failed: {m}"),
        }
    }
}

/// Harmonic functions on minimal surfaces: meshes, solves and decay checks.
#[derive(Parser)]
#[command(name = "minlab", version)]
struct Cli {
    /// Worker threads for parallel radii and levels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the patch and write `mesh.minlab`.
    Mesh(RunArgs),
    /// Evaluate or solve the configured field and write `field.minlab`.
    Solve(RunArgs),
    /// Area of the ball components over the radius schedule.
    AreaGrowth(RunArgs),
    /// One-sided oscillation decay curve.
    OscDecay(RunArgs),
    /// Decay curve plus the full certificate at every radius with `2r <= R`.
    Certify(RunArgs),
    /// Power-law against logarithmic fit of the two-sided oscillation.
    GrowthFit(RunArgs),
    /// Hölder exponent from sampled pairs, plus mean-value ratios.
    Holder(RunArgs),
    /// Nodal length through the root and a coarea check.
    Nodal(RunArgs),
    /// Cone containment constant for each configured alpha.
    ConeProfile(RunArgs),
    /// Merge the JSON reports of an output directory into `summary.csv`.
    Report {
        /// Directory holding earlier run outputs.
        #[arg(long, env = "MINLAB_DIR", default_value = "minlab-out")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use this mesh file instead of building one.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Read the field from this file (sets the field source to `file`).
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long, env = "MINLAB_DIR")]
    out_dir: Option<PathBuf>,

    /// plane, enneper, helicoid or catenoid
    #[arg(long)]
    surface: Option<SurfaceKind>,
    #[arg(long)]
    order: Option<u32>,
    /// Ambient radius the patch must cover.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    target_h: Option<f64>,
    #[arg(long)]
    max_vertices: Option<usize>,

    /// Explicit radius schedule, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["radii_base", "radii_count"])]
    radii: Option<Vec<f64>>,
    #[arg(long, requires = "radii_count")]
    radii_base: Option<f64>,
    #[arg(long, requires = "radii_base")]
    radii_count: Option<usize>,

    /// Ambient coordinate field x1, x2 or x3.
    #[arg(long, value_parser = ["x1", "x2", "x3"], conflicts_with_all = ["parameter", "boundary", "field"])]
    coordinate: Option<String>,
    /// Pulled-back parameter coordinate u or v.
    #[arg(long, value_parser = ["u", "v"], conflicts_with_all = ["boundary", "field"])]
    parameter: Option<String>,
    /// Solve the Dirichlet problem on the radius-R component with this
    /// boundary data: x1, x2, x3, u, v or random:<seed>.
    #[arg(long, conflicts_with = "field")]
    boundary: Option<String>,

    /// Area constant; measured over the schedule when omitted.
    #[arg(long)]
    c_a: Option<f64>,
    /// Levels for the coarea check.
    #[arg(long)]
    levels: Option<usize>,
    /// Sample pairs per Hölder scale.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    holder_r: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    holder_s: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
}

impl RunArgs {
    fn context(self) -> Result<Context, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::MissingInput(format!("{}: {e}", path.display())))?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(kind) = self.surface {
            cfg.kind = kind;
            cfg.order = if kind == SurfaceKind::Enneper { Some(1) } else { None };
        }
        if self.order.is_some() {
            cfg.order = self.order;
        }
        cfg.radius = self.radius.unwrap_or(cfg.radius);
        cfg.target_h = self.target_h.unwrap_or(cfg.target_h);
        cfg.max_vertices = self.max_vertices.unwrap_or(cfg.max_vertices);
        if let Some(list) = self.radii {
            cfg.radii = Some(Radii::List(list));
        }
        if let (Some(base), Some(count)) = (self.radii_base, self.radii_count) {
            cfg.radii = Some(Radii::Dyadic { base, count });
        }
        if let Some(c) = &self.coordinate {
            cfg.field = FieldSource::Coordinate(c[1..].parse().expect("clap restricts the values"));
        }
        if let Some(p) = &self.parameter {
            cfg.field = FieldSource::Parameter(u8::from(p == "v"));
        }
        if let Some(b) = &self.boundary {
            cfg.field = FieldSource::Dirichlet(b.parse::<Boundary>()?);
        }
        if let Some(path) = self.field {
            cfg.field = FieldSource::File(path);
        }
        cfg.c_a = self.c_a.or(cfg.c_a);
        cfg.levels = self.levels.unwrap_or(cfg.levels);
        cfg.pairs = self.pairs.unwrap_or(cfg.pairs);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.holder_r = self.holder_r.or(cfg.holder_r);
        cfg.holder_s = self.holder_s.unwrap_or(cfg.holder_s);
        cfg.alphas = self.alphas.unwrap_or(cfg.alphas);
        if let Some(dir) = self.out_dir {
            cfg.output = dir;
        }
        cfg.validate()?;
        Ok(Context { out_dir: cfg.output.clone(), config: cfg, mesh_path: self.mesh })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Report { out_dir } => {
            let rows = report::summarize(&out_dir)?;
            let width = rows.iter().map(|r| r.source.len()).max().unwrap_or(0);
            for row in &rows {
                println!("{:width$}  {}", row.source, row.line());
            }
            Ok(())
        }
        Command::Mesh(a) => commands::mesh(&a.context()?),
        Command::Solve(a) => commands::solve(&a.context()?),
        Command::AreaGrowth(a) => commands::area_growth(&a.context()?),
        Command::OscDecay(a) => commands::osc_decay(&a.context()?),
        Command::Certify(a) => commands::certify(&a.context()?),
        Command::GrowthFit(a) => commands::growth_fit(&a.context()?),
        Command::Holder(a) => commands::holder(&a.context()?),
        Command::Nodal(a) => commands::nodal(&a.context()?),
        Command::ConeProfile(a) => commands::cone_profile(&a.context()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("minlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
