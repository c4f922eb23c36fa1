//! Run configuration: flat `key = value` lines grouped under `[section]`
//! headers. `#` starts a comment. Floats are written with shortest
//! round-trip formatting so `parse(render(c)) == c`.
//!
//! ```text
//! [surface]
//! kind = enneper
//! order = 1
//!
//! [mesh]
//! radius = 64
//! target_h = 0.2
//!
//! [radii]
//! base = 4
//! count = 5
//!
//! [field]
//! source = coordinate
//! index = 3
//! ```

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use minlab::mesh::{dyadic_radii, DEFAULT_VERTEX_CAP};
use minlab::{Error, ImmersionSpec, Result, SurfaceKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Radii {
    List(Vec<f64>),
    Dyadic { base: f64, count: usize },
}

impl Radii {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Radii::List(r) => r.clone(),
            Radii::Dyadic { base, count } => dyadic_radii(*base, *count),
        }
    }
}

/// Named boundary data for Dirichlet problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Ambient coordinate `x_1..x_3`.
    Coordinate(u8),
    /// Parameter coordinate, 0 for `u` and 1 for `v`.
    Parameter(u8),
    /// Seeded trigonometric polynomial in the parameter angle.
    Random(u64),
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Coordinate(i) => write!(f, "x{i}"),
            Boundary::Parameter(0) => write!(f, "u"),
            Boundary::Parameter(_) => write!(f, "v"),
            Boundary::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x1" => Ok(Boundary::Coordinate(1)),
            "x2" => Ok(Boundary::Coordinate(2)),
            "x3" => Ok(Boundary::Coordinate(3)),
            "u" => Ok(Boundary::Parameter(0)),
            "v" => Ok(Boundary::Parameter(1)),
            _ => s
                .strip_prefix("random:")
                .and_then(|n| n.parse().ok())
                .map(Boundary::Random)
                .ok_or_else(|| Error::Argument(format!("unknown boundary data `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldSource {
    Coordinate(u8),
    Parameter(u8),
    Dirichlet(Boundary),
    File(PathBuf),
}

impl FieldSource {
    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            FieldSource::Coordinate(i) => format!("x{i}"),
            FieldSource::Parameter(i) => Boundary::Parameter(*i).to_string(),
            FieldSource::Dirichlet(b) => format!("dirichlet({b})"),
            FieldSource::File(p) => format!("file:{}", p.file_stem().unwrap_or_default().to_string_lossy()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: SurfaceKind,
    pub order: Option<u32>,
    /// Ambient radius the patch must cover.
    pub radius: f64,
    pub target_h: f64,
    pub max_vertices: usize,
    /// `None` means the dyadic schedule `R/16, R/8, ..., R`.
    pub radii: Option<Radii>,
    pub field: FieldSource,
    /// Overrides the measured area constant when set.
    pub c_a: Option<f64>,
    pub levels: usize,
    pub pairs: usize,
    pub seed: u64,
    /// Outer radius for the Hölder fit; defaults to the largest radius.
    pub holder_r: Option<f64>,
    pub holder_s: Vec<f64>,
    pub alphas: Vec<f64>,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kind: SurfaceKind::Enneper,
            order: Some(1),
            radius: 64.0,
            target_h: 0.2,
            max_vertices: DEFAULT_VERTEX_CAP,
            radii: None,
            field: FieldSource::Coordinate(3),
            c_a: None,
            levels: 128,
            pairs: 4096,
            seed: 0,
            holder_r: None,
            holder_s: Vec::new(),
            alphas: vec![0.5, 0.8],
            output: PathBuf::from("minlab-out"),
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn parse_list(value: &str, line: usize) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Parse { line, message: format!("bad number `{}`", t.trim()) }))
        .collect()
}

fn parse_value<T: FromStr>(value: &str, line: usize, key: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse { line, message: format!("bad value `{value}` for `{key}`") })
}

impl RunConfig {
    pub fn spec(&self) -> Result<ImmersionSpec> {
        ImmersionSpec::new(self.kind, self.order)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let w = &mut s;
        writeln!(w, "[surface]\nkind = {}", self.kind).unwrap();
        if let Some(k) = self.order {
            writeln!(w, "order = {k}").unwrap();
        }
        writeln!(w, "\n[mesh]\nradius = {}\ntarget_h = {}\nmax_vertices = {}", self.radius, self.target_h, self.max_vertices)
            .unwrap();
        match &self.radii {
            Some(Radii::List(r)) => writeln!(w, "\n[radii]\nlist = {}", join(r)).unwrap(),
            Some(Radii::Dyadic { base, count }) => writeln!(w, "\n[radii]\nbase = {base}\ncount = {count}").unwrap(),
            None => {}
        }
        writeln!(w, "\n[field]").unwrap();
        match &self.field {
            FieldSource::Coordinate(i) => writeln!(w, "source = coordinate\nindex = {i}").unwrap(),
            FieldSource::Parameter(i) => writeln!(w, "source = parameter\nindex = {}", Boundary::Parameter(*i)).unwrap(),
            FieldSource::Dirichlet(b) => writeln!(w, "source = dirichlet\nboundary = {b}").unwrap(),
            FieldSource::File(p) => writeln!(w, "source = file\npath = {}", p.display()).unwrap(),
        }
        writeln!(w, "\n[analysis]").unwrap();
        if let Some(c) = self.c_a {
            writeln!(w, "c_a = {c}").unwrap();
        }
        writeln!(w, "levels = {}\npairs = {}\nseed = {}", self.levels, self.pairs, self.seed).unwrap();
        if let Some(r) = self.holder_r {
            writeln!(w, "holder_r = {r}").unwrap();
        }
        writeln!(w, "holder_s = {}\nalphas = {}", join(&self.holder_s), join(&self.alphas)).unwrap();
        writeln!(w, "\n[output]\ndir = {}", self.output.display()).unwrap();
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig { order: None, ..RunConfig::default() };
        let mut section = String::new();
        let (mut list, mut base, mut count) = (None, None, None);
        let (mut source, mut index, mut boundary, mut path) = (None, None, None, None);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|c| c.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Parse { line, message: format!("expected `key = value`, got `{content}`") })?;
            match (section.as_str(), key) {
                ("surface", "kind") => cfg.kind = parse_value(value, line, key)?,
                ("surface", "order") => cfg.order = Some(parse_value(value, line, key)?),
                ("mesh", "radius") => cfg.radius = parse_value(value, line, key)?,
                ("mesh", "target_h") => cfg.target_h = parse_value(value, line, key)?,
                ("mesh", "max_vertices") => cfg.max_vertices = parse_value(value, line, key)?,
                ("radii", "list") => list = Some(parse_list(value, line)?),
                ("radii", "base") => base = Some(parse_value(value, line, key)?),
                ("radii", "count") => count = Some(parse_value(value, line, key)?),
                ("field", "source") => source = Some(value.to_string()),
                ("field", "index") => index = Some(value.to_string()),
                ("field", "boundary") => boundary = Some(value.parse::<Boundary>()?),
                ("field", "path") => path = Some(PathBuf::from(value)),
                ("analysis", "c_a") => cfg.c_a = Some(parse_value(value, line, key)?),
                ("analysis", "levels") => cfg.levels = parse_value(value, line, key)?,
                ("analysis", "pairs") => cfg.pairs = parse_value(value, line, key)?,
                ("analysis", "seed") => cfg.seed = parse_value(value, line, key)?,
                ("analysis", "holder_r") => cfg.holder_r = Some(parse_value(value, line, key)?),
                ("analysis", "holder_s") => cfg.holder_s = parse_list(value, line)?,
                ("analysis", "alphas") => cfg.alphas = parse_list(value, line)?,
                ("output", "dir") => cfg.output = PathBuf::from(value),
                _ => return Err(Error::Parse { line, message: format!("unknown key `{key}` in section [{section}]") }),
            }
        }
        if cfg.kind == SurfaceKind::Enneper && cfg.order.is_none() {
            cfg.order = Some(1);
        }
        cfg.radii = match (list, base, count) {
            (Some(l), None, None) => Some(Radii::List(l)),
            (None, Some(b), Some(c)) => Some(Radii::Dyadic { base: b, count: c }),
            (None, None, None) => None,
            _ => return Err(Error::Argument("[radii] needs either `list` or both `base` and `count`".into())),
        };
        cfg.field = match source.as_deref().unwrap_or("coordinate") {
            "coordinate" => {
                let i = index.as_deref().unwrap_or("3");
                FieldSource::Coordinate(match i {
                    "1" | "x1" => 1,
                    "2" | "x2" => 2,
                    "3" | "x3" => 3,
                    _ => return Err(Error::Argument(format!("coordinate index must be 1, 2 or 3, got `{i}`"))),
                })
            }
            "parameter" => FieldSource::Parameter(match index.as_deref().unwrap_or("u") {
                "u" | "0" => 0,
                "v" | "1" => 1,
                other => return Err(Error::Argument(format!("parameter index must be u or v, got `{other}`"))),
            }),
            "dirichlet" => FieldSource::Dirichlet(
                boundary.ok_or_else(|| Error::Argument("dirichlet field needs `boundary`".into()))?,
            ),
            "file" => FieldSource::File(path.ok_or_else(|| Error::Argument("file field needs `path`".into()))?),
            other => return Err(Error::Argument(format!("unknown field source `{other}`"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Argument(format!("{name} must be positive, got {x}")))
            }
        };
        positive("radius", self.radius)?;
        positive("target_h", self.target_h)?;
        if self.max_vertices == 0 || self.levels == 0 || self.pairs == 0 {
            return Err(Error::Argument("max_vertices, levels and pairs must be positive".into()));
        }
        if let Some(Radii::Dyadic { base, count }) = self.radii {
            positive("radii base", base)?;
            if count == 0 {
                return Err(Error::Argument("radii count must be positive".into()));
            }
        }
        let radii = self.radii_values();
        if radii.is_empty() {
            return Err(Error::Argument("radius schedule is empty".into()));
        }
        for &r in &radii {
            positive("radius in schedule", r)?;
            if r > self.radius {
                return Err(Error::Argument(format!("schedule radius {r} exceeds the patch radius {}", self.radius)));
            }
        }
        if let Some(c) = self.c_a {
            positive("c_a", c)?;
        }
        if let Some(r) = self.holder_r {
            positive("holder_r", r)?;
        }
        for &x in self.holder_s.iter().chain(&self.alphas) {
            positive("holder_s and alphas entries", x)?;
        }
        Ok(())
    }

    pub fn radii_values(&self) -> Vec<f64> {
        match &self.radii {
            Some(r) => r.values(),
            None => dyadic_radii(self.radius / 16.0, 5),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.render()).unwrap(), c);
    }

    #[test]
    fn every_variant_round_trips() {
        let variants = [
            RunConfig {
                kind: SurfaceKind::Helicoid,
                order: None,
                radii: Some(Radii::List(vec![0.1, 1.0 / 3.0, 7.5])),
                field: FieldSource::Dirichlet(Boundary::Random(u64::MAX)),
                c_a: Some(std::f64::consts::PI * 3.2),
                holder_r: Some(64.0),
                holder_s: vec![4.0, 8.0],
                alphas: vec![],
                ..RunConfig::default()
            },
            RunConfig { kind: SurfaceKind::Catenoid, order: None, field: FieldSource::Parameter(1), ..RunConfig::default() },
            RunConfig {
                kind: SurfaceKind::Plane,
                order: None,
                field: FieldSource::File(PathBuf::from("out/field.minlab")),
                ..RunConfig::default()
            },
            RunConfig { order: Some(3), radii: Some(Radii::Dyadic { base: 2.0, count: 6 }), field: FieldSource::Dirichlet(Boundary::Coordinate(2)), ..RunConfig::default() },
        ];
        for c in variants {
            let text = c.render();
            assert_eq!(RunConfig::parse(&text).unwrap(), c, "{text}");
        }
    }

    #[test]
    fn rejects_invalid() {
        assert!(RunConfig::parse("[mesh]\nradius = -1\n").is_err());
        assert!(RunConfig::parse("[mesh]\nradius = 8\n[radii]\nlist = 4, 16\n").is_err());
        assert!(RunConfig::parse("[surface]\nkind = plane\norder = 2\n").is_err());
        assert!(matches!(RunConfig::parse("[mesh]\ncolour = red\n"), Err(Error::Parse { line: 2, .. })));
        assert!(RunConfig::parse("[radii]\nbase = 1\n").is_err());
    }

    #[test]
    fn comments_and_defaults() {
        let c = RunConfig::parse("# plane run\n[surface]\nkind = plane # flat\n[mesh]\nradius = 32\n").unwrap();
        assert_eq!(c.kind, SurfaceKind::Plane);
        assert_eq!(c.order, None);
        assert_eq!(c.radii_values(), vec![2.0, 4.0, 8.0, 16.0, 32.0]);
        assert_eq!(c.field, FieldSource::Coordinate(3));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn positive() -> impl Strategy<Value = f64> {
            prop_oneof![1e-3..1e3f64, (1u32..1000).prop_map(f64::from), Just(1.0 / 3.0)]
        }

        fn field() -> impl Strategy<Value = FieldSource> {
            prop_oneof![
                (1u8..=3).prop_map(FieldSource::Coordinate),
                (0u8..=1).prop_map(FieldSource::Parameter),
                (1u8..=3).prop_map(|i| FieldSource::Dirichlet(Boundary::Coordinate(i))),
                (0u8..=1).prop_map(|i| FieldSource::Dirichlet(Boundary::Parameter(i))),
                any::<u64>().prop_map(|s| FieldSource::Dirichlet(Boundary::Random(s))),
                "[a-z][a-z0-9_/.-]{0,20}".prop_map(|p| FieldSource::File(PathBuf::from(p))),
            ]
        }

        fn config() -> impl Strategy<Value = RunConfig> {
            let surface = prop_oneof![
                Just((SurfaceKind::Plane, None)),
                Just((SurfaceKind::Helicoid, None)),
                Just((SurfaceKind::Catenoid, None)),
                (1u32..6).prop_map(|k| (SurfaceKind::Enneper, Some(k))),
            ];
            let radii = prop_oneof![
                Just(None),
                prop::collection::vec(0.0..1.0f64, 1..6).prop_map(|fs| Some(Radii::List(fs))),
                (0.0..1.0f64, 1usize..6).prop_map(|(f, c)| Some(Radii::Dyadic { base: f, count: c })),
            ];
            (
                (surface, positive(), positive(), 1usize..10_000_000, radii),
                (field(), prop::option::of(positive()), 1usize..1000, 1usize..100_000, any::<u64>()),
                (prop::option::of(positive()), prop::collection::vec(positive(), 0..4), prop::collection::vec(positive(), 0..4)),
                "[a-z][a-z0-9_/.-]{0,20}",
            )
                .prop_map(|((s, radius, target_h, max_vertices, radii), (field, c_a, levels, pairs, seed), (holder_r, holder_s, alphas), out)| {
                    // scale the schedule into (0, R]
                    let radii = radii.map(|r| match r {
                        Radii::List(fs) => {
                            let mut l: Vec<f64> = fs.iter().map(|f| radius * (1.0 - f)).collect();
                            l.sort_by(f64::total_cmp);
                            Radii::List(l)
                        }
                        Radii::Dyadic { base, count } => {
                            Radii::Dyadic { base: radius * (1.0 - base) / 2f64.powi(count as i32 - 1), count }
                        }
                    });
                    RunConfig {
                        kind: s.0,
                        order: s.1,
                        radius,
                        target_h,
                        max_vertices,
                        radii,
                        field,
                        c_a,
                        levels,
                        pairs,
                        seed,
                        holder_r,
                        holder_s,
                        alphas,
                        output: PathBuf::from(out),
                    }
                })
        }

        proptest! {
            #[test]
            fn text_form_round_trips(c in config()) {
                prop_assume!(c.validate().is_ok());
                let text = c.render();
                prop_assert_eq!(RunConfig::parse(&text).unwrap(), c);
                prop_assert_eq!(RunConfig::parse(&text).unwrap().render(), text);
            }

            #[test]
            fn non_positive_numbers_are_rejected(c in config(), bad in prop_oneof![Just(0.0), -1e3..0.0f64, Just(f64::NAN)]) {
                prop_assume!(c.validate().is_ok());
                let variants = [
                    RunConfig { radius: bad, ..c.clone() },
                    RunConfig { target_h: bad, ..c.clone() },
                    RunConfig { c_a: Some(bad), ..c },
                ];
                for v in variants {
                    prop_assert!(v.validate().is_err());
                }
            }
        }
    }
}
