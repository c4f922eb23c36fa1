//! Closed-form conformal minimal immersions.
//!
//! Every family is written as `x_j = Re G_j(z)` for holomorphic `G_j` with
//! `sum_j (G_j')^2 = 0`, so first and second derivatives come straight from
//! complex arithmetic:
//!
//! * `F_u = Re G'`, `F_v = -Im G'`
//! * `F_uu = Re G''`, `F_vv = -Re G''`
//! * `lambda = |G'|^2 / 2`
//!
//! The helicoid uses the `sinh` chart `(sinh u cos v, sinh u sin v, v)`, which
//! is conformal; the `cosh` variant is not.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Plane,
    Enneper,
    Helicoid,
    Catenoid,
}

impl SurfaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::Plane => "plane",
            SurfaceKind::Enneper => "enneper",
            SurfaceKind::Helicoid => "helicoid",
            SurfaceKind::Catenoid => "catenoid",
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plane" => Ok(SurfaceKind::Plane),
            "enneper" => Ok(SurfaceKind::Enneper),
            "helicoid" => Ok(SurfaceKind::Helicoid),
            "catenoid" => Ok(SurfaceKind::Catenoid),
            other => Err(Error::Argument(format!("unknown surface kind `{other}`"))),
        }
    }
}

/// A member of one of the closed-form minimal surface families in R^3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImmersionSpec {
    kind: SurfaceKind,
    /// Enneper order; always 0 for the other families.
    order: u32,
}

impl ImmersionSpec {
    pub const AMBIENT_DIM: usize = 3;

    /// Validating constructor. `order` is required-or-defaulted for Enneper
    /// and rejected for every other kind.
    pub fn new(kind: SurfaceKind, order: Option<u32>) -> Result<Self> {
        match (kind, order) {
            (SurfaceKind::Enneper, None) => Ok(Self { kind, order: 1 }),
            (SurfaceKind::Enneper, Some(k)) if k >= 1 => Ok(Self { kind, order: k }),
            (SurfaceKind::Enneper, Some(k)) => {
                Err(Error::Argument(format!("Enneper order must be >= 1, got {k}")))
            }
            (_, None) => Ok(Self { kind, order: 0 }),
            (_, Some(k)) => Err(Error::Argument(format!(
                "{kind} does not take an order parameter (got {k})"
            ))),
        }
    }

    pub fn plane() -> Self {
        Self { kind: SurfaceKind::Plane, order: 0 }
    }

    pub fn enneper(order: u32) -> Result<Self> {
        Self::new(SurfaceKind::Enneper, Some(order))
    }

    pub fn helicoid() -> Self {
        Self { kind: SurfaceKind::Helicoid, order: 0 }
    }

    pub fn catenoid() -> Self {
        Self { kind: SurfaceKind::Catenoid, order: 0 }
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    /// Enneper order `k`, `None` for the other families.
    pub fn order(&self) -> Option<u32> {
        (self.kind == SurfaceKind::Enneper).then_some(self.order)
    }

    /// The catenoid chart is periodic in `v`; its patches are annuli.
    pub fn is_periodic(&self) -> bool {
        self.kind == SurfaceKind::Catenoid
    }

    /// Only the catenoid is not a disk.
    pub fn is_disk(&self) -> bool {
        !self.is_periodic()
    }

    /// `(G, G', G'')` at `z`.
    fn holomorphic(&self, z: Complex64) -> [[Complex64; 3]; 3] {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self.kind {
            SurfaceKind::Plane => [[z, -I * z, zero], [one, -I, zero], [zero, zero, zero]],
            SurfaceKind::Enneper => {
                let k = self.order as i32;
                let n = f64::from(2 * k + 1);
                let zk = z.powi(k);
                let z2k = zk * zk;
                let z2k1 = z2k * z;
                let zkm1 = if k == 1 { one } else { z.powi(k - 1) };
                let z2km1 = zk * zkm1;
                let kf = f64::from(k);
                let g = [
                    z - z2k1 / n,
                    I * (z + z2k1 / n),
                    zk * z * (2.0 / (kf + 1.0)),
                ];
                let dg = [one - z2k, I * (one + z2k), zk * 2.0];
                let ddg = [-z2km1 * (2.0 * kf), I * z2km1 * (2.0 * kf), zkm1 * (2.0 * kf)];
                [g, dg, ddg]
            }
            SurfaceKind::Helicoid => {
                let (s, c) = (z.sinh(), z.cosh());
                [[s, -I * c, -I * z], [c, -I * s, -I], [s, -I * c, zero]]
            }
            SurfaceKind::Catenoid => {
                let (s, c) = (z.sinh(), z.cosh());
                [[c, -I * s, z], [s, -I * c, one], [c, -I * s, zero]]
            }
        }
    }

    /// Ambient position only.
    pub fn position(&self, u: f64, v: f64) -> Vec3 {
        let [g, _, _] = self.holomorphic(Complex64::new(u, v));
        Vec3::new(g[0].re, g[1].re, g[2].re)
    }

    /// Conformal factor only.
    pub fn lambda(&self, u: f64, v: f64) -> f64 {
        let [_, dg, _] = self.holomorphic(Complex64::new(u, v));
        dg.iter().map(|c| c.norm_sqr()).sum::<f64>() / 2.0
    }

    /// Second partials `(F_uu, F_vv)`.
    pub fn second_derivatives(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        let [_, _, ddg] = self.holomorphic(Complex64::new(u, v));
        let uu = Vec3::new(ddg[0].re, ddg[1].re, ddg[2].re);
        // d/dv applied twice is multiplication by i^2.
        let vv = ddg.map(|c| (I * I * c).re);
        (uu, Vec3::new(vv[0], vv[1], vv[2]))
    }
}

impl fmt::Display for ImmersionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order() {
            Some(k) => write!(f, "{} (order {k})", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// Position, first partials and conformal factor at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetSample {
    pub param: [f64; 2],
    pub position: Vec3,
    pub d_u: Vec3,
    pub d_v: Vec3,
    pub lambda: f64,
}

fn check_param(u: f64, v: f64) -> Result<()> {
    if u.is_finite() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite parameter ({u}, {v})")))
    }
}

pub fn evaluate(spec: &ImmersionSpec, param: (f64, f64)) -> Result<JetSample> {
    let (u, v) = param;
    check_param(u, v)?;
    let [g, dg, _] = spec.holomorphic(Complex64::new(u, v));
    let d_u = Vec3::new(dg[0].re, dg[1].re, dg[2].re);
    let d_v = Vec3::new(-dg[0].im, -dg[1].im, -dg[2].im);
    Ok(JetSample {
        param: [u, v],
        position: Vec3::new(g[0].re, g[1].re, g[2].re),
        d_u,
        d_v,
        lambda: 0.5 * (d_u.norm_squared() + d_v.norm_squared()),
    })
}

/// `max(| |F_u|^2 - |F_v|^2 |, |F_u . F_v|) / max(lambda, 1e-300)`.
pub fn conformal_defect(spec: &ImmersionSpec, param: (f64, f64)) -> Result<f64> {
    let jet = evaluate(spec, param)?;
    let diff = (jet.d_u.norm_squared() - jet.d_v.norm_squared()).abs();
    let cross = jet.d_u.dot(&jet.d_v).abs();
    Ok(diff.max(cross) / jet.lambda.max(1e-300))
}

/// `|F_uu + F_vv|`; zero iff the conformal chart is minimal.
pub fn minimality_defect(spec: &ImmersionSpec, param: (f64, f64)) -> Result<f64> {
    check_param(param.0, param.1)?;
    let (uu, vv) = spec.second_derivatives(param.0, param.1);
    Ok((uu + vv).norm())
}

const BALL_ANGLES: usize = 256;
const BALL_FACTOR: f64 = 1.1;

/// Smallest ambient distance from the origin over the boundary of the
/// parameter patch of radius `rho`.
///
/// For the disk families this is the circle `|z| = rho`; for the periodic
/// catenoid chart it is the pair of boundary circles `u = +-rho`.
pub fn patch_boundary_min_norm(spec: &ImmersionSpec, rho: f64) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..BALL_ANGLES {
        let theta = 2.0 * PI * i as f64 / BALL_ANGLES as f64;
        let norms = if spec.is_periodic() {
            [spec.position(rho, theta).norm(), spec.position(-rho, theta).norm()]
        } else {
            let p = spec.position(rho * theta.cos(), rho * theta.sin()).norm();
            [p, p]
        };
        for n in norms {
            // NaN counts as "not covered" so bisection keeps growing.
            best = if n.is_nan() { f64::NEG_INFINITY } else { best.min(n) };
        }
    }
    best
}

/// Parameter radius whose patch boundary stays outside `1.1 * radius`.
///
/// The returned `rho` always satisfies the covering condition; it is the
/// upper end of a bisection bracket.
pub fn param_radius_for_ball(spec: &ImmersionSpec, radius: f64) -> Result<f64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Argument(format!("ball radius must be positive, got {radius}")));
    }
    let target = BALL_FACTOR * radius;
    let covers = |rho: f64| patch_boundary_min_norm(spec, rho) > target;

    let mut hi = 1.0;
    while !covers(hi) {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Range(format!(
                "no parameter radius below 1e6 covers the ball of radius {radius}"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if covers(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(hi)
}
