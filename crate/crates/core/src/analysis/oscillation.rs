use rayon::prelude::*;
use serde::Serialize;

use super::{discretization_slack, DecayBound};
use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::harmonic::ScalarField;
use crate::mesh::{BallComponent, SurfaceMesh};

/// `u(root) - min` (one-sided) or `max - min` (two-sided) over the
/// component's vertices.
pub fn oscillation(field: &ScalarField, component: &BallComponent, two_sided: bool) -> f64 {
    let (lo, hi) = field.range_on(component);
    if two_sided {
        hi - lo
    } else {
        field.values()[component.root()] - lo
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::Argument("empty radius schedule".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::Argument("radii must be positive and finite".into()));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Argument("radii must be strictly increasing".into()));
    }
    Ok(())
}

/// `(osc0, osc2)` for each radius, computed in parallel.
fn oscillations(mesh: &SurfaceMesh, field: &ScalarField, root: usize, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    radii
        .par_iter()
        .map(|&r| {
            let comp = BallComponent::new(mesh, root, r)?;
            Ok((oscillation(field, &comp, false), oscillation(field, &comp, true)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioStatus {
    Pass,
    Fail,
    /// The larger radius has zero one-sided oscillation.
    Degenerate,
}

/// `osc0(r_i) / osc0(r_{i+1})` compared with `gamma + 10 h / r_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRatio {
    pub radius: f64,
    pub outer_radius: f64,
    pub ratio: Option<f64>,
    pub ratio_two_sided: Option<f64>,
    pub bound: f64,
    pub status: RatioStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationCurve {
    pub root: usize,
    pub radii: Vec<f64>,
    pub osc0: Vec<f64>,
    pub osc2: Vec<f64>,
    pub ratios: Vec<DecayRatio>,
    pub gamma: f64,
    /// Every consecutive pair of radii differs by a factor of exactly 2.
    pub dyadic: bool,
}

impl OscillationCurve {
    /// `a_k = osc0` at the dyadic entries; empty when the schedule is not dyadic.
    pub fn a_k(&self) -> &[f64] {
        if self.dyadic {
            &self.osc0
        } else {
            &[]
        }
    }

    pub fn failures(&self) -> usize {
        self.ratios.iter().filter(|r| r.status == RatioStatus::Fail).count()
    }

    pub fn all_degenerate(&self) -> bool {
        self.ratios.iter().all(|r| r.status == RatioStatus::Degenerate)
    }

    pub fn is_monotone(&self) -> bool {
        let nondecreasing = |xs: &[f64]| xs.windows(2).all(|w| w[0] <= w[1]);
        nondecreasing(&self.osc0) && nondecreasing(&self.osc2)
    }

    /// CSV with columns `radius,osc0,osc2,ratio,gamma`; the ratio column of
    /// the last row is empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,osc0,osc2,ratio,gamma\n");
        for (i, r) in self.radii.iter().enumerate() {
            let ratio = self.ratios.get(i).and_then(|d| d.ratio).map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!("{r},{},{},{ratio},{}\n", self.osc0[i], self.osc2[i], self.gamma));
        }
        out
    }
}

pub fn decay_curve(
    mesh: &SurfaceMesh,
    field: &ScalarField,
    root: usize,
    radii: &[f64],
    bound: &DecayBound,
) -> Result<OscillationCurve> {
    check_radii(radii)?;
    let osc = oscillations(mesh, field, root, radii)?;
    let (osc0, osc2): (Vec<f64>, Vec<f64>) = osc.into_iter().unzip();
    let ratios = radii
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let limit = bound.gamma + discretization_slack(mesh, w[0]);
            let ratio = (osc0[i + 1] > 0.0).then(|| osc0[i] / osc0[i + 1]);
            let ratio_two_sided = (osc2[i + 1] > 0.0).then(|| osc2[i] / osc2[i + 1]);
            let status = match ratio {
                None => RatioStatus::Degenerate,
                Some(q) if q <= limit => RatioStatus::Pass,
                Some(_) => RatioStatus::Fail,
            };
            DecayRatio { radius: w[0], outer_radius: w[1], ratio, ratio_two_sided, bound: limit, status }
        })
        .collect();
    let dyadic = radii.windows(2).all(|w| w[1] == 2.0 * w[0]);
    Ok(OscillationCurve { root, radii: radii.to_vec(), osc0, osc2, ratios, gamma: bound.gamma, dyadic })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthModel {
    /// `osc2 ~ C r^alpha`
    Power,
    /// `osc2 ~ a + b log r`
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    pub radii: Vec<f64>,
    pub osc2: Vec<f64>,
    pub alpha: f64,
    /// Fit of `log osc2` against `log r`.
    pub power: LineFit,
    /// Fit of `osc2` against `log r`.
    pub log: LineFit,
    /// Max residual of each model measured in `log osc2`.
    pub power_residual: f64,
    pub log_residual: f64,
    pub preferred: GrowthModel,
}

/// Competing power-law and logarithmic fits of the two-sided oscillation.
pub fn growth_exponent(mesh: &SurfaceMesh, field: &ScalarField, root: usize, radii: &[f64]) -> Result<GrowthFit> {
    check_radii(radii)?;
    if radii.len() < 4 {
        return Err(Error::Fit(format!("growth fit needs at least 4 radii, got {}", radii.len())));
    }
    let osc2: Vec<f64> = oscillations(mesh, field, root, radii)?.into_iter().map(|o| o.1).collect();
    if let Some(i) = osc2.iter().position(|&o| !(o > 0.0)) {
        return Err(Error::Degenerate(format!("zero oscillation at radius {}", radii[i])));
    }
    let lr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let lo: Vec<f64> = osc2.iter().map(|o| o.ln()).collect();
    let power = fit_line(&lr, &lo)?;
    let log = fit_line(&lr, &osc2)?;
    let log_residual = lr
        .iter()
        .zip(&lo)
        .map(|(x, y)| {
            let p = log.predict(*x);
            if p > 0.0 {
                (y - p.ln()).abs()
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    let preferred = if log_residual < power.max_residual { GrowthModel::Log } else { GrowthModel::Power };
    Ok(GrowthFit {
        radii: radii.to_vec(),
        osc2,
        alpha: power.slope,
        power,
        log,
        power_residual: power.max_residual,
        log_residual,
        preferred,
    })
}
