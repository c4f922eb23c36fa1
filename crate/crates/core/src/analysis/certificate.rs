use rayon::prelude::*;
use serde::Serialize;

use super::{discretization_slack, liouville_threshold};
use crate::error::{Error, Result};
use crate::harmonic::{dirichlet_energy, level_set, ScalarField};
use crate::mesh::{BallComponent, SurfaceMesh};

/// Shift added to the normalized field before taking `-log`.
pub const CERTIFICATE_EPSILON: f64 = 1e-12;
/// Number of levels sampled in `(0, M)` for the level-length check.
pub const CERTIFICATE_LEVELS: usize = 32;

/// Level-length sample: the longest level component meeting `Σ_r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSample {
    pub level: f64,
    pub longest: f64,
    pub components_meeting: usize,
}

/// Every intermediate quantity of the one-sided decay argument at radius `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub radius: f64,
    pub target_h: f64,
    pub slack: f64,
    pub c_a: f64,
    pub gamma: f64,
    // normalization on Σ_2r
    pub inf_2r: f64,
    pub osc0_2r: f64,
    pub osc0_r: f64,
    pub epsilon: f64,
    pub area_2r: f64,
    // (a) cutoff energy
    pub energy: f64,
    pub energy_bound: f64,
    // (b) sup of -log w on Σ_r
    pub m: f64,
    pub m_bound: f64,
    // (c) level lengths
    pub levels: Vec<LevelSample>,
    pub min_level_length: f64,
    pub level_length_bound: f64,
    pub ratio: f64,
    pub energy_pass: bool,
    pub m_pass: bool,
    pub level_pass: bool,
    pub ratio_pass: bool,
}

impl DecayCertificate {
    /// Recomputes the pass flags from the stored numbers.
    pub fn recheck(&self) -> [bool; 4] {
        [
            self.energy <= self.energy_bound,
            self.m <= self.m_bound,
            self.min_level_length >= self.level_length_bound,
            self.ratio <= self.gamma + self.slack,
        ]
    }

    pub fn passed(&self) -> bool {
        self.energy_pass && self.m_pass && self.level_pass && self.ratio_pass
    }
}

/// Runs the normalization, energy, sup and level-length checks for `field`
/// around `root` at radius `r`, with area constant `c_a`.
pub fn decay_certificate(
    mesh: &SurfaceMesh,
    field: &ScalarField,
    root: usize,
    r: f64,
    c_a: f64,
) -> Result<DecayCertificate> {
    let bound = liouville_threshold(c_a)?;
    let comp_r = BallComponent::new(mesh, root, r)?;
    let comp_mid = BallComponent::new(mesh, root, 1.5 * r)?;
    let comp_2r = BallComponent::new(mesh, root, 2.0 * r)?;
    let slack = discretization_slack(mesh, r);

    let at_root = field.values()[root];
    let (inf_2r, _) = field.range_on(&comp_2r);
    let osc0_2r = at_root - inf_2r;
    if !(osc0_2r > 0.0) {
        return Err(Error::Degenerate(format!("one-sided oscillation on the ball of radius {} is zero", 2.0 * r)));
    }
    let (inf_r, _) = field.range_on(&comp_r);
    let osc0_r = at_root - inf_r;

    let eps = CERTIFICATE_EPSILON;
    let v = ScalarField::from_fn(mesh, |i| {
        if comp_2r.contains_vertex(i) {
            -((field.values()[i] - inf_2r) / osc0_2r + eps).ln()
        } else {
            f64::NAN
        }
    });

    let area_2r = comp_2r.area(mesh);
    let energy = dirichlet_energy(mesh, &v, comp_mid.triangles());
    let energy_bound = 16.0 * area_2r / (r * r) * (1.0 + slack);

    let m = comp_r.vertices().iter().map(|&i| v.values()[i]).fold(f64::NEG_INFINITY, f64::max);
    let m_bound = 24.0 * c_a + slack;

    let centre = mesh.position(root);
    let levels: Vec<LevelSample> = (0..CERTIFICATE_LEVELS)
        .into_par_iter()
        .map(|j| {
            let s = (j as f64 + 0.5) * m / CERTIFICATE_LEVELS as f64;
            let ls = level_set(mesh, &v, s, &comp_mid);
            let meeting: Vec<f64> = ls.components_meeting_ball(centre, r).map(|c| c.length).collect();
            LevelSample { level: s, longest: meeting.iter().copied().fold(0.0, f64::max), components_meeting: meeting.len() }
        })
        .collect();
    let min_level_length = levels.iter().map(|l| l.longest).fold(f64::INFINITY, f64::min);
    let level_length_bound = 0.5 * r * (1.0 - slack);
    let ratio = osc0_r / osc0_2r;

    let mut cert = DecayCertificate {
        radius: r,
        target_h: mesh.target_h(),
        slack,
        c_a,
        gamma: bound.gamma,
        inf_2r,
        osc0_2r,
        osc0_r,
        epsilon: eps,
        area_2r,
        energy,
        energy_bound,
        m,
        m_bound,
        levels,
        min_level_length,
        level_length_bound,
        ratio,
        energy_pass: false,
        m_pass: false,
        level_pass: false,
        ratio_pass: false,
    };
    [cert.energy_pass, cert.m_pass, cert.level_pass, cert.ratio_pass] = cert.recheck();
    Ok(cert)
}
