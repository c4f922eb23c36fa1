//! Oscillation, decay and growth measurements for harmonic fields.
//!
//! Continuum inequalities are checked with a discretization slack of
//! `10 h / r`, where `h` is the mesh target edge length.

mod certificate;
mod cone;
mod holder;
mod oscillation;
mod threshold;

pub use certificate::{decay_certificate, DecayCertificate, LevelSample, CERTIFICATE_EPSILON, CERTIFICATE_LEVELS};
pub use cone::{cone_containment_profile, ConeProfile};
pub use holder::{holder_estimate, mean_value_ratio, HolderFit};
pub use oscillation::{
    decay_curve, growth_exponent, oscillation, DecayRatio, GrowthFit, GrowthModel, OscillationCurve, RatioStatus,
};
pub use threshold::{liouville_threshold, DecayBound};

use crate::mesh::SurfaceMesh;

/// `10 h / r`.
pub fn discretization_slack(mesh: &SurfaceMesh, r: f64) -> f64 {
    10.0 * mesh.target_h() / r
}
