use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};

/// Decay factor `gamma = 1 - exp(-24 C_a)` and the exponent threshold
/// `-log(gamma) / log 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayBound {
    pub c_a: f64,
    pub gamma: f64,
    /// `ln gamma`, kept separately because `gamma` rounds to 1 once
    /// `24 C_a` exceeds about 37.
    pub ln_gamma: f64,
    pub alpha_threshold: f64,
    /// `ln(alpha_threshold)`, finite even where `alpha_threshold` underflows.
    pub ln_alpha_threshold: f64,
}

/// `ln(1 - exp(-x))` for `x > 0` (Maechler's split at `ln 2`).
fn ln_one_minus_exp_neg(x: f64) -> f64 {
    if x < LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

pub fn liouville_threshold(c_a: f64) -> Result<DecayBound> {
    if !(c_a > 0.0) || !c_a.is_finite() {
        return Err(Error::Argument(format!("area constant must be positive and finite, got {c_a}")));
    }
    let x = 24.0 * c_a;
    let ln_gamma = ln_one_minus_exp_neg(x);
    let gamma = -(-x).exp_m1();
    let alpha_threshold = -ln_gamma / LN_2;
    // -ln(1 - e^-x) = e^-x (1 + e^-x / 2 + ...) when it underflows
    let ln_alpha_threshold = if alpha_threshold > f64::MIN_POSITIVE {
        alpha_threshold.ln()
    } else {
        -x - LN_2.ln()
    };
    Ok(DecayBound { c_a, gamma, ln_gamma, alpha_threshold, ln_alpha_threshold })
}

impl DecayBound {
    /// `ln(gamma * 2^alpha)`; negative exactly when the iterated decay beats
    /// growth at rate `alpha`.
    pub fn ln_growth_factor(&self, alpha: f64) -> f64 {
        self.ln_gamma + alpha * LN_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_decay_gives_unit_threshold() {
        let b = liouville_threshold(LN_2 / 24.0).unwrap();
        assert!((b.gamma - 0.5).abs() <= 1e-15);
        assert!((b.alpha_threshold - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn three_pi_first_order() {
        let b = liouville_threshold(3.0 * PI).unwrap();
        let first_order = (-72.0 * PI).exp() / LN_2;
        assert!(b.alpha_threshold > 0.0);
        assert!((b.alpha_threshold / first_order - 1.0).abs() < 1e-14);
        assert!((b.ln_alpha_threshold - (-72.0 * PI - LN_2.ln())).abs() < 1e-12);
        assert_eq!(b.gamma, 1.0);
        assert!(b.ln_gamma < 0.0);
    }

    #[test]
    fn huge_constant_keeps_log_threshold() {
        let b = liouville_threshold(100.0).unwrap();
        assert_eq!(b.alpha_threshold, 0.0);
        assert!((b.ln_alpha_threshold + 2400.0 + LN_2.ln()).abs() < 1e-9);
    }

    #[test]
    fn small_constant_diverges() {
        let a = liouville_threshold(1e-6).unwrap().alpha_threshold;
        let b = liouville_threshold(1e-9).unwrap().alpha_threshold;
        assert!(b > a && a > 10.0);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(liouville_threshold(0.0).is_err());
        assert!(liouville_threshold(-1.0).is_err());
        assert!(liouville_threshold(f64::NAN).is_err());
    }
}
