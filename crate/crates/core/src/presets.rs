//! Canonical parameter sets used by the validation suites and tests.

use crate::fso::{DetectionType, FsoParams};
use crate::rf::RfParams;

/// Named Gamma-Gamma turbulence regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Turbulence {
    Weak,
    Moderate,
    Strong,
}

impl Turbulence {
    /// (alpha, beta) scintillation shapes of the regime.
    pub fn shapes(self) -> (f64, f64) {
        match self {
            Turbulence::Weak => (2.902, 2.51),
            Turbulence::Moderate => (2.296, 1.822),
            Turbulence::Strong => (2.064, 1.342),
        }
    }

    pub fn all() -> [Turbulence; 3] {
        [Turbulence::Weak, Turbulence::Moderate, Turbulence::Strong]
    }

    pub fn name(self) -> &'static str {
        match self {
            Turbulence::Weak => "weak",
            Turbulence::Moderate => "moderate",
            Turbulence::Strong => "strong",
        }
    }

    /// Channel with pointing ratio `xi` and average electrical SNR `mu_r`.
    pub fn channel(self, xi: f64, detection: DetectionType, mu_r: f64) -> FsoParams {
        let (alpha, beta) = self.shapes();
        FsoParams::new(alpha, beta, xi, detection, mu_r).expect("preset parameters are valid")
    }
}

/// Rician-shadowed RF preset (kappa = 5, mu = 1, m = 2).
pub fn rician_shadowed(gamma_bar: f64) -> RfParams {
    RfParams::new(5.0, 1, 2, gamma_bar).expect("preset parameters are valid")
}

/// General kappa-mu shadowed RF preset (kappa = 10, mu = 2, m = 1).
pub fn kappa_mu_shadowed(gamma_bar: f64) -> RfParams {
    RfParams::new(10.0, 2, 1, gamma_bar).expect("preset parameters are valid")
}

/// Pointing-error sweep values.
pub const XI_SWEEP: [f64; 6] = [10.45, 2.15, 1.45, 1.15, 1.0, 0.65];

/// Convert a dB value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear value to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
