//! Free-space optical channel: Gamma-Gamma turbulence with pointing errors
//! under heterodyne (r = 1) or IM/DD (r = 2) detection.
//!
//! The closed forms depend on the channel only through the combined
//! argument `alpha beta h (gamma/mu_r)^{1/r}`, so the physical constants
//! (pointing loss, conversion ratio, noise density) never appear: the
//! average electrical SNR `mu_r` carries all of them. The SNR sampler is
//! built in matching normalized units, with the irradiance drawn as a
//! product of two unit-mean Gamma variates and a power-law pointing factor.

use rand::Rng;
use rand_distr::{Distribution, Gamma as GammaDist};

use crate::error::{Error, Result};
use crate::modulation::ModulationSpec;
use crate::specfun::{fox_h, ln_gamma, meijer_g, FoxHParams, MeijerGParams};

/// FSO detection type; fixes the SNR exponent r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionType {
    /// Heterodyne detection: SNR linear in irradiance (r = 1).
    Hd,
    /// Intensity modulation / direct detection: SNR quadratic (r = 2).
    ImDd,
}

impl DetectionType {
    pub fn order(self) -> u32 {
        match self {
            DetectionType::Hd => 1,
            DetectionType::ImDd => 2,
        }
    }

    pub fn from_order(r: u32) -> Result<Self> {
        match r {
            1 => Ok(DetectionType::Hd),
            2 => Ok(DetectionType::ImDd),
            _ => Err(Error::InvalidParameter(format!(
                "detection order must be 1 (HD) or 2 (IM/DD), got {r}"
            ))),
        }
    }
}

/// Gamma-Gamma turbulence channel with pointing errors.
#[derive(Debug, Clone, PartialEq)]
pub struct FsoParams {
    /// Large-scale scintillation shape.
    pub alpha: f64,
    /// Small-scale scintillation shape.
    pub beta: f64,
    /// Pointing-error ratio (equivalent beam radius over jitter sigma).
    pub xi: f64,
    pub detection: DetectionType,
    /// Average electrical SNR, linear scale.
    pub mu_r: f64,
}

impl FsoParams {
    pub fn new(
        alpha: f64,
        beta: f64,
        xi: f64,
        detection: DetectionType,
        mu_r: f64,
    ) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("xi", xi), ("mu_r", mu_r)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "FsoParams: {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            alpha,
            beta,
            xi,
            detection,
            mu_r,
        })
    }

    /// h = xi^2 / (xi^2 + 1), the mean of the pointing-loss factor.
    pub fn pointing_fraction(&self) -> f64 {
        let xi2 = self.xi * self.xi;
        xi2 / (xi2 + 1.0)
    }

    fn r(&self) -> f64 {
        self.detection.order() as f64
    }

    /// Combined Meijer-G / Fox-H argument alpha beta h (gamma/mu_r)^{1/r}.
    fn gg_arg(&self, gamma: f64) -> f64 {
        self.alpha * self.beta * self.pointing_fraction() * (gamma / self.mu_r).powf(1.0 / self.r())
    }

    /// ln(xi^2) - ln Gamma(alpha) - ln Gamma(beta), the common prefactor.
    fn ln_front(&self) -> f64 {
        (self.xi * self.xi).ln() - ln_gamma(self.alpha) - ln_gamma(self.beta)
    }

    /// Mean SNR of the instantaneous distribution. Equals mu_r under HD;
    /// under IM/DD it picks up the irradiance second-moment ratio.
    pub fn mean_snr(&self) -> f64 {
        match self.detection {
            DetectionType::Hd => self.mu_r,
            DetectionType::ImDd => {
                let xi2 = self.xi * self.xi;
                self.mu_r * (xi2 + 1.0).powi(2) * (self.alpha + 1.0) * (self.beta + 1.0)
                    / (xi2 * (xi2 + 2.0) * self.alpha * self.beta)
            }
        }
    }

    /// Instantaneous-SNR PDF.
    pub fn pdf(&self, gamma: f64) -> Result<f64> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fso pdf: gamma must be positive, got {gamma}"
            )));
        }
        let xi2 = self.xi * self.xi;
        let params = MeijerGParams::new(3, 0, vec![xi2 + 1.0], vec![xi2, self.alpha, self.beta])?;
        let g = meijer_g(&params, self.gg_arg(gamma))?;
        Ok((self.ln_front().exp() / (self.r() * gamma) * g).max(0.0))
    }

    /// Instantaneous-SNR CDF.
    ///
    /// The complementary Meijer-G form cancels catastrophically in the deep
    /// lower tail, so below 1e-6 the direct form (the same function with
    /// the origin parameter moved across the contour) is used instead.
    pub fn cdf(&self, gamma: f64) -> Result<f64> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "fso cdf: gamma must be non-negative, got {gamma}"
            )));
        }
        if gamma == 0.0 {
            return Ok(0.0);
        }
        let xi2 = self.xi * self.xi;
        let z = self.gg_arg(gamma);
        let front = self.ln_front().exp();
        let complement_params = MeijerGParams::new(
            4,
            0,
            vec![1.0, xi2 + 1.0],
            vec![0.0, xi2, self.alpha, self.beta],
        )?;
        let f = 1.0 - front * meijer_g(&complement_params, z)?;
        if f >= 1e-6 {
            return Ok(f.min(1.0));
        }
        let direct_params = MeijerGParams::new(
            3,
            1,
            vec![1.0, xi2 + 1.0],
            vec![xi2, self.alpha, self.beta, 0.0],
        )?;
        Ok((front * meijer_g(&direct_params, z)?).max(0.0))
    }

    /// Moment generating function E[e^{s gamma}] for s < 0.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        if !(s < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fso mgf: s must be negative, got {s}"
            )));
        }
        let xi2 = self.xi * self.xi;
        let r = self.r();
        let params = FoxHParams::new(
            3,
            1,
            vec![(1.0, 1.0 / r), (xi2 + 1.0, 1.0)],
            vec![(xi2, 1.0), (self.alpha, 1.0), (self.beta, 1.0)],
        )?;
        let z =
            self.alpha * self.beta * self.pointing_fraction() * (self.mu_r * (-s)).powf(-1.0 / r);
        Ok((self.ln_front().exp() / r) * fox_h(&params, z)?)
    }

    /// Outage probability P(SNR < gamma_th).
    pub fn outage(&self, gamma_th: f64) -> Result<f64> {
        if !(gamma_th > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fso outage: threshold must be positive, got {gamma_th}"
            )));
        }
        self.cdf(gamma_th)
    }

    /// Average BER for a Table-compatible modulation scheme.
    pub fn avg_ber(&self, spec: &ModulationSpec) -> Result<f64> {
        if !spec.supports_fso_detection(self.detection) {
            return Err(Error::IncompatibleModulation(format!(
                "{:?} is not defined for FSO {:?}",
                spec.scheme, self.detection
            )));
        }
        let xi2 = self.xi * self.xi;
        let r = self.r();
        let h = self.pointing_fraction();
        let params = FoxHParams::new(
            4,
            1,
            vec![(1.0 - spec.p, 1.0 / r), (1.0, 1.0), (xi2 + 1.0, 1.0)],
            vec![(0.0, 1.0), (xi2, 1.0), (self.alpha, 1.0), (self.beta, 1.0)],
        )?;
        let mut sum = 0.0;
        for &qk in &spec.q {
            let z = self.alpha * self.beta * h * (qk * self.mu_r).powf(-1.0 / r);
            sum += fox_h(&params, z)?;
        }
        let front = (self.ln_front() - ln_gamma(spec.p)).exp();
        Ok(spec.saturation_ber() - 0.5 * spec.delta * front * sum)
    }

    /// Draw one instantaneous SNR:
    /// gamma = mu_r * (h_a h_p / h)^r with h_a a unit-mean Gamma-Gamma
    /// product and h_p the power-law pointing factor on (0, 1].
    pub fn sample_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let ga = GammaDist::new(self.alpha, 1.0 / self.alpha).expect("alpha > 0");
        let gb = GammaDist::new(self.beta, 1.0 / self.beta).expect("beta > 0");
        let x: f64 = ga.sample(rng);
        let y: f64 = gb.sample(rng);
        let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let hp = u.powf(1.0 / (self.xi * self.xi));
        self.mu_r * (x * y * hp / self.pointing_fraction()).powf(self.r())
    }
}
