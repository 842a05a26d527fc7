//! Modulation parameterization and the unified CDF-based average BER.
//!
//! Every supported scheme is reduced to the tuple (delta, p, {q_k}) so that
//! the average BER over any fading distribution with CDF F is
//!
//! ```text
//! Pe = delta / (2 Gamma(p)) * sum_k q_k^p \int_0^inf g^{p-1} e^{-q_k g} F(g) dg
//! ```
//!
//! `avg_ber_from_cdf` evaluates that integral by adaptive quadrature and is
//! the oracle against which all closed-form BER expressions are checked.

use crate::error::{Error, Result};
use crate::fso::DetectionType;
use crate::quad;
use crate::specfun::{ln_gamma, upper_incomplete_gamma_reg};

use std::f64::consts::PI;

/// Modulation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// On-off keying (intensity modulation, direct detection on FSO).
    Ook,
    /// M-ary phase shift keying (heterodyne detection on FSO).
    Mpsk,
    /// Square M-ary quadrature amplitude modulation (heterodyne on FSO).
    Mqam,
}

/// One modulation scheme reduced to its BER parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationSpec {
    pub scheme: Scheme,
    pub order: u32,
    pub delta: f64,
    pub p: f64,
    pub q: Vec<f64>,
}

impl ModulationSpec {
    pub fn new(scheme: Scheme, order: u32) -> Result<Self> {
        match scheme {
            Scheme::Ook => Ok(Self {
                scheme,
                order: 2,
                delta: 1.0,
                p: 0.5,
                q: vec![0.5],
            }),
            Scheme::Mpsk => {
                if order < 2 || !order.is_power_of_two() {
                    return Err(Error::InvalidParameter(format!(
                        "M-PSK order must be a power of two >= 2, got {order}"
                    )));
                }
                let m = order as f64;
                let n = (order / 4).max(1);
                let q = (1..=n)
                    .map(|k| ((2.0 * k as f64 - 1.0) * PI / m).sin().powi(2))
                    .collect();
                Ok(Self {
                    scheme,
                    order,
                    delta: 2.0 / m.log2().max(2.0),
                    p: 0.5,
                    q,
                })
            }
            Scheme::Mqam => {
                let root = (order as f64).sqrt().round() as u32;
                if order < 4 || !order.is_power_of_two() || root * root != order {
                    return Err(Error::InvalidParameter(format!(
                        "M-QAM order must be a square power of two >= 4, got {order}"
                    )));
                }
                let m = order as f64;
                let n = root / 2;
                let q = (1..=n)
                    .map(|k| 3.0 * (2.0 * k as f64 - 1.0).powi(2) / (2.0 * (m - 1.0)))
                    .collect();
                Ok(Self {
                    scheme,
                    order,
                    delta: 4.0 / m.log2() * (1.0 - 1.0 / m.sqrt()),
                    p: 0.5,
                    q,
                })
            }
        }
    }

    pub fn ook() -> Self {
        Self::new(Scheme::Ook, 2).expect("OOK is always valid")
    }

    pub fn psk(order: u32) -> Result<Self> {
        Self::new(Scheme::Mpsk, order)
    }

    pub fn qam(order: u32) -> Result<Self> {
        Self::new(Scheme::Mqam, order)
    }

    /// Number of q_k terms.
    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Zero-SNR saturation value delta * n / 2 of the average BER.
    pub fn saturation_ber(&self) -> f64 {
        self.delta * self.n() as f64 / 2.0
    }

    /// Which FSO detection type the scheme is defined for. RF links accept
    /// every scheme.
    pub fn supports_fso_detection(&self, detection: DetectionType) -> bool {
        match self.scheme {
            Scheme::Ook => detection == DetectionType::ImDd,
            Scheme::Mpsk | Scheme::Mqam => detection == DetectionType::Hd,
        }
    }

    /// Instantaneous BER at SNR `gamma`:
    /// Pe(gamma) = (delta/2) sum_k Q(p, q_k gamma).
    ///
    /// This is the integration-by-parts companion of the CDF form and the
    /// quantity averaged by the Monte Carlo BER estimator.
    pub fn conditional_ber(&self, gamma: f64) -> f64 {
        debug_assert!(gamma >= 0.0);
        let sum: f64 = self
            .q
            .iter()
            .map(|&qk| {
                upper_incomplete_gamma_reg(self.p, qk * gamma)
                    .expect("p > 0 and q_k gamma >= 0 by construction")
            })
            .sum();
        0.5 * self.delta * sum
    }

    /// Average BER over a fading distribution given its CDF, by adaptive
    /// quadrature. The substitution g = u^2 removes the integrable
    /// endpoint singularity of g^{p-1} at the origin.
    pub fn avg_ber_from_cdf<F>(&self, cdf: F) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let ln_gamma_p = ln_gamma(self.p);
        let mut total = 0.0;
        for &qk in &self.q {
            let integrand = |u: f64| -> Result<f64> {
                if u == 0.0 {
                    return Ok(0.0);
                }
                let g = u * u;
                let f = cdf(g)?;
                Ok(2.0 * u.powf(2.0 * self.p - 1.0) * (-qk * g).exp() * f)
            };
            let width = (1.0 / qk.sqrt()).max(1.0);
            let integral = quad::integrate_to_inf(integrand, 0.0, width, 1e-10)?;
            total += qk.powf(self.p) * integral;
        }
        Ok(0.5 * self.delta * (-ln_gamma_p).exp() * total)
    }
}
