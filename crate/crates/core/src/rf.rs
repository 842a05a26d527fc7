//! Kappa-mu shadowed RF channel with integer fading parameters.
//!
//! For integer mu and m the SNR MGF is a rational function of s:
//!
//! ```text
//! M(s) = (1 - s W_A)^{m - mu} (1 - s W_B)^{-m}
//!   W_A = gbar / (mu (1+kappa)),  W_B = gbar (mu kappa + m) / (m mu (1+kappa))
//! ```
//!
//! so partial fractions over the (1 - s W)^{-j} basis turn the channel into
//! an exact finite mixture of Gamma distributions. The mixture constants
//! are derived here by binomial expansion of the two-pole form rather than
//! copied from a table, and the hypergeometric PDF is kept as an
//! independent oracle for them.

use rand::Rng;
use rand_distr::{Distribution, Gamma as GammaDist, StandardNormal};

use crate::error::{Error, Result};
use crate::modulation::ModulationSpec;
use crate::specfun::{gamma, ln_gamma, meijer_g, MeijerGParams};

/// Kappa-mu shadowed fading parameters (integer mu and m).
#[derive(Debug, Clone, PartialEq)]
pub struct RfParams {
    /// Ratio of dominant to scattered power.
    pub kappa: f64,
    /// Number of multipath clusters.
    pub mu: u32,
    /// Shadowing severity of the dominant components.
    pub m: u32,
    /// Mean SNR, linear scale.
    pub gamma_bar: f64,
}

/// One Gamma component of the mixture representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    /// Signed weight C_i (weights sum to one; some may be negative).
    pub weight: f64,
    /// Integer shape m_i.
    pub shape: u32,
    /// Scale Omega_i.
    pub scale: f64,
}

/// Finite Gamma mixture exactly representing the kappa-mu shadowed SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaMixture {
    pub components: Vec<MixtureComponent>,
}

fn binom(n: u32, k: u32) -> f64 {
    let mut v = 1.0f64;
    for i in 0..k.min(n - k) {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

impl RfParams {
    pub fn new(kappa: f64, mu: u32, m: u32, gamma_bar: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "RfParams: kappa must be non-negative, got {kappa}"
            )));
        }
        if mu == 0 || m == 0 || mu > 40 || m > 40 {
            return Err(Error::InvalidParameter(format!(
                "RfParams: mu and m must be integers in 1..=40, got mu={mu}, m={m}"
            )));
        }
        if !(gamma_bar > 0.0) || !gamma_bar.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "RfParams: gamma_bar must be positive, got {gamma_bar}"
            )));
        }
        Ok(Self {
            kappa,
            mu,
            m,
            gamma_bar,
        })
    }

    /// Exact Gamma-mixture representation of the SNR distribution.
    pub fn mixture(&self) -> GammaMixture {
        let mu = self.mu as f64;
        let m = self.m as f64;
        let kappa = self.kappa;
        let omega_a = self.gamma_bar / (mu * (1.0 + kappa));

        // kappa = 0 collapses both poles: plain Nakagami/Gamma SNR.
        if kappa == 0.0 {
            return GammaMixture {
                components: vec![MixtureComponent {
                    weight: 1.0,
                    shape: self.mu,
                    scale: omega_a,
                }],
            };
        }

        let rho = (mu * kappa + m) / m; // W_B / W_A > 1
        let omega_b = omega_a * rho;

        if self.mu == self.m {
            return GammaMixture {
                components: vec![MixtureComponent {
                    weight: 1.0,
                    shape: self.m,
                    scale: omega_b,
                }],
            };
        }

        let mut components = Vec::new();
        if self.mu > self.m {
            // M(s) = rho^{-m} u^{-na} (u - tau)^{-m}, u = 1 - s W_A,
            // tau = mu kappa / (mu kappa + m); expand both principal parts.
            let na = self.mu - self.m;
            let tau = mu * kappa / (mu * kappa + m);
            let sign_m = if self.m.is_multiple_of(2) { 1.0 } else { -1.0 };
            for j in 1..=na {
                let a = sign_m
                    * binom(self.m - 1 + na - j, na - j)
                    * tau.powi(-((self.m + na - j) as i32));
                components.push(MixtureComponent {
                    weight: rho.powi(-(self.m as i32)) * a,
                    shape: j,
                    scale: omega_a,
                });
            }
            for j in 1..=self.m {
                let parity = if (self.m - j).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                let b = parity
                    * binom(na + self.m - j - 1, self.m - j)
                    * tau.powi(-((na + self.m - j) as i32));
                components.push(MixtureComponent {
                    weight: rho.powi(-(self.m as i32)) * (1.0 - tau).powi(-(j as i32)) * b,
                    shape: j,
                    scale: omega_b,
                });
            }
        } else {
            // m > mu: the numerator is a polynomial; binomial expansion
            // around u = 1 - s W_B gives shapes mu..=m, all weights positive.
            let nb = self.m - self.mu;
            let g = rho - 1.0; // mu kappa / m
            for k in 0..=nb {
                components.push(MixtureComponent {
                    weight: rho.powi(-(nb as i32)) * binom(nb, k) * g.powi((nb - k) as i32),
                    shape: self.m - k,
                    scale: omega_b,
                });
            }
        }
        GammaMixture { components }
    }

    /// Direct evaluation of the hypergeometric SNR PDF (the oracle for the
    /// mixture constants).
    pub fn pdf_hypergeometric(&self, gamma: f64) -> Result<f64> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rf pdf: gamma must be positive, got {gamma}"
            )));
        }
        let mu = self.mu as f64;
        let m = self.m as f64;
        let kappa = self.kappa;
        let gbar = self.gamma_bar;
        let x = mu * mu * kappa * (1.0 + kappa) * gamma / ((mu * kappa + m) * gbar);
        let ln_pdf = mu * mu.ln() + m * m.ln() + mu * (1.0 + kappa).ln()
            - ln_gamma(mu)
            - gbar.ln()
            - m * (mu * kappa + m).ln()
            + (mu - 1.0) * (gamma / gbar).ln()
            - mu * (1.0 + kappa) * gamma / gbar
            + ln_kummer_int(self.m, self.mu, x);
        Ok(ln_pdf.exp())
    }

    /// Draw one instantaneous SNR from the physical cluster model:
    /// mu clusters of complex Gaussians around dominant components that are
    /// jointly scaled by a Gamma(m) shadowing variate.
    pub fn sample_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mu = self.mu as f64;
        let sigma = (1.0 / (2.0 * mu * (1.0 + self.kappa))).sqrt();
        let dom = (self.kappa / (mu * (1.0 + self.kappa))).sqrt();
        let shadow = GammaDist::new(self.m as f64, 1.0 / self.m as f64).expect("m >= 1");
        let rho = shadow.sample(rng).sqrt();
        let mut w = 0.0;
        for _ in 0..self.mu {
            let x: f64 = StandardNormal.sample(rng);
            let y: f64 = StandardNormal.sample(rng);
            let re = sigma * x + rho * dom;
            let im = sigma * y;
            w += re * re + im * im;
        }
        self.gamma_bar * w
    }
}

/// ln 1F1(a, b; x) for positive integers a, b and x >= 0.
///
/// Small x: plain series (all terms positive). Large x: the confluent
/// series with an integer first argument collapses to an exact finite
/// two-part form (both asymptotic series terminate), evaluated in the log
/// domain so e^x never overflows.
fn ln_kummer_int(a: u32, b: u32, x: f64) -> f64 {
    debug_assert!(a >= 1 && b >= 1 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < 40.0 {
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut af = a as f64;
        let mut bf = b as f64;
        for _ in 0..500 {
            term *= af * x / bf;
            af += 1.0;
            bf += 1.0;
            term /= af - a as f64; // k! built incrementally: term_k = (a)_k x^k / ((b)_k k!)
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
        }
        return sum.ln();
    }
    // dominant part: Gamma(b)/Gamma(a) e^x x^{a-b} sum_{k<a} (b-a)_k (1-a)_k / (k! x^k)
    let (af, bf) = (a as f64, b as f64);
    let mut s1 = 0.0f64;
    let mut term = 1.0f64;
    for k in 0..a {
        if k > 0 {
            let kf = k as f64;
            term *= (bf - af + kf - 1.0) * (1.0 - af + kf - 1.0) / (kf * x);
        }
        s1 += term;
    }
    let ln_dominant = ln_gamma(bf) - ln_gamma(af) + x + (af - bf) * x.ln() + s1.ln();
    // algebraic part: Gamma(b)/Gamma(b-a) (-x)^{-a} sum_{k<b-a} (a)_k (a-b+1)_k / (k! (-x)^k)
    if b > a {
        let mut s2 = 0.0f64;
        let mut term = 1.0f64;
        for k in 0..(b - a) {
            if k > 0 {
                let kf = k as f64;
                term *= (af + kf - 1.0) * (af - bf + kf) / (kf * (-x));
            }
            s2 += term;
        }
        let sign = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
        let ln_alg_mag = ln_gamma(bf) - ln_gamma(bf - af) - af * x.ln() + s2.abs().ln();
        let ratio = sign * s2.signum() * (ln_alg_mag - ln_dominant).exp();
        return ln_dominant + ratio.ln_1p();
    }
    ln_dominant
}

impl GammaMixture {
    /// Mixture PDF (exactly the hypergeometric PDF for valid constants).
    pub fn pdf(&self, gamma: f64) -> Result<f64> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mixture pdf: gamma must be positive, got {gamma}"
            )));
        }
        let mut sum = 0.0;
        for c in &self.components {
            let k = c.shape as f64;
            let ln_term = (k - 1.0) * gamma.ln() - gamma / c.scale - ln_gamma(k) - k * c.scale.ln();
            sum += c.weight * ln_term.exp();
        }
        Ok(sum)
    }

    /// CDF: 1 - sum_i C_i e^{-g/W_i} sum_{r < m_i} (g/W_i)^r / r!.
    pub fn cdf(&self, gamma: f64) -> Result<f64> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mixture cdf: gamma must be non-negative, got {gamma}"
            )));
        }
        if gamma == 0.0 {
            return Ok(0.0);
        }
        let mut tail = 0.0;
        for c in &self.components {
            tail += c.weight * poisson_tail(c.shape, gamma / c.scale);
        }
        Ok((1.0 - tail).clamp(0.0, 1.0))
    }

    /// MGF E[e^{s gamma}] = sum_i C_i (1 - s W_i)^{-m_i} for s < 0.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        if !(s < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mixture mgf: s must be negative, got {s}"
            )));
        }
        Ok(self
            .components
            .iter()
            .map(|c| c.weight * (1.0 - s * c.scale).powi(-(c.shape as i32)))
            .sum())
    }

    /// Same MGF through the Meijer-G identity, kept as a cross-validation
    /// route for the special-function engine.
    pub fn mgf_meijer_g(&self, s: f64) -> Result<f64> {
        if !(s < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mixture mgf: s must be negative, got {s}"
            )));
        }
        let mut sum = 0.0;
        for c in &self.components {
            let params = MeijerGParams::new(1, 1, vec![1.0 - c.shape as f64], vec![0.0])?;
            let g = meijer_g(&params, -s * c.scale)?;
            sum += c.weight / gamma(c.shape as f64) * g;
        }
        Ok(sum)
    }

    /// Outage probability P(SNR < gamma_th).
    pub fn outage(&self, gamma_th: f64) -> Result<f64> {
        if !(gamma_th > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rf outage: threshold must be positive, got {gamma_th}"
            )));
        }
        self.cdf(gamma_th)
    }

    /// Average BER: saturation minus the finite triple sum.
    pub fn avg_ber(&self, spec: &ModulationSpec) -> Result<f64> {
        Ok(spec.saturation_ber() - self.ber_kernel(spec))
    }

    /// The triple sum of the closed-form BER,
    /// (delta / 2 Gamma(p)) sum_k sum_i sum_{r<m_i}
    ///     C_i Gamma(p+r)/r! (q_k W_i)^p (1 + q_k W_i)^{-(p+r)}.
    ///
    /// Also the middle term of the selection-combining BER.
    pub(crate) fn ber_kernel(&self, spec: &ModulationSpec) -> f64 {
        let gamma_p = gamma(spec.p);
        let mut sum = 0.0;
        for &qk in &spec.q {
            for c in &self.components {
                let qw = qk * c.scale;
                let mut r_fact = 1.0;
                for r in 0..c.shape {
                    if r > 0 {
                        r_fact *= r as f64;
                    }
                    sum += c.weight * gamma(spec.p + r as f64) / r_fact
                        * qw.powf(spec.p)
                        * (1.0 + qw).powf(-(spec.p + r as f64));
                }
            }
        }
        0.5 * spec.delta / gamma_p * sum
    }
}

/// e^{-x} sum_{r<k} x^r / r! (upper regularized gamma at integer shape).
fn poisson_tail(k: u32, x: f64) -> f64 {
    let e = (-x).exp();
    if e == 0.0 {
        return 0.0;
    }
    let mut term = e;
    let mut sum = e;
    for r in 1..k {
        term *= x / r as f64;
        sum += term;
    }
    sum
}
