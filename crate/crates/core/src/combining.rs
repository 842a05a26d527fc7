//! SC and MRC diversity combining of one FSO branch and one RF branch.
//!
//! Selection combining takes the larger branch SNR, so its CDF is the
//! product of the branch CDFs; the expanded Meijer-G sum of that product is
//! kept as a cross-check route. Maximal-ratio combining adds the branch
//! SNRs; its CDF and average BER come from inverse-Laplace closed forms in
//! a bivariate Fox-H function, verified against a direct convolution
//! oracle.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fso::FsoParams;
use crate::modulation::ModulationSpec;
use crate::quad;
use crate::rf::{GammaMixture, RfParams};
use crate::specfun::{
    fox_h, fox_h_bivariate_with_tol, gamma, ln_gamma, meijer_g, BivariateFoxHParams, FoxHParams,
    MeijerGParams,
};

/// Diversity combining scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combiner {
    /// Selection combining: output SNR is the branch maximum.
    Sc,
    /// Maximal-ratio combining: output SNR is the branch sum.
    Mrc,
}

/// One FSO branch plus one RF branch feeding a diversity combiner.
#[derive(Debug, Clone)]
pub struct HybridLink {
    pub fso: FsoParams,
    pub rf: RfParams,
    mixture: GammaMixture,
}

#[derive(Hash, PartialEq, Eq, Clone, Copy)]
struct BivariateKey {
    shape: u32,
    r: u32,
    p_bits: u64,
    alpha_bits: u64,
    beta_bits: u64,
    xi_bits: u64,
    x_bits: u64,
    y_bits: u64,
}

/// Memo for bivariate H evaluations: SNR sweeps revisit the same branch
/// parameters, and each evaluation costs a double contour integral.
fn bivariate_cache() -> &'static Mutex<HashMap<BivariateKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<BivariateKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

const BIVARIATE_CACHE_CAP: usize = 8192;

impl HybridLink {
    pub fn new(fso: FsoParams, rf: RfParams) -> Self {
        let mixture = rf.mixture();
        Self { fso, rf, mixture }
    }

    /// The RF branch's Gamma-mixture representation.
    pub fn mixture(&self) -> &GammaMixture {
        &self.mixture
    }

    // -- Selection combining -------------------------------------------

    /// SC output-SNR CDF: the product of the branch CDFs.
    pub fn sc_cdf(&self, gamma: f64) -> Result<f64> {
        Ok(self.fso.cdf(gamma)? * self.mixture.cdf(gamma)?)
    }

    /// The same CDF assembled from its expanded three-term sum (branch CDF
    /// minus the mixture tail plus the cross Meijer-G term). Used to
    /// cross-check the product route.
    pub fn sc_cdf_expanded(&self, gamma: f64) -> Result<f64> {
        if gamma == 0.0 {
            return Ok(0.0);
        }
        let xi2 = self.fso.xi * self.fso.xi;
        let front = (xi2.ln() - ln_gamma(self.fso.alpha) - ln_gamma(self.fso.beta)).exp();
        let g_params = MeijerGParams::new(
            4,
            0,
            vec![1.0, xi2 + 1.0],
            vec![0.0, xi2, self.fso.alpha, self.fso.beta],
        )?;
        let r = self.fso.detection.order() as f64;
        let w = self.fso.alpha
            * self.fso.beta
            * self.fso.pointing_fraction()
            * (gamma / self.fso.mu_r).powf(1.0 / r);
        let g_val = meijer_g(&g_params, w)?;

        let mut tail = 0.0;
        for c in &self.mixture.components {
            let x = gamma / c.scale;
            let e = (-x).exp();
            let mut term = e;
            for rho in 0..c.shape {
                if rho > 0 {
                    term *= x / rho as f64;
                }
                tail += c.weight * term;
            }
        }
        Ok(self.fso.cdf(gamma)? - tail + front * g_val * tail)
    }

    /// SC outage probability.
    pub fn sc_outage(&self, gamma_th: f64) -> Result<f64> {
        if !(gamma_th > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sc outage: threshold must be positive, got {gamma_th}"
            )));
        }
        self.sc_cdf(gamma_th)
    }

    /// SC average BER: single-FSO term, minus the RF kernel, plus the
    /// cross term with one Fox-H evaluation per (k, i, rho).
    pub fn sc_avg_ber(&self, spec: &ModulationSpec) -> Result<f64> {
        let p1 = self.fso.avg_ber(spec)?; // also validates compatibility
        let p2 = self.mixture.ber_kernel(spec);

        let xi2 = self.fso.xi * self.fso.xi;
        let r = self.fso.detection.order() as f64;
        let h = self.fso.pointing_fraction();
        let ab = self.fso.alpha * self.fso.beta;
        let front =
            (xi2.ln() - ln_gamma(self.fso.alpha) - ln_gamma(self.fso.beta) - ln_gamma(spec.p))
                .exp();

        let mut p3 = 0.0;
        for &qk in &spec.q {
            for c in &self.mixture.components {
                let qw = qk * c.scale;
                let shifted = qk + 1.0 / c.scale;
                let z = ab * h * (shifted * self.fso.mu_r).powf(-1.0 / r);
                let mut rho_fact = 1.0;
                for rho in 0..c.shape {
                    if rho > 0 {
                        rho_fact *= rho as f64;
                    }
                    let params = FoxHParams::new(
                        4,
                        1,
                        vec![
                            (1.0 - spec.p - rho as f64, 1.0 / r),
                            (1.0, 1.0),
                            (xi2 + 1.0, 1.0),
                        ],
                        vec![
                            (0.0, 1.0),
                            (xi2, 1.0),
                            (self.fso.alpha, 1.0),
                            (self.fso.beta, 1.0),
                        ],
                    )?;
                    let h_val = fox_h(&params, z)?;
                    p3 += c.weight * qw.powf(spec.p) * (1.0 + qw).powf(-(spec.p + rho as f64))
                        / rho_fact
                        * h_val;
                }
            }
        }
        Ok(p1 - p2 + 0.5 * spec.delta * front * p3)
    }

    // -- Maximal-ratio combining ----------------------------------------

    /// MRC output-SNR MGF: the branch MGFs factor over independence.
    pub fn mrc_mgf(&self, s: f64) -> Result<f64> {
        Ok(self.fso.mgf(s)? * self.mixture.mgf(s)?)
    }

    /// MRC output-SNR CDF via the bivariate Fox-H closed form, one
    /// evaluation per mixture component.
    pub fn mrc_cdf(&self, gamma: f64) -> Result<f64> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mrc cdf: gamma must be non-negative, got {gamma}"
            )));
        }
        if gamma == 0.0 {
            return Ok(0.0);
        }
        let r = self.fso.detection.order() as f64;
        let y = self.fso.alpha
            * self.fso.beta
            * self.fso.pointing_fraction()
            * (gamma / self.fso.mu_r).powf(1.0 / r);
        let front =
            ((self.fso.xi * self.fso.xi).ln() - ln_gamma(self.fso.alpha) - ln_gamma(self.fso.beta))
                .exp()
                / r;
        let mut sum = 0.0;
        for c in &self.mixture.components {
            let x = gamma / c.scale;
            let h = self.bivariate_component(c.shape, None, x, y)?;
            sum += c.weight / gamma_fact(c.shape) * h;
        }
        Ok((front * sum).max(0.0))
    }

    /// Independent verification route for the MRC CDF:
    /// F(g) = \int_0^g F_FSO(g - t) f_RF(t) dt by adaptive quadrature.
    ///
    /// The RF density may be concentrated many orders of magnitude below
    /// `gamma`, so the integration range is split at RF-scale-proportional
    /// breakpoints before the adaptive rule sees it.
    pub fn mrc_cdf_oracle(&self, gamma: f64) -> Result<f64> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mrc cdf oracle: gamma must be non-negative, got {gamma}"
            )));
        }
        if gamma == 0.0 {
            return Ok(0.0);
        }
        let rf_scale = self
            .mixture
            .components
            .iter()
            .map(|c| c.shape as f64 * c.scale)
            .fold(0.0f64, f64::max);
        let mut breaks = vec![0.0];
        let mut t = (0.5 * rf_scale).min(gamma);
        while t < gamma {
            breaks.push(t);
            t *= 8.0;
        }
        breaks.push(gamma);

        let mut total = 0.0f64;
        for pair in breaks.windows(2) {
            if pair[1] <= pair[0] {
                continue;
            }
            total += quad::integrate(
                |t| Ok(self.fso.cdf(gamma - t)? * self.mixture.pdf(t)?),
                pair[0],
                pair[1],
                1e-9,
                1e-13 * (1.0 + total.abs()),
            )?;
        }
        Ok(total)
    }

    /// MRC outage probability.
    pub fn mrc_outage(&self, gamma_th: f64) -> Result<f64> {
        if !(gamma_th > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mrc outage: threshold must be positive, got {gamma_th}"
            )));
        }
        self.mrc_cdf(gamma_th)
    }

    /// MRC average BER via the bivariate Fox-H closed form, one evaluation
    /// per (modulation term, mixture component) pair.
    pub fn mrc_avg_ber(&self, spec: &ModulationSpec) -> Result<f64> {
        if !spec.supports_fso_detection(self.fso.detection) {
            return Err(Error::IncompatibleModulation(format!(
                "{:?} is not defined for FSO {:?}",
                spec.scheme, self.fso.detection
            )));
        }
        let r = self.fso.detection.order() as f64;
        let ab_h = self.fso.alpha * self.fso.beta * self.fso.pointing_fraction();
        let front = ((self.fso.xi * self.fso.xi).ln()
            - ln_gamma(self.fso.alpha)
            - ln_gamma(self.fso.beta)
            - ln_gamma(spec.p))
        .exp()
            * 0.5
            * spec.delta
            / r;
        let mut sum = 0.0;
        for &qk in &spec.q {
            let y = ab_h * (self.fso.mu_r * qk).powf(-1.0 / r);
            for c in &self.mixture.components {
                let x = 1.0 / (qk * c.scale);
                let h = self.bivariate_component(c.shape, Some(spec.p), x, y)?;
                sum += c.weight / gamma_fact(c.shape) * h;
            }
        }
        Ok(front * sum)
    }

    /// Shared bivariate evaluation for one mixture component. `p` present
    /// selects the BER layout (extra joint numerator gamma), absent the
    /// CDF layout.
    fn bivariate_component(&self, shape: u32, p: Option<f64>, x: f64, y: f64) -> Result<f64> {
        let key = BivariateKey {
            shape,
            r: self.fso.detection.order(),
            p_bits: p.unwrap_or(-1.0).to_bits(),
            alpha_bits: self.fso.alpha.to_bits(),
            beta_bits: self.fso.beta.to_bits(),
            xi_bits: self.fso.xi.to_bits(),
            x_bits: x.to_bits(),
            y_bits: y.to_bits(),
        };
        if let Some(v) = bivariate_cache().lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let xi2 = self.fso.xi * self.fso.xi;
        let r = self.fso.detection.order() as f64;
        let var1 = FoxHParams::new(1, 1, vec![(1.0, 1.0)], vec![(shape as f64, 1.0)])?;
        let var2 = FoxHParams::new(
            3,
            1,
            vec![(1.0, 1.0 / r), (xi2 + 1.0, 1.0)],
            vec![(xi2, 1.0), (self.fso.alpha, 1.0), (self.fso.beta, 1.0)],
        )?;
        let joint_num = match p {
            Some(p) => vec![(p, 1.0, 1.0 / r)],
            None => vec![],
        };
        let params = BivariateFoxHParams::new(joint_num, vec![(1.0, 1.0, 1.0 / r)], var1, var2)?;
        let v = fox_h_bivariate_with_tol(&params, x, y, 1e-10)?;

        let mut cache = bivariate_cache().lock().unwrap();
        if cache.len() >= BIVARIATE_CACHE_CAP {
            cache.clear();
        }
        cache.insert(key, v);
        Ok(v)
    }

    // -- Dispatch helpers -------------------------------------------------

    pub fn cdf(&self, combiner: Combiner, gamma: f64) -> Result<f64> {
        match combiner {
            Combiner::Sc => self.sc_cdf(gamma),
            Combiner::Mrc => self.mrc_cdf(gamma),
        }
    }

    pub fn outage(&self, combiner: Combiner, gamma_th: f64) -> Result<f64> {
        match combiner {
            Combiner::Sc => self.sc_outage(gamma_th),
            Combiner::Mrc => self.mrc_outage(gamma_th),
        }
    }

    pub fn avg_ber(&self, combiner: Combiner, spec: &ModulationSpec) -> Result<f64> {
        match combiner {
            Combiner::Sc => self.sc_avg_ber(spec),
            Combiner::Mrc => self.mrc_avg_ber(spec),
        }
    }

    /// Draw one combined-output SNR.
    pub fn sample_snr<R: Rng + ?Sized>(&self, combiner: Combiner, rng: &mut R) -> f64 {
        let a = self.fso.sample_snr(rng);
        let b = self.rf.sample_snr(rng);
        match combiner {
            Combiner::Sc => a.max(b),
            Combiner::Mrc => a + b,
        }
    }
}

fn gamma_fact(shape: u32) -> f64 {
    gamma(shape as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fso::DetectionType;

    fn moderate_link(mu: f64, gbar: f64) -> HybridLink {
        let fso = FsoParams::new(2.296, 1.822, 1.0, DetectionType::Hd, mu).unwrap();
        let rf = RfParams::new(5.0, 1, 2, gbar).unwrap();
        HybridLink::new(fso, rf)
    }

    #[test]
    fn sc_cdf_routes_agree() {
        let link = moderate_link(10.0, 10.0);
        for i in 1..=12 {
            let g = i as f64 * 2.0;
            let product = link.sc_cdf(g).unwrap();
            let expanded = link.sc_cdf_expanded(g).unwrap();
            assert!(
                (product - expanded).abs() < 1e-9 * product.max(1e-12),
                "g = {g}: product {product}, expanded {expanded}"
            );
        }
    }

    #[test]
    fn sc_cdf_bounded_by_branches() {
        let link = moderate_link(10.0, 10.0);
        for i in 1..=50 {
            let g = i as f64 * 0.8;
            let sc = link.sc_cdf(g).unwrap();
            let f = link.fso.cdf(g).unwrap();
            let r = link.mixture().cdf(g).unwrap();
            assert!(sc <= f.min(r) + 1e-14, "g = {g}");
        }
    }

    #[test]
    fn sc_ber_matches_cdf_quadrature() {
        let link = moderate_link(100.0, 31.622776601683793);
        let bpsk = ModulationSpec::psk(2).unwrap();
        let closed = link.sc_avg_ber(&bpsk).unwrap();
        let oracle = bpsk.avg_ber_from_cdf(|g| link.sc_cdf(g)).unwrap();
        assert!(
            (closed - oracle).abs() < 1e-6 * oracle,
            "closed {closed} vs oracle {oracle}"
        );
    }

    #[test]
    fn mrc_mgf_factorizes() {
        let link = moderate_link(10.0, 10.0);
        for &s in &[-0.01, -0.5, -3.0] {
            let joint = link.mrc_mgf(s).unwrap();
            let split = link.fso.mgf(s).unwrap() * link.mixture().mgf(s).unwrap();
            assert!((joint - split).abs() < 1e-12 * joint.abs());
        }
    }

    #[test]
    fn mrc_cdf_limits() {
        let link = moderate_link(10.0, 10.0);
        assert_eq!(link.mrc_cdf(0.0).unwrap(), 0.0);
        let tiny = link.mrc_cdf(1e-4).unwrap();
        assert!((0.0..1e-4).contains(&tiny), "tiny {tiny}");
        let big = link.mrc_cdf(1e4 * 20.0).unwrap();
        assert!((big - 1.0).abs() < 1e-4, "big {big}");
    }

    #[test]
    fn mrc_cdf_matches_convolution_oracle() {
        let link = moderate_link(10.0, 10.0);
        for &g in &[5.0, 8.0] {
            let closed = link.mrc_cdf(g).unwrap();
            let oracle = link.mrc_cdf_oracle(g).unwrap();
            assert!(
                (closed - oracle).abs() < 1e-5 * oracle,
                "g = {g}: closed {closed}, oracle {oracle}"
            );
        }
    }

    #[test]
    fn mrc_oracle_with_vanishing_rf_branch_is_fso_cdf() {
        let fso = FsoParams::new(2.296, 1.822, 1.0, DetectionType::Hd, 10.0).unwrap();
        let rf = RfParams::new(5.0, 1, 2, 1e-9).unwrap();
        let link = HybridLink::new(fso.clone(), rf);
        for &g in &[2.0, 10.0] {
            let conv = link.mrc_cdf_oracle(g).unwrap();
            let branch = fso.cdf(g).unwrap();
            assert!(
                (conv - branch).abs() < 1e-5,
                "g = {g}: conv {conv}, fso {branch}"
            );
        }
    }

    #[test]
    fn mrc_oracle_monotone() {
        let link = moderate_link(10.0, 10.0);
        let mut prev = 0.0;
        for i in 1..=25 {
            let g = i as f64 * 1.6;
            let v = link.mrc_cdf_oracle(g).unwrap();
            assert!(v >= prev - 1e-12, "g = {g}");
            prev = v;
        }
    }

    #[test]
    fn outage_domination_chain() {
        let link = moderate_link(10.0, 10.0);
        for &g in &[1.0, 2.0, 3.981] {
            let mrc = link.mrc_outage(g).unwrap();
            let sc = link.sc_outage(g).unwrap();
            let fso = link.fso.outage(g).unwrap();
            let rf = link.mixture().outage(g).unwrap();
            assert!(
                mrc <= sc + 1e-10 && sc <= fso.min(rf) + 1e-12,
                "g = {g}: mrc {mrc}, sc {sc}, fso {fso}, rf {rf}"
            );
        }
    }

    #[test]
    fn ber_domination_chain() {
        let link = moderate_link(100.0, 31.622776601683793);
        let qpsk = ModulationSpec::psk(4).unwrap();
        let mrc = link.mrc_avg_ber(&qpsk).unwrap();
        let sc = link.sc_avg_ber(&qpsk).unwrap();
        let fso = link.fso.avg_ber(&qpsk).unwrap();
        let rf = link.mixture().avg_ber(&qpsk).unwrap();
        assert!(
            mrc <= sc + 1e-10 && sc <= fso.min(rf) + 1e-10,
            "mrc {mrc}, sc {sc}, fso {fso}, rf {rf}"
        );
    }

    #[test]
    fn mrc_ber_with_vanishing_rf_branch_is_fso_ber() {
        let fso = FsoParams::new(2.064, 1.342, 1.0, DetectionType::Hd, 100.0).unwrap();
        let rf = RfParams::new(5.0, 1, 2, 1e-9).unwrap();
        let link = HybridLink::new(fso.clone(), rf);
        let bpsk = ModulationSpec::psk(2).unwrap();
        let combined = link.mrc_avg_ber(&bpsk).unwrap();
        let alone = fso.avg_ber(&bpsk).unwrap();
        assert!(
            (combined - alone).abs() < 1e-3 * alone,
            "combined {combined}, fso alone {alone}"
        );
    }

    #[test]
    fn incompatible_modulation_is_rejected() {
        let link = moderate_link(10.0, 10.0);
        assert!(link.sc_avg_ber(&ModulationSpec::ook()).is_err());
        assert!(link.mrc_avg_ber(&ModulationSpec::ook()).is_err());
    }
}
