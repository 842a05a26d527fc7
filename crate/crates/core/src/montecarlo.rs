//! Monte Carlo estimation of outage probability and average BER with
//! deterministic, worker-count-independent results.
//!
//! Sampling is partitioned over a fixed number of logical shards, each
//! drawing from its own counter-derived RNG stream; worker threads only
//! decide which shards run where, and the reduction folds shard partials
//! in index order. Estimates are therefore bit-identical for any worker
//! count given the same master seed.
//!
//! BER is estimated by averaging the conditional BER at each sampled SNR
//! rather than by simulating bits: the estimator is exact in expectation
//! (integration by parts of the CDF form) and has orders of magnitude
//! lower variance at small error rates.

use rand::Rng;
use rand_pcg::Pcg64;
use rayon::prelude::*;

use crate::combining::{Combiner, HybridLink};
use crate::error::{Error, Result};
use crate::fso::FsoParams;
use crate::modulation::ModulationSpec;
use crate::rf::RfParams;

/// Number of logical sampling shards. Fixed so results never depend on
/// the worker count.
const SHARDS: u64 = 128;

/// Monte Carlo run configuration.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub samples: u64,
    pub master_seed: u64,
    pub workers: usize,
    /// Two-sided confidence level of the reported interval.
    pub ci_level: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 10_000_000,
            master_seed: 0x5eed_1e57_u64,
            workers: 4,
            // 3-sigma two-sided coverage
            ci_level: 0.9973,
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<f64> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter(
                "McConfig: samples must be positive".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter(
                "McConfig: workers must be positive".into(),
            ));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "McConfig: ci_level must lie in (0,1), got {}",
                self.ci_level
            )));
        }
        Ok(normal_quantile(0.5 * (1.0 + self.ci_level)))
    }
}

/// A Monte Carlo point estimate with its confidence interval.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub point: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples_used: u64,
}

/// The link being simulated.
#[derive(Debug, Clone)]
pub enum LinkModel {
    Fso(FsoParams),
    Rf(RfParams),
    Hybrid(HybridLink, Combiner),
}

impl LinkModel {
    pub fn sample_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            LinkModel::Fso(p) => p.sample_snr(rng),
            LinkModel::Rf(p) => p.sample_snr(rng),
            LinkModel::Hybrid(link, comb) => link.sample_snr(*comb, rng),
        }
    }

    /// Analytical outage for the same link (for side-by-side reporting).
    pub fn analytical_outage(&self, gamma_th: f64) -> Result<f64> {
        match self {
            LinkModel::Fso(p) => p.outage(gamma_th),
            LinkModel::Rf(p) => p.mixture().outage(gamma_th),
            LinkModel::Hybrid(link, comb) => link.outage(*comb, gamma_th),
        }
    }

    /// Analytical average BER for the same link.
    pub fn analytical_avg_ber(&self, spec: &ModulationSpec) -> Result<f64> {
        match self {
            LinkModel::Fso(p) => p.avg_ber(spec),
            LinkModel::Rf(p) => p.mixture().avg_ber(spec),
            LinkModel::Hybrid(link, comb) => link.avg_ber(*comb, spec),
        }
    }

    fn check_modulation(&self, spec: &ModulationSpec) -> Result<()> {
        let det = match self {
            LinkModel::Fso(p) => Some(p.detection),
            LinkModel::Rf(_) => None,
            LinkModel::Hybrid(link, _) => Some(link.fso.detection),
        };
        if let Some(det) = det {
            if !spec.supports_fso_detection(det) {
                return Err(Error::IncompatibleModulation(format!(
                    "{:?} is not defined for FSO {:?}",
                    spec.scheme, det
                )));
            }
        }
        Ok(())
    }
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// The k-th stream for a master seed; a pure function of (master_seed, k).
fn stream(master_seed: u64, k: u64) -> Pcg64 {
    let mut st = master_seed ^ k.wrapping_mul(0xa0761d6478bd642f);
    let a = splitmix(&mut st);
    let b = splitmix(&mut st);
    let c = splitmix(&mut st);
    let d = splitmix(&mut st);
    let state = ((a as u128) << 64) | b as u128;
    let incr = (((c as u128) << 64) | d as u128) | 1;
    Pcg64::new(state, incr)
}

/// Deterministic per-stream RNGs derived from a master seed. Stream k does
/// not depend on how many other streams exist.
pub fn spawn_streams(master_seed: u64, count: usize) -> Vec<Pcg64> {
    (0..count as u64).map(|k| stream(master_seed, k)).collect()
}

fn shard_sizes(samples: u64) -> Vec<u64> {
    let base = samples / SHARDS;
    let rem = samples % SHARDS;
    (0..SHARDS).map(|i| base + u64::from(i < rem)).collect()
}

fn run_sharded<T, F>(cfg: &McConfig, per_shard: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64, &mut Pcg64) -> T + Sync,
{
    let sizes = shard_sizes(cfg.samples);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let seed = cfg.master_seed;
    Ok(pool.install(|| {
        (0..SHARDS as usize)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(seed, i as u64);
                per_shard(i, sizes[i], &mut rng)
            })
            .collect()
    }))
}

/// Estimate the outage probability P(SNR < gamma_th) by direct counting,
/// with a Wilson score interval at the configured level.
pub fn estimate_outage(link: &LinkModel, gamma_th: f64, cfg: &McConfig) -> Result<McEstimate> {
    if !(gamma_th > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "estimate_outage: threshold must be positive, got {gamma_th}"
        )));
    }
    let z = cfg.validate()?;
    let partials = run_sharded(cfg, |_i, n, rng| {
        let mut hits = 0u64;
        for _ in 0..n {
            if link.sample_snr(rng) < gamma_th {
                hits += 1;
            }
        }
        hits
    })?;
    let hits: u64 = partials.iter().sum();
    let n = cfg.samples;
    let p_hat = hits as f64 / n as f64;
    let std_error = (p_hat * (1.0 - p_hat) / n as f64).sqrt();
    let (ci_low, ci_high) = wilson_interval(hits, n, z);
    Ok(McEstimate {
        point: p_hat,
        std_error,
        ci_low: ci_low.min(p_hat),
        ci_high: ci_high.max(p_hat),
        samples_used: n,
    })
}

/// Estimate the average BER as the sample mean of the conditional BER.
pub fn estimate_ber(link: &LinkModel, spec: &ModulationSpec, cfg: &McConfig) -> Result<McEstimate> {
    link.check_modulation(spec)?;
    let z = cfg.validate()?;
    let partials = run_sharded(cfg, |_i, n, rng| {
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for _ in 0..n {
            let ber = spec.conditional_ber(link.sample_snr(rng));
            sum += ber;
            sum_sq += ber * ber;
        }
        (sum, sum_sq)
    })?;
    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0f64, 0.0f64), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let n = cfg.samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let std_error = (var / n).sqrt();
    let sat = spec.saturation_ber();
    Ok(McEstimate {
        point: mean,
        std_error,
        ci_low: (mean - z * std_error).max(0.0),
        ci_high: (mean + z * std_error).min(sat),
        samples_used: cfg.samples,
    })
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Inverse standard-normal CDF (Acklam's rational approximation,
/// |relative error| < 1.2e-9; ample for confidence-interval quantiles).
#[allow(clippy::excessive_precision)] // coefficients quoted verbatim
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "normal_quantile: p in (0,1), got {p}");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}
