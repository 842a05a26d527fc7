//! Distribution-level check of the FSO SNR sampler against the analytical
//! law: a Kolmogorov-Smirnov test over 1e7 draws plus binomial interval
//! checks of the empirical CDF at fixed grid points.

use rayon::prelude::*;

use hybridlink::montecarlo::{spawn_streams, wilson_interval};
use hybridlink::{DetectionType, FsoParams};

/// Rigorous upper bound on sup |F_emp - F| from values on a grid: between
/// adjacent grid points both functions are monotone, so the supremum over
/// the gap is bounded by the crossed differences at its ends.
fn ks_upper_bound(sorted: &[f64], grid: &[(f64, f64)]) -> f64 {
    let n = sorted.len() as f64;
    let emp = |x: f64| -> f64 {
        let idx = sorted.partition_point(|&s| s < x);
        idx as f64 / n
    };
    let mut bound = 0.0f64;
    let mut prev = (0.0f64, 0.0f64); // (F_emp, F) at the previous grid point
    for &(x, f) in grid {
        let e = emp(x);
        let d1 = (e - prev.1).abs();
        let d2 = (f - prev.0).abs();
        bound = bound.max(d1.max(d2)).max((e - f).abs());
        prev = (e, f);
    }
    // beyond the last grid point both CDFs live in [F(last), 1]
    bound.max(1.0 - prev.1).max(1.0 - prev.0)
}

#[test]
fn fso_sampler_passes_ks_at_one_percent() {
    let ch = FsoParams::new(2.902, 2.51, 1.0, DetectionType::Hd, 100.0).unwrap();
    let n = 10_000_000usize;

    // deterministic parallel sampling
    let mut samples: Vec<f64> = {
        const SHARDS: usize = 128;
        let streams = spawn_streams(0x5A11, SHARDS);
        let ch_ref = &ch;
        streams
            .into_par_iter()
            .enumerate()
            .flat_map_iter(|(i, mut rng)| {
                let count = n / SHARDS + usize::from(i < n % SHARDS);
                (0..count)
                    .map(move |_| ch_ref.sample_snr(&mut rng))
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    samples.par_sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    // coarse pass to find quantile-balanced evaluation points, then the
    // exact CDF on the refined grid; equal F-gaps keep the grid-gap term
    // of the KS bound small
    let coarse: Vec<f64> = (0..=300)
        .map(|i| 1e-4f64 * (1e7f64 / 1e-4).powf(i as f64 / 300.0))
        .collect();
    let coarse_f: Vec<f64> = coarse.par_iter().map(|&x| ch.cdf(x).unwrap()).collect();
    let k = 24_000usize;
    let mut grid_x = Vec::with_capacity(k);
    let mut target = 0.5 / k as f64;
    for w in coarse.windows(2).zip(coarse_f.windows(2)) {
        let ((x0, x1), (f0, f1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
        while target < f1 {
            let t = if f1 > f0 {
                (target - f0) / (f1 - f0)
            } else {
                0.5
            };
            grid_x.push(x0 + t.clamp(0.0, 1.0) * (x1 - x0));
            target += 1.0 / k as f64;
        }
        let _ = f0;
    }
    let grid: Vec<(f64, f64)> = grid_x
        .par_iter()
        .map(|&x| (x, ch.cdf(x).unwrap()))
        .collect();

    let d_bound = ks_upper_bound(&samples, &grid);
    let critical = 1.628 / (n as f64).sqrt(); // 1% significance
    assert!(
        d_bound < critical,
        "KS bound {d_bound:.4e} >= 1% critical value {critical:.4e}"
    );
    println!("KS bound {d_bound:.4e} vs critical {critical:.4e} (n = 1e7)");

    // empirical CDF inside 3-sigma binomial intervals at 10 fixed points
    for i in 1..=10 {
        let x = 10f64.powf(-1.5 + 3.5 * i as f64 / 10.0);
        let f = ch.cdf(x).unwrap();
        let hits = samples.partition_point(|&s| s < x) as u64;
        let (lo, hi) = wilson_interval(hits, n as u64, 3.0);
        assert!(
            f >= lo && f <= hi,
            "x = {x}: closed-form CDF {f:.6e} outside [{lo:.6e}, {hi:.6e}]"
        );
    }
}
