//! Adaptive real-axis quadrature used by the verification oracles.
//!
//! A 15-point Gauss-Kronrod rule with interval bisection covers finite
//! intervals; semi-infinite integrals grow the upper limit until the tail
//! stops contributing. Integrands are fallible so special-function errors
//! propagate out of the oracles instead of being silently absorbed.

use crate::error::{Error, Result};

/// Kronrod abscissae for the 7-15 pair (positive half, descending).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Embedded 7-point Gauss weights (for the odd-indexed abscissae).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod panel: returns (integral, error estimate).
fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;

    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();

    let mut values = [0.0f64; 15];
    values[7] = fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x)?;
        let f2 = f(center + x)?;
        values[j] = f1;
        values[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((values[j] - mean).abs() + (values[14 - j] - mean).abs());
    }

    let raw_err = ((kronrod - gauss) * half).abs();
    res_asc *= half.abs();
    res_abs *= half.abs();

    // QUADPACK error rescaling.
    let mut err = raw_err;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    let min_err = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && min_err > err {
        err = min_err;
    }

    Ok((kronrod * half, err))
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// Bisects the worst panel until the summed error estimate satisfies
/// `abs_tol + rel_tol * |integral|` or the panel budget is exhausted.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let abs_floor = abs_tol.max(1e-300);
    let (v, e) = gk15(&f, a, b)?;
    let mut panels = vec![(a, b, v, e)];
    let mut total_v = v;
    let mut total_e = e;
    const MAX_PANELS: usize = 4000;

    while total_e > abs_floor + rel_tol * total_v.abs() {
        if panels.len() >= MAX_PANELS {
            return Err(Error::Convergence(format!(
                "adaptive quadrature: {} panels, error {:.3e} vs target {:.3e}",
                panels.len(),
                total_e,
                abs_floor + rel_tol * total_v.abs()
            )));
        }
        // split the panel with the largest error estimate
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, old_v, old_e) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval at floating-point resolution; accept as-is
            panels.push((lo, hi, old_v, 0.0));
            total_e -= old_e;
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid)?;
        let (v2, e2) = gk15(&f, mid, hi)?;
        total_v += v1 + v2 - old_v;
        total_e += e1 + e2 - old_e;
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
    Ok(total_v)
}

/// Integral of `f` over `[a, inf)` for integrands with decaying tails.
///
/// Doubles the window width until two consecutive windows contribute less
/// than `rel_tol` of the accumulated value.
pub fn integrate_to_inf<F>(f: F, a: f64, initial_width: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut lo = a;
    let mut width = initial_width.max(1e-12);
    let mut total = 0.0f64;
    let mut quiet = 0;
    for _ in 0..80 {
        let hi = lo + width;
        let abs_tol = rel_tol * 0.01 * total.abs();
        let seg = integrate(&f, lo, hi, rel_tol * 0.1, abs_tol)?;
        total += seg;
        if seg.abs() <= rel_tol * total.abs().max(1e-300) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::Convergence(
        "semi-infinite integral tail did not settle".into(),
    ))
}

/// Monotone (Fritsch-Carlson) cubic interpolant.
///
/// Used by the heavier verification oracles to tabulate an expensive CDF
/// once and then integrate against it cheaply; monotonicity of the data is
/// preserved so a tabulated CDF stays a CDF.
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidParameter(
                "MonotoneCubic: need at least two matching nodes".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "MonotoneCubic: abscissae must be strictly increasing".into(),
            ));
        }
        let n = xs.len();
        let mut deltas = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            deltas.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut slopes = vec![0.0; n];
        // three-point one-sided estimates at the ends, projected so the
        // interpolant stays monotone
        let endpoint = |h0: f64, h1: f64, d0: f64, d1: f64| -> f64 {
            let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if d * d0 <= 0.0 {
                0.0
            } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
                3.0 * d0
            } else {
                d
            }
        };
        slopes[0] = if n > 2 {
            endpoint(xs[1] - xs[0], xs[2] - xs[1], deltas[0], deltas[1])
        } else {
            deltas[0]
        };
        slopes[n - 1] = if n > 2 {
            endpoint(
                xs[n - 1] - xs[n - 2],
                xs[n - 2] - xs[n - 3],
                deltas[n - 2],
                deltas[n - 3],
            )
        } else {
            deltas[n - 2]
        };
        for i in 1..n - 1 {
            if deltas[i - 1] * deltas[i] <= 0.0 {
                slopes[i] = 0.0;
            } else {
                // harmonic mean keeps the interpolant monotone
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                slopes[i] = (w1 + w2) / (w1 / deltas[i - 1] + w2 / deltas[i]);
            }
        }
        // Fritsch-Carlson limiter
        for i in 0..n - 1 {
            if deltas[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
            } else {
                let a = slopes[i] / deltas[i];
                let b = slopes[i + 1] / deltas[i];
                let s = (a * a + b * b).sqrt();
                if s > 3.0 {
                    slopes[i] = 3.0 * a / s * deltas[i];
                    slopes[i + 1] = 3.0 * b / s * deltas[i];
                }
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    /// Evaluate at `x`; clamps outside the tabulated range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        h00 * self.ys[i]
            + h10 * h * self.slopes[i]
            + h01 * self.ys[i + 1]
            + h11 * h * self.slopes[i + 1]
    }
}
