//! Bivariate Fox-H function by double Mellin-Barnes contour integration.
//!
//! The evaluator computes
//!
//! ```text
//! H[x, y] = (1/2*pi*i)^2 \int\int J(u, t) x^u y^t du dt
//!
//! J(u, t) = prod Gamma(a + alpha*u + A*t)      [joint numerator]
//!         / prod Gamma(b + beta*u + B*t)       [joint denominator]
//!         * T1(u) * T2(t)
//! ```
//!
//! where each per-variable block `Tk` carries the usual H-function rows
//! read against a positive variable exponent:
//!
//! ```text
//! Tk(s) = prod_{j<=m} Gamma(b_j - B_j s) prod_{j<=n} Gamma(1 - a_j + A_j s)
//!         ---------------------------------------------------------------
//!         prod_{j>m} Gamma(1 - b_j + B_j s) prod_{j>n} Gamma(a_j - A_j s)
//! ```
//!
//! This is the layout produced by carrying out the inverse Laplace
//! transform of a product of one Meijer-G and one Fox-H transform pair,
//! which is how every bivariate closed form in this crate arises. The two
//! contours run parallel to the imaginary axis and the tensor-product
//! trapezoid refines both axes until the estimate settles.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::foxh::FoxHParams;
use crate::specfun::gamma::log_gamma_complex;

/// Joint gamma entry: Gamma(offset + u_coeff * u + t_coeff * t).
pub type JointEntry = (f64, f64, f64);

/// Parameter block of the two-variable H-function.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateFoxHParams {
    /// Joint gammas in the numerator.
    pub joint_num: Vec<JointEntry>,
    /// Joint gammas in the denominator (no pole constraints: 1/Gamma is entire).
    pub joint_den: Vec<JointEntry>,
    /// Rows of the first variable's block.
    pub var1: FoxHParams,
    /// Rows of the second variable's block.
    pub var2: FoxHParams,
}

impl BivariateFoxHParams {
    pub fn new(
        joint_num: Vec<JointEntry>,
        joint_den: Vec<JointEntry>,
        var1: FoxHParams,
        var2: FoxHParams,
    ) -> Result<Self> {
        if joint_num
            .iter()
            .chain(joint_den.iter())
            .any(|&(a, cu, ct)| !a.is_finite() || !(cu > 0.0) || !(ct > 0.0))
        {
            return Err(Error::InvalidParameter(
                "fox_h_bivariate: joint coefficients must be positive and finite".into(),
            ));
        }
        Ok(Self {
            joint_num,
            joint_den,
            var1,
            var2,
        })
    }

    /// Admissible abscissa strip of a per-variable block under the
    /// positive-exponent reading (the mirror image of the univariate strip).
    fn mirrored_strip(block: &FoxHParams) -> (f64, f64) {
        let (lo, hi) = block.pole_strip();
        (-hi, -lo)
    }
}

/// log of a per-variable block read against a positive exponent,
/// i.e. Theta(-s) of the univariate convention.
fn log_block(block: &FoxHParams, s: Complex64) -> Result<Option<Complex64>> {
    block.log_theta(-s)
}

struct AxisPlan {
    abscissa: f64,
    half_length: f64,
}

/// Truncation solve shared with the univariate planner: find T with
/// (pi * delta / 2) T - rho ln(1+T) ~ 45.
fn truncation(delta: f64, rho: f64) -> Result<f64> {
    if delta <= 0.05 {
        return Err(Error::Convergence(format!(
            "bivariate contour integrand decays too slowly (delta = {delta:.3})"
        )));
    }
    let rate = std::f64::consts::FRAC_PI_2 * delta;
    let mut t = 45.0 / rate;
    for _ in 0..4 {
        t = (45.0 + rho.max(0.0) * (1.0 + t).ln()) / rate;
    }
    Ok((1.3 * t).max(5.0))
}

fn plan_axes(params: &BivariateFoxHParams) -> Result<(AxisPlan, AxisPlan)> {
    let strip1 = BivariateFoxHParams::mirrored_strip(&params.var1);
    let strip2 = BivariateFoxHParams::mirrored_strip(&params.var2);
    let pick = |(lo, hi): (f64, f64)| -> Result<f64> {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) if lo < hi => Ok(0.5 * (lo + hi)),
            (true, false) => Ok(lo + 1.0),
            (false, true) => Ok(hi - 1.0),
            (false, false) => Ok(0.0),
            _ => Err(Error::PoleSeparation(format!(
                "bivariate block strip ({lo}, {hi}) is empty"
            ))),
        }
    };
    let cu = pick(strip1)?;
    let ct = pick(strip2)?;

    // Joint numerator gammas put poles on the hyperplane a + alpha u + A t
    // = -k; both contours must keep them to the left.
    for &(a, au, at) in &params.joint_num {
        if a + au * cu + at * ct <= 0.0 {
            return Err(Error::PoleSeparation(format!(
                "joint gamma ({a}, {au}, {at}) has poles across the contours"
            )));
        }
    }

    // Per-axis exponential decay: the joint numerator adds decay, the joint
    // denominator (reciprocal gammas) adds growth.
    let num_u: f64 = params.joint_num.iter().map(|e| e.1).sum();
    let den_u: f64 = params.joint_den.iter().map(|e| e.1).sum();
    let num_t: f64 = params.joint_num.iter().map(|e| e.2).sum();
    let den_t: f64 = params.joint_den.iter().map(|e| e.2).sum();
    let delta_u = params.var1.decay_delta() + num_u - den_u;
    let delta_t = params.var2.decay_delta() + num_t - den_t;

    // Algebraic growth from the joint entries, evaluated at the abscissas.
    let joint_rho: f64 = params
        .joint_num
        .iter()
        .map(|&(a, au, at)| a + au * cu + at * ct - 0.5)
        .sum::<f64>()
        - params
            .joint_den
            .iter()
            .map(|&(b, bu, bt)| b + bu * cu + bt * ct - 0.5)
            .sum::<f64>();
    let rho_u = mirrored_growth_rho(&params.var1, cu) + joint_rho;
    let rho_t = mirrored_growth_rho(&params.var2, ct) + joint_rho;

    Ok((
        AxisPlan {
            abscissa: cu,
            half_length: truncation(delta_u, rho_u)?,
        },
        AxisPlan {
            abscissa: ct,
            half_length: truncation(delta_t, rho_t)?,
        },
    ))
}

fn mirrored_growth_rho(block: &FoxHParams, c: f64) -> f64 {
    let mut rho = 0.0;
    for (j, &(b, bc)) in block.lower.iter().enumerate() {
        let x = b - bc * c;
        if j < block.m {
            rho += x - 0.5;
        } else {
            rho -= (1.0 - x) - 0.5;
        }
    }
    for (j, &(a, ac)) in block.upper.iter().enumerate() {
        let x = a - ac * c;
        if j < block.n {
            rho += (1.0 - x) - 0.5;
        } else {
            rho -= x - 0.5;
        }
    }
    rho
}

/// Evaluate the joint gamma factor at a grid point; `None` marks a zero
/// of the integrand (denominator gamma pole).
fn log_joint(
    params: &BivariateFoxHParams,
    u: Complex64,
    t: Complex64,
) -> Result<Option<Complex64>> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(a, au, at) in &params.joint_num {
        acc += log_gamma_complex(Complex64::new(a, 0.0) + au * u + at * t)?;
    }
    for &(b, bu, bt) in &params.joint_den {
        match log_gamma_complex(Complex64::new(b, 0.0) + bu * u + bt * t) {
            Ok(v) => acc -= v,
            Err(_) => return Ok(None),
        }
    }
    Ok(Some(acc))
}

/// Per-axis node values phi(s) = block(s) * z^s at the trapezoid nodes of
/// one refinement level, ordered center-outward as (imaginary part, value).
///
/// With `midpoints` set, only the half-offset nodes of the next refinement
/// are produced so a finer grid reuses all previous evaluations.
fn axis_values(
    block: &FoxHParams,
    plan: &AxisPlan,
    ln_z: f64,
    h: f64,
    midpoints: bool,
) -> Result<Vec<(f64, Complex64)>> {
    let mut out = Vec::new();
    let start = if midpoints { 0.5 } else { 0.0 };
    let mut k = 0usize;
    loop {
        let tau = start + k as f64;
        if tau * h > plan.half_length * (1.0 + 1e-12) {
            break;
        }
        let signs: &[f64] = if tau == 0.0 { &[1.0] } else { &[1.0, -1.0] };
        for &sgn in signs {
            let im = sgn * tau * h;
            let s = Complex64::new(plan.abscissa, im);
            let v = match log_block(block, s)? {
                Some(lb) => (lb + s * ln_z).exp(),
                None => Complex64::new(0.0, 0.0),
            };
            out.push((im, v));
        }
        k += 1;
    }
    Ok(out)
}

/// Tensor-product trapezoid over both contours for one refinement level.
///
/// `u_nodes`/`t_nodes` carry every node of the current grid (weights equal;
/// endpoint weights are immaterial at the chosen truncations since the
/// integrand there is ~1e-18 of its peak). Returns (sum, l1_mass).
fn grid_sum(
    params: &BivariateFoxHParams,
    u_nodes: &[(f64, Complex64)],
    t_nodes: &[(f64, Complex64)],
    cu: f64,
    ct: f64,
    tail_eps: f64,
) -> Result<(Complex64, f64)> {
    let mut total = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0f64;
    let mut peak_row = 0.0f64;
    let mut quiet_rows = 0usize;

    let t_norm_max = t_nodes.iter().map(|(_, v)| v.norm()).fold(0.0f64, f64::max);

    for &(nu, phi1) in u_nodes {
        if phi1.norm() == 0.0 {
            continue;
        }
        let u = Complex64::new(cu, nu);
        let mut row = Complex64::new(0.0, 0.0);
        let mut row_l1 = 0.0f64;
        let mut row_peak = 0.0f64;
        let mut quiet = 0usize;
        for &(tau, phi2) in t_nodes {
            if phi2.norm() < tail_eps * t_norm_max {
                continue;
            }
            let t = Complex64::new(ct, tau);
            let term = match log_joint(params, u, t)? {
                Some(lj) => lj.exp() * phi2,
                None => continue,
            };
            let norm = term.norm();
            row += term;
            row_l1 += norm;
            if norm > row_peak {
                row_peak = norm;
                quiet = 0;
            } else if norm < tail_eps * row_peak {
                quiet += 1;
                if quiet > 16 {
                    // nodes are ordered center-outward in alternating signs,
                    // so a long quiet run means both tails are done
                    break;
                }
            }
        }
        let row_mass = (phi1 * row).norm();
        total += phi1 * row;
        l1 += phi1.norm() * row_l1;
        if row_mass > peak_row {
            peak_row = row_mass;
            quiet_rows = 0;
        } else if row_mass < tail_eps * peak_row {
            quiet_rows += 1;
            if quiet_rows > 16 {
                break;
            }
        }
    }
    Ok((total, l1))
}

/// Evaluate the bivariate H-function at positive arguments.
pub fn fox_h_bivariate(params: &BivariateFoxHParams, x: f64, y: f64) -> Result<f64> {
    fox_h_bivariate_impl(params, x, y, 1e-10)
}

/// Same with a caller-chosen relative tolerance for the level doubling.
pub fn fox_h_bivariate_with_tol(
    params: &BivariateFoxHParams,
    x: f64,
    y: f64,
    rel_tol: f64,
) -> Result<f64> {
    fox_h_bivariate_impl(params, x, y, rel_tol)
}

fn fox_h_bivariate_impl(params: &BivariateFoxHParams, x: f64, y: f64, rel_tol: f64) -> Result<f64> {
    if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "fox_h_bivariate: arguments must be positive, got ({x}, {y})"
        )));
    }
    let (plan_u, plan_t) = plan_axes(params)?;
    let tail_eps = 1e-16;
    let ln_x = x.ln();
    let ln_y = y.ln();

    let mut n = 64usize;
    let mut h_u = 2.0 * plan_u.half_length / n as f64;
    let mut h_t = 2.0 * plan_t.half_length / n as f64;

    let by_center =
        |a: &(f64, Complex64), b: &(f64, Complex64)| a.0.abs().partial_cmp(&b.0.abs()).unwrap();
    let mut u_nodes = axis_values(&params.var1, &plan_u, ln_x, h_u, false)?;
    let mut t_nodes = axis_values(&params.var2, &plan_t, ln_y, h_t, false)?;

    let (total, _) = grid_sum(
        params,
        &u_nodes,
        &t_nodes,
        plan_u.abscissa,
        plan_t.abscissa,
        tail_eps,
    )?;
    let mut estimate = total * h_u * h_t;
    let mut converged = false;

    const MAX_LEVELS: usize = 6;
    for _ in 0..MAX_LEVELS {
        // halve both spacings: new node set = old nodes + per-axis midpoints
        u_nodes.extend(axis_values(&params.var1, &plan_u, ln_x, h_u, true)?);
        t_nodes.extend(axis_values(&params.var2, &plan_t, ln_y, h_t, true)?);
        u_nodes.sort_by(by_center);
        t_nodes.sort_by(by_center);
        h_u *= 0.5;
        h_t *= 0.5;
        n *= 2;

        let (s, m) = grid_sum(
            params,
            &u_nodes,
            &t_nodes,
            plan_u.abscissa,
            plan_t.abscissa,
            tail_eps,
        )?;
        let refined = s * h_u * h_t;
        let refined_mass = m * h_u * h_t;
        let diff = (refined - estimate).norm();
        let target = rel_tol * refined.norm() + 1e-14 * refined_mass;
        estimate = refined;
        if diff <= target {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "bivariate contour integral not converged at {n}x{n} nodes"
        )));
    }

    let value = estimate / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    if value.im.abs() > 1e-5 * value.re.abs() + 1e-10 {
        return Err(Error::Convergence(format!(
            "bivariate contour integral has non-real value {value}"
        )));
    }
    Ok(value.re)
}
