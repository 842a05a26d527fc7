//! Special functions: complex log-gamma, incomplete gamma, and the
//! Meijer-G / Fox-H family evaluated by Mellin-Barnes contour integration.

mod bivariate;
mod foxh;
mod gamma;

pub use bivariate::{fox_h_bivariate, fox_h_bivariate_with_tol, BivariateFoxHParams};
pub use foxh::{
    fox_h, fox_h_with_plan, meijer_g, plan_contour, ContourPlan, FoxHParams, MeijerGParams,
};
pub use gamma::{gamma, ln_gamma, log_gamma_complex, upper_incomplete_gamma_reg};
