// Negated comparisons like `!(x > 0.0)` are used on purpose: they reject
// NaN together with the out-of-range values in a single predicate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Performance analysis of free-space optical, RF and hybrid FSO/RF links.
//!
//! The crate models a Gamma-Gamma turbulence channel with pointing errors
//! under heterodyne or IM/DD detection, a kappa-mu shadowed RF channel with
//! integer fading parameters, and their combination under selection or
//! maximal-ratio diversity. For each link it provides the analytical outage
//! probability and average bit-error rate in closed form (Meijer-G, Fox-H
//! and bivariate Fox-H evaluated by Mellin-Barnes contour integration),
//! exact SNR samplers for Monte Carlo verification, and quadrature oracles
//! that cross-check every closed form through an independent route.

pub mod combining;
pub mod error;
pub mod fso;
pub mod modulation;
pub mod montecarlo;
pub mod presets;
pub mod quad;
pub mod rf;
pub mod specfun;

pub use combining::{Combiner, HybridLink};
pub use error::{Error, Result};
pub use fso::{DetectionType, FsoParams};
pub use modulation::{ModulationSpec, Scheme};
pub use montecarlo::{
    estimate_ber, estimate_outage, spawn_streams, LinkModel, McConfig, McEstimate,
};
pub use rf::{GammaMixture, MixtureComponent, RfParams};
