//! Secrecy performance of RIS-assisted links over mixture-Gamma fading.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`);
//! the aliases below fix it to `f64`, which is what the simulator and the
//! command-line front end use.

pub mod cascade;
pub mod channel;
pub mod error;
pub mod mcsim;
pub mod quad;
pub mod scalar;
pub mod secrecy;
pub mod specfun;

pub use cascade::{
    cascade_moments, cdf_ar, fit_cascade, pdf_ar, product_moment, sum_moments, CascadeFit,
};
pub use channel::{mg_cdf, mg_from_nakagami, mg_from_rice, mg_moment, mg_pdf, MgTerm, MixtureGamma};
pub use error::{Error, Result};
pub use mcsim::{estimate_metrics, McEstimate, McMetrics, Scenario};
pub use scalar::Real;
pub use secrecy::{
    avg_secrecy_rate_full, avg_secrecy_rate_partial, ergodic_capacity_b, ergodic_capacity_e,
    gamma_b_cdf, gamma_b_pdf, gamma_e_cdf, gamma_e_pdf, prob_zero_secrecy, LinkBudget, Path,
    SecrecyConfig, Variant,
};
pub use specfun::{bivariate_meijer_g, meijer_g, BivariateGSpec, MeijerGSpec};

pub type MixtureGammaF64 = MixtureGamma<f64>;
pub type MixtureGammaF32 = MixtureGamma<f32>;
pub type CascadeFitF64 = CascadeFit<f64>;
pub type CascadeFitF32 = CascadeFit<f32>;
pub type SecrecyConfigF64 = SecrecyConfig<f64>;
pub type SecrecyConfigF32 = SecrecyConfig<f32>;
pub type LinkBudgetF64 = LinkBudget<f64>;
pub type MeijerGSpecF64 = MeijerGSpec<f64>;
pub type BivariateGSpecF64 = BivariateGSpec<f64>;
