//! Special functions: log-gamma, incomplete gamma, Bessel-K and Meijer-G.

mod bessel;
mod bivariate;
mod contour;
mod gamma;
mod incgamma;
mod meijer;

pub use bessel::{bessel_k_real_order, ln_bessel_k};
pub use bivariate::{bivariate_meijer_g, bivariate_meijer_g_scaled, BivariateGSpec};
pub use gamma::{gamma, ln_gamma, ln_gamma_complex, ln_gamma_signed, rgamma, sin_pi};
pub use incgamma::{lower_incomplete_gamma, regularized_lower_gamma, regularized_upper_gamma};
pub use meijer::{
    meijer_g, meijer_g_scaled, meijer_g_with, GEvaluation, MeijerGSpec, Method,
};
