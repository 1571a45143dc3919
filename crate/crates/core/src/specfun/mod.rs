//! Exact mathematics: rates, counting constants, generating functions,
//! quadrature oracles and coefficient extraction.
//!
//! All functions are pure.

mod extract;
mod gamma;
mod gf;
mod identities;
pub mod quad;
mod rates;
pub mod series;
mod transform;

pub use extract::{order_three_report, pgf_extract, series_law, Extraction, OrderThreeReport, DEFAULT_RADIUS, MAX_ORDER};
pub use gamma::{
    beta_fn, binomial, catalan_trees, gamma, gamma_p, gamma_q, ln_beta, ln_binomial, log_gamma, normal_cdf,
};
pub use gf::{gf_phi, gf_phi_c, gf_psi, gf_psi_c, gf_w, GfPoint, Marginal};
pub use identities::{
    delta0, i_func, i_func_c, quad_delta, quad_j, quad_three_halves_first, quad_three_halves_zeroth,
    three_halves_closed, DEGENERATE_THRESHOLD,
};
pub use rates::{laplace_exponent, laplace_exponent_quad, rate_bk_general, rate_nk, rate_total, rate_total_by_sum, LambdaMeasure};
pub use transform::{f_theta, laplace_sigma, poisson_leaf_mass, sigma_moment, DeltaCoeffs};
