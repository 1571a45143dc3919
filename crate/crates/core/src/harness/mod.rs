//! Seeded replicate-parallel experiments, goodness-of-fit statistics and
//! verification reports.

mod experiments;
mod report;
pub mod rng;
pub mod stats;

pub use experiments::{
    run_experiment, suite, verify, Experiment, ExperimentConfig, DUST_DRAWS, H1_DRAWS, THETA_GRID_STEP, THETA_MAX,
    W_ZERO_N,
};
pub use report::{Check, Estimate, Relation, ReportBuilder, StatReport, ARTIFACT_VERSION, SCHEMA_VERSION};
pub use stats::{chi_square, chi_square_homogeneity, ks_statistic, rayleigh_cdf, ChiSquare};
