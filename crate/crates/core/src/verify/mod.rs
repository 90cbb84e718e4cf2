//! Verification engine: Monte Carlo estimates, martingale and convergence
//! checks, distribution tests and the product-form characterization checker.

pub mod convergence;
pub mod criteria;
pub mod martingale;
pub mod mc;
pub mod report;
pub mod stats;
pub mod theorem3;

pub use convergence::{ratios_converge, z_convergence_check, ZRow};
pub use martingale::{martingale_check, martingale_check_many, penalized_vs_limit, PenalizedRow};
pub use mc::{mc_expectation, par_samples, McEstimate};
pub use report::ReportRecord;
pub use stats::{
    chi_square_gof, distance_correlation, effective_sample_size, ks_one_sample, ks_two_sample, resample_by_weight,
    ChiSquareResult, KsResult,
};
pub use theorem3::{theorem3_check, Theorem3Report};
