//! Simulation and numerical verification of exponentially penalized Walsh
//! spiders.
//!
//! - [`closed_forms`]: regimes, the limiting martingale density, majorants
//!   of the normalizing constant, their large-time equivalents, and
//!   quadrature evaluations of the exact expectations.
//! - [`spider_sim`]: spider paths from the origin via the Lévy construction.
//! - [`limit_laws`]: samplers for the limit processes.
//! - [`verify`]: Monte Carlo and quadrature checks tying the two together.
//! - [`experiment`]: config-driven runs producing CSV tables and plots.

// NaN-rejecting guards are written as `!(v > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod error;
pub mod experiment;
pub mod limit_laws;
mod math;
pub mod quadrature;
pub mod rng;
pub mod space;
pub mod spider_sim;
pub mod verify;
mod walk;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use space::{Branch, BranchSpace, PenaltyParams};
pub use spider_sim::{
    excursions, inverse_local_time, path_stats, simulate_spider, simulate_spider_with, Excursion, LocalTimeScheme,
    PathPoint, SpiderPath,
};

// Compile and run the guide's code blocks as doctests, one module per chapter.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spider.md")]
    mod spider {}
    #[doc = include_str!("../../../book/src/penalization.md")]
    mod penalization {}
    #[doc = include_str!("../../../book/src/normalizers.md")]
    mod normalizers {}
    #[doc = include_str!("../../../book/src/limit-processes.md")]
    mod limit_processes {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
