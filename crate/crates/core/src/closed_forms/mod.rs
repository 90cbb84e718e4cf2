//! Closed-form quantities: regime classification, the limiting martingale
//! density, the explicit majorants of the normalizing constant and their
//! quadrature counterparts.

mod density;
mod exact;
mod local_time_law;
mod majorants;
mod regime;

pub use density::{limit_branch_law, martingale_density, theta_weights, MartingaleDensity, ThetaWeights};
pub use exact::{i_exact, j_exact, z_exact};
pub use local_time_law::{
    hit_probability, joint_density_local_time, joint_density_mass, radial_cdf, radial_density,
};
pub use majorants::{
    asymptotic_density_ratio, asymptotic_row, i_star, j_star, ln_z_star_asymptotic, z_star,
    z_star_asymptotic, AsymptoticRow,
};
pub use regime::{classify_regime, Regime, RegimeTag};
