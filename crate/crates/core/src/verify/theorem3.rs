//! Numeric check of the product-form characterization.
//!
//! A density `g(s, x, m) = h(s) f_m(x)` of the admissible form is
//! `e^{-s β²/2} (e^{-β x} + λ_m sinh(β x))` with `λ_m >= 0`. It must solve
//! the heat equation `∂_s g + ½ ∂_xx g = 0` on every branch, have zero
//! weighted flux `Σ μ_m f'_m(0) = 0` at the origin, which amounts to
//! `Σ μ_m λ_m = 1`.

use crate::error::{Error, Result};
use crate::space::BranchSpace;

/// Finite-difference step for both variables.
pub const FD_STEP: f64 = 1e-3;
/// Default absolute tolerance on every residual.
pub const DEFAULT_TOL: f64 = 1e-4;

/// Residuals and verdicts of [`theorem3_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem3Report {
    pub max_pde_residual: f64,
    pub flux_residual: f64,
    pub weight_sum_residual: f64,
    pub pde_pass: bool,
    pub flux_pass: bool,
    pub weight_sum_pass: bool,
    /// All `λ_m >= 0`.
    pub positivity_pass: bool,
}

impl Theorem3Report {
    pub fn passed(&self) -> bool {
        self.pde_pass && self.flux_pass && self.weight_sum_pass && self.positivity_pass
    }
}

/// Residuals of the candidate density built from `beta` and `lambdas`
/// (one per branch, in branch order) on the grid `x_grid × s_grid`.
///
/// ```
/// use spiderlab::verify::theorem3_check;
/// use spiderlab::BranchSpace;
///
/// let space = BranchSpace::uniform(2).unwrap();
/// let ok = theorem3_check(&space, 1.0, &[2.0, 0.0], &[0.0, 0.5, 1.0], &[0.0, 1.0], 1e-4).unwrap();
/// assert!(ok.passed());
/// let bad = theorem3_check(&space, 1.0, &[2.0, 2.0], &[0.0, 0.5, 1.0], &[0.0, 1.0], 1e-4).unwrap();
/// assert!(!bad.weight_sum_pass);
/// ```
pub fn theorem3_check(
    space: &BranchSpace,
    beta: f64,
    lambdas: &[f64],
    x_grid: &[f64],
    s_grid: &[f64],
    tol: f64,
) -> Result<Theorem3Report> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be > 0, got {beta}")));
    }
    if lambdas.len() != space.len() {
        return Err(Error::InvalidSpace(format!(
            "{} coefficients for {} branches",
            lambdas.len(),
            space.len()
        )));
    }
    if x_grid.is_empty() || s_grid.is_empty() {
        return Err(Error::Domain("grids must be nonempty".into()));
    }
    if x_grid.iter().chain(s_grid).any(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Domain("grid points must be finite and >= 0".into()));
    }
    let h = FD_STEP;
    let g = |s: f64, x: f64, lam: f64| (-s * beta * beta / 2.0).exp() * ((-beta * x).exp() + lam * (beta * x).sinh());

    let mut max_pde: f64 = 0.0;
    for &lam in lambdas {
        for &s in s_grid {
            for &x in x_grid {
                // one-sided O(h^2) stencils at the boundaries
                let ds = if s >= h {
                    (g(s + h, x, lam) - g(s - h, x, lam)) / (2.0 * h)
                } else {
                    (-3.0 * g(s, x, lam) + 4.0 * g(s + h, x, lam) - g(s + 2.0 * h, x, lam)) / (2.0 * h)
                };
                let dxx = if x >= h {
                    (g(s, x + h, lam) - 2.0 * g(s, x, lam) + g(s, x - h, lam)) / (h * h)
                } else {
                    (2.0 * g(s, x, lam) - 5.0 * g(s, x + h, lam) + 4.0 * g(s, x + 2.0 * h, lam)
                        - g(s, x + 3.0 * h, lam))
                        / (h * h)
                };
                max_pde = max_pde.max((ds + 0.5 * dxx).abs());
            }
        }
    }
    let flux: f64 = space
        .weights()
        .iter()
        .zip(lambdas)
        .map(|(mu, &lam)| mu * (-3.0 * g(0.0, 0.0, lam) + 4.0 * g(0.0, h, lam) - g(0.0, 2.0 * h, lam)) / (2.0 * h))
        .sum();
    let weight_sum: f64 = space.weights().iter().zip(lambdas).map(|(mu, lam)| mu * lam).sum();
    let weight_sum_residual = (weight_sum - 1.0).abs();
    Ok(Theorem3Report {
        max_pde_residual: max_pde,
        flux_residual: flux.abs(),
        weight_sum_residual,
        pde_pass: max_pde < tol,
        flux_pass: flux.abs() < tol,
        weight_sum_pass: weight_sum_residual < tol,
        positivity_pass: lambdas.iter().all(|&l| l >= 0.0),
    })
}
