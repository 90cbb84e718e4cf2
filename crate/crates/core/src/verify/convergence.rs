//! Quadrature sweep of `Z / Z*` along a time grid.

use crate::closed_forms::{z_exact, z_star};
use crate::error::{Error, Result};
use crate::space::{Branch, BranchSpace, PenaltyParams};

/// One row of [`z_convergence_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZRow {
    pub t: f64,
    pub z_exact: f64,
    pub z_star: f64,
    pub ratio: f64,
}

/// Relative slack allowed when comparing a ratio with 1 or with its
/// predecessor; the positive-`γ` majorant is attained to rounding.
pub const RATIO_SLACK: f64 = 1e-9;

/// `Z`, `Z*` and their ratio at each `t`; `t_grid` must be positive and
/// increasing.
pub fn z_convergence_check(
    params: &PenaltyParams,
    space: &BranchSpace,
    x: f64,
    k: Branch,
    t_grid: &[f64],
) -> Result<Vec<ZRow>> {
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > 0.0)) || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("t_grid must be positive and increasing".into()));
    }
    t_grid
        .iter()
        .map(|&t| {
            let star = z_star(params, space, x, k, t)?;
            let exact = z_exact(params, space, x, k, t, star * 1e-13)?.value;
            Ok(ZRow {
                t,
                z_exact: exact,
                z_star: star,
                ratio: exact / star,
            })
        })
        .collect()
}

/// Ratios never exceed 1, never decrease, and the last lies in `[1 - band, 1]`
/// (all up to [`RATIO_SLACK`]).
pub fn ratios_converge(rows: &[ZRow], band: f64) -> bool {
    let bounded = rows.iter().all(|r| r.ratio > 0.0 && r.ratio <= 1.0 + RATIO_SLACK);
    let increasing = rows.windows(2).all(|w| w[1].ratio >= w[0].ratio * (1.0 - RATIO_SLACK));
    let last = rows.last().is_some_and(|r| r.ratio >= 1.0 - band);
    bounded && increasing && last
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_negative_sweep_approaches_one() {
        let s = BranchSpace::uniform(2).unwrap();
        let p = PenaltyParams::new(&s, vec![-1.0, -1.0], -1.0).unwrap();
        let rows = z_convergence_check(&p, &s, 0.0, Branch(0), &[10.0, 100.0, 1000.0]).unwrap();
        assert!(ratios_converge(&rows, 0.1));
        assert!(rows[2].ratio > 0.99);
    }

    #[test]
    fn grid_must_increase() {
        let s = BranchSpace::uniform(2).unwrap();
        let p = PenaltyParams::new(&s, vec![-1.0, -1.0], -1.0).unwrap();
        assert!(z_convergence_check(&p, &s, 0.0, Branch(0), &[10.0, 1.0]).is_err());
    }
}
