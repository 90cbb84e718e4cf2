//! Monte Carlo checks of the limiting density and of the penalization
//! convergence.

use crate::closed_forms::MartingaleDensity;
use crate::error::{Error, Result};
use crate::math::pairwise_sum;
use crate::space::{BranchSpace, PenaltyParams};
use crate::spider_sim::{path_stats, simulate_spider, PathPoint};
use crate::verify::mc::{par_samples, McEstimate};
use crate::verify::stats::effective_sample_size;

/// `E[M(α, γ, X_s, N_s, L_s, s)]` over `n` spider paths; the target is 1.
pub fn martingale_check(
    params: &PenaltyParams,
    space: &BranchSpace,
    s: f64,
    n: usize,
    step: f64,
    seed: u64,
) -> Result<McEstimate> {
    let mut out = martingale_check_many(std::slice::from_ref(params), space, s, n, step, seed)?;
    Ok(out.remove(0))
}

/// [`martingale_check`] for several parameter sets on the same paths.
pub fn martingale_check_many(
    params: &[PenaltyParams],
    space: &BranchSpace,
    s: f64,
    n: usize,
    step: f64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    if n < 2 {
        return Err(Error::Config(format!("Monte Carlo needs n >= 2, got {n}")));
    }
    let densities = params
        .iter()
        .map(|p| MartingaleDensity::new(p, space))
        .collect::<Result<Vec<_>>>()?;
    let rows = par_samples(n, seed, |stream| {
        let path = simulate_spider(space, s, step, stream)?;
        let pt = path_stats(&path, s)?;
        Ok(densities
            .iter()
            .map(|m| m.eval(pt.x, pt.branch, pt.local_time, s))
            .collect::<Vec<f64>>())
    })?;
    (0..params.len())
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            McEstimate::from_samples(&col)
        })
        .collect()
}

/// Ratio estimate `Σ F w / Σ w` with its delta-method standard error and
/// effective sample size. `log_w` may be unnormalized.
pub fn weighted_mean(values: &[f64], log_w: &[f64]) -> Result<(McEstimate, f64)> {
    if values.is_empty() || values.len() != log_w.len() {
        return Err(Error::EmptySample);
    }
    let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    let sw = pairwise_sum(&w);
    let fw: Vec<f64> = values.iter().zip(&w).map(|(f, w)| f * w).collect();
    let mean = pairwise_sum(&fw) / sw;
    let dev: Vec<f64> = values.iter().zip(&w).map(|(f, w)| (w * (f - mean)).powi(2)).collect();
    let std_error = pairwise_sum(&dev).sqrt() / sw;
    let ess = effective_sample_size(&w);
    Ok((
        McEstimate {
            mean,
            std_error,
            n: values.len(),
        },
        ess,
    ))
}

/// One row of [`penalized_vs_limit`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenalizedRow {
    pub t: f64,
    /// `E[F e^{α X_t + γ L_t}] / E[e^{α X_t + γ L_t}]`.
    pub penalized: McEstimate,
    /// `E[F M_s]`.
    pub limit: McEstimate,
    pub ess: f64,
    /// Set when the effective sample size is below the floor; convergence
    /// is then not asserted for this row.
    pub heavy_tail: bool,
}

/// Minimum effective sample size for a penalized estimate to count.
pub const ESS_FLOOR: f64 = 100.0;

/// Penalized expectations of `F(X_s, N_s, L_s)` at each horizon `t` against
/// the limit `E[F M_s]`, all from the same `n` spider paths.
#[allow(clippy::too_many_arguments)]
pub fn penalized_vs_limit<F>(
    params: &PenaltyParams,
    space: &BranchSpace,
    s: f64,
    t_grid: &[f64],
    functional: F,
    n: usize,
    step: f64,
    seed: u64,
) -> Result<Vec<PenalizedRow>>
where
    F: Fn(PathPoint) -> f64 + Sync + Send,
{
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > s)) {
        return Err(Error::Config(format!("every horizon must exceed s = {s}")));
    }
    if n < 2 {
        return Err(Error::Config(format!("Monte Carlo needs n >= 2, got {n}")));
    }
    let density = MartingaleDensity::new(params, space)?;
    let t_max = t_grid.iter().cloned().fold(s, f64::max);
    // per path: F(s), F(s) M_s, then one log-weight per horizon
    let rows = par_samples(n, seed, |stream| {
        let path = simulate_spider(space, t_max, step, stream)?;
        let at_s = path_stats(&path, s)?;
        let f = functional(at_s);
        let m = density.eval(at_s.x, at_s.branch, at_s.local_time, s);
        let mut out = vec![f, f * m];
        for &t in t_grid {
            let pt = path_stats(&path, t)?;
            let a = pt.branch.map_or(0.0, |b| params.alpha_of(b));
            out.push(a * pt.x + params.gamma() * pt.local_time);
        }
        Ok(out)
    })?;
    let fs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let limit_vals: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let limit = McEstimate::from_samples(&limit_vals)?;
    t_grid
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let lw: Vec<f64> = rows.iter().map(|r| r[2 + j]).collect();
            let (penalized, ess) = weighted_mean(&fs, &lw)?;
            Ok(PenalizedRow {
                t,
                penalized,
                limit,
                ess,
                heavy_tail: ess < ESS_FLOOR,
            })
        })
        .collect()
}
