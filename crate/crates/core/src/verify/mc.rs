//! Monte Carlo plumbing: parallel per-trajectory evaluation and estimates.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::math::pairwise_sum;
use crate::rng::RngStream;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub std_error: f64,
    pub n: usize,
}

impl McEstimate {
    /// Estimate from raw samples; every value must be finite.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                index: i as u64,
                value: values[i],
            });
        }
        let n = values.len();
        let mean = pairwise_sum(values) / n as f64;
        let std_error = if n > 1 {
            let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            (pairwise_sum(&dev) / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Ok(McEstimate { mean, std_error, n })
    }

    /// Whether `target` lies within `k` standard errors of the mean.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Evaluate `f` on trajectories `0..n` of `seed`, in parallel, returning
/// results in trajectory order.
pub fn par_samples<T, F>(n: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(RngStream) -> Result<T> + Sync + Send,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| f(RngStream::new(seed, i)))
        .collect()
}

/// Mean and standard error of `functional` over `n` independent
/// trajectories.
///
/// ```
/// use spiderlab::verify::mc_expectation;
///
/// let one = mc_expectation(100, 7, |_stream| Ok(1.0)).unwrap();
/// assert_eq!((one.mean, one.std_error), (1.0, 0.0));
/// ```
pub fn mc_expectation<F>(n: usize, seed: u64, functional: F) -> Result<McEstimate>
where
    F: Fn(RngStream) -> Result<f64> + Sync + Send,
{
    if n < 2 {
        return Err(Error::Config(format!("Monte Carlo needs n >= 2, got {n}")));
    }
    let values = par_samples(n, seed, functional)?;
    McEstimate::from_samples(&values)
}
