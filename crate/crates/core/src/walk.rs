//! Exact one-step bridge quantities for Gaussian walks.
//!
//! Given the endpoints `a`, `b` of a Brownian step of length `dt` (with or
//! without drift, the bridge does not see it), the maximum and the local
//! time at zero over the step have explicit conditional laws; both are
//! sampled by inversion from a single uniform.

use rand::Rng;
use rand_distr::StandardNormal;

/// Uniform on `(0, 1]`, safe to take the logarithm of.
#[inline]
pub(crate) fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

#[inline]
pub(crate) fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Maximum over the step of a Brownian bridge from `a` to `b`.
///
/// `P(max > m) = exp(-2 (m - a)(m - b) / dt)` for `m >= max(a, b)`.
#[inline]
pub(crate) fn bridge_maximum(a: f64, b: f64, dt: f64, u: f64) -> f64 {
    let d = b - a;
    0.5 * (a + b + (d * d - 2.0 * dt * u.ln()).sqrt())
}

/// Local time at zero over the step of a Brownian bridge from `a` to `b`,
/// normalized so that `|B| - L` is a martingale.
///
/// `P(ell > l) = exp(-((|a| + |b| + l)^2 - (b - a)^2) / (2 dt))`.
#[inline]
pub(crate) fn bridge_local_time(a: f64, b: f64, dt: f64, u: f64) -> f64 {
    let d = b - a;
    ((d * d - 2.0 * dt * u.ln()).sqrt() - a.abs() - b.abs()).max(0.0)
}

/// Number of grid steps covering `[0, t_end]` at spacing `step`.
pub(crate) fn step_count(t_end: f64, step: f64) -> crate::Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(crate::Error::Config(format!("step must be > 0, got {step}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(crate::Error::Config(format!("t_end must be > 0, got {t_end}")));
    }
    if step > t_end * (1.0 + 1e-12) {
        return Err(crate::Error::Config(format!(
            "step {step} exceeds the horizon {t_end}"
        )));
    }
    Ok(((t_end / step).round() as usize).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bridge_maximum_is_at_least_both_ends() {
        for (a, b) in [(0.0, 0.0), (1.0, -2.0), (-0.3, 0.4)] {
            for u in [1.0, 0.5, 1e-9] {
                let m = bridge_maximum(a, b, 0.01, u);
                assert!(m >= a.max(b) - 1e-15);
            }
            assert!((bridge_maximum(a, b, 0.01, 1.0) - a.max(b)).abs() < 1e-15);
        }
    }

    #[test]
    fn bridge_local_time_vanishes_without_a_crossing_when_u_is_large() {
        // same-sign endpoints: no zero with probability 1 - exp(-2ab/dt)
        let p_hit = (-2.0f64 * 0.1 * 0.2 / 0.01).exp();
        assert_eq!(bridge_local_time(0.1, 0.2, 0.01, p_hit * 1.01), 0.0);
        assert!(bridge_local_time(0.1, 0.2, 0.01, p_hit * 0.99) > 0.0);
        // opposite signs always cross
        assert!(bridge_local_time(-0.1, 0.2, 0.01, 0.999) > 0.0);
    }

    #[test]
    fn step_count_rounds_to_the_grid() {
        assert_eq!(step_count(1.0, 1e-3).unwrap(), 1000);
        assert_eq!(step_count(0.3, 0.1).unwrap(), 3);
        assert!(step_count(1.0, 0.0).is_err());
        assert!(step_count(1.0, 2.0).is_err());
    }
}
