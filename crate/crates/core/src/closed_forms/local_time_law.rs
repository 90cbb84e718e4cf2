//! Joint law of the local time at zero and the distance to zero of a
//! Brownian motion started at `x >= 0`.
//!
//! With `Y` a Brownian motion from `x`, `L_t` its local time at zero:
//!
//! ```text
//! P_x(L_t in dl, |Y_t| in dy) = sqrt(2 / (pi t^3)) (l + x + y) exp(-(l + x + y)^2 / 2t) dl dy
//! ```
//!
//! for `l, y > 0`. Integrating along the segments `l + y = z` gives the
//! radial law of `L_t + |Y_t|` on `{L_t > 0}`, and the position along the
//! segment, `|Y_t| / (L_t + |Y_t|)`, is uniform and independent of it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{gaussian_window, integrate, QuadOptions, QuadResult, TRUNCATION_LOG_DROP};

/// Joint density of `(L_t, |Y_t|)` under `P_x` at `(l, y)`.
pub fn joint_density_local_time(x: f64, t: f64, l: f64, y: f64) -> Result<f64> {
    if !(t > 0.0 && l > 0.0 && y > 0.0 && x >= 0.0) {
        return Err(Error::Domain(format!(
            "joint density needs t, l, y > 0 and x >= 0 (got x={x}, t={t}, l={l}, y={y})"
        )));
    }
    let z = l + x + y;
    Ok((2.0 / (PI * t.powi(3))).sqrt() * z * (-z * z / (2.0 * t)).exp())
}

/// Density at `u` of the first hitting time of zero from `a > 0`.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn hitting_density(a: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    a / (2.0 * PI * u.powi(3)).sqrt() * (-a * a / (2.0 * u)).exp()
}

/// Density of `L_t + |Y_t|` restricted to `{L_t > 0}` at `z > 0`.
pub fn radial_density(x: f64, t: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    (2.0 / (PI * t.powi(3))).sqrt() * z * (x + z) * (-(x + z).powi(2) / (2.0 * t)).exp()
}

/// `P_x(L_t + |Y_t| <= z, L_t > 0)`, by quadrature of [`radial_density`].
pub fn radial_cdf(x: f64, t: f64, z: f64) -> Result<f64> {
    if !(t > 0.0 && x >= 0.0) {
        return Err(Error::Domain(format!("radial law needs t > 0, x >= 0 (t={t}, x={x})")));
    }
    if z <= 0.0 {
        return Ok(0.0);
    }
    let opts = QuadOptions::with_abs_tol(1e-14);
    let peak = (-x + (x * x + 8.0 * t).sqrt()) / 2.0;
    let breaks: Vec<f64> = if peak < z { vec![0.0, peak, z] } else { vec![0.0, z] };
    Ok(integrate(|w| radial_density(x, t, w), &breaks, opts)?.value.min(1.0))
}

/// `P_x(T_0 <= t)`, the total mass of the joint density (reflection principle).
pub fn hit_probability(x: f64, t: f64) -> f64 {
    libm::erfc(x / (2.0 * t).sqrt())
}

/// Total mass of the joint density by iterated adaptive quadrature over
/// `(0, inf)^2`.
pub fn joint_density_mass(x: f64, t: f64, tol: f64) -> Result<QuadResult> {
    if !(t > 0.0 && x >= 0.0) {
        return Err(Error::Domain(format!("mass needs t > 0, x >= 0 (t={t}, x={x})")));
    }
    let (_, hi) = gaussian_window(-x, t, TRUNCATION_LOG_DROP);
    let inner_opts = QuadOptions {
        abs_tol: tol * 1e-3,
        rel_tol: 1e-13,
        max_subdivisions: 500,
    };
    let inner = |l: f64| -> f64 {
        let ymax = hi - l;
        if ymax <= 0.0 {
            return 0.0;
        }
        integrate(
            |y| joint_density_local_time(x, t, l, y).unwrap_or(0.0),
            &[0.0, ymax],
            inner_opts,
        )
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
    };
    let mut r = integrate(inner, &[0.0, hi], QuadOptions::with_abs_tol(tol))?;
    r.upper = hi;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn density_example() {
        let expected = (2.0 / PI).sqrt() * (-0.5f64).exp();
        assert_relative_eq!(
            joint_density_local_time(0.0, 1.0, 0.5, 0.5).unwrap(),
            expected,
            max_relative = 1e-15
        );
        assert_relative_eq!(expected, 0.483_941_449_038_286_7, max_relative = 1e-15);
    }

    #[test]
    fn domain_is_enforced() {
        assert!(joint_density_local_time(0.0, 0.0, 0.5, 0.5).is_err());
        assert!(joint_density_local_time(0.0, 1.0, 0.0, 0.5).is_err());
        assert!(joint_density_local_time(0.0, 1.0, 0.5, -0.5).is_err());
    }

    #[test]
    fn mass_from_origin_is_one() {
        let r = joint_density_mass(0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn mass_matches_hitting_probability() {
        for (x, t) in [(1.0, 1.0), (0.3, 2.5), (2.0, 0.7)] {
            let r = joint_density_mass(x, t, 1e-10).unwrap();
            let expected = 1.0 - (2.0 * crate::math::normal_cdf(x / t.sqrt()) - 1.0);
            assert!((r.value - expected).abs() < 1e-6, "x={x} t={t}: {} vs {expected}", r.value);
            assert_relative_eq!(hit_probability(x, t), expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn radial_cdf_from_origin_is_maxwell() {
        // with x = 0, t = 1 the radial law is chi with 3 degrees of freedom
        for z in [0.2, 1.0, 1.7, 3.5] {
            let maxwell = libm::erf(z / 2f64.sqrt())
                - (2.0 / PI).sqrt() * z * (-z * z / 2.0).exp();
            assert!((radial_cdf(0.0, 1.0, z).unwrap() - maxwell).abs() < 1e-12);
        }
    }

    #[test]
    fn hitting_densities_convolve() {
        // D_a * D_b = D_{a+b}: the first-passage times add
        let (a, b, t) = (0.4, 0.9, 1.3);
        let conv = integrate(
            |s| hitting_density(a, s) * hitting_density(b, t - s),
            &[0.0, t],
            QuadOptions::with_abs_tol(1e-13),
        )
        .unwrap();
        assert_relative_eq!(conv.value, hitting_density(a + b, t), max_relative = 1e-9);
    }
}
