//! Quadrature evaluations of the exact expectations `I`, `J` and `Z`.
//!
//! These are the oracles the closed-form majorants are checked against;
//! they never call into the majorant formulas.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{gaussian_window, integrate, QuadOptions, QuadResult, TRUNCATION_LOG_DROP};
use crate::space::{Branch, BranchSpace, PenaltyParams};

fn check(x: f64, t: f64, tol: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be finite and > 0, got {t}")));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("starting distance must be >= 0, got {x}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

fn breaks_around(lo: f64, hi: f64, peak: f64) -> Vec<f64> {
    if peak > lo && peak < hi {
        vec![lo, peak, hi]
    } else {
        vec![lo, hi]
    }
}

/// `J(beta, x, t) = E_x[e^{beta Y_t} 1{T_0 > t}]` by the reflection principle:
///
/// ```text
/// (2 pi t)^{-1/2} int_0^inf (e^{-(x-y)^2/2t} - e^{-(x+y)^2/2t}) e^{beta y} dy
/// ```
pub fn j_exact(beta: f64, x: f64, t: f64, tol: f64) -> Result<QuadResult> {
    check(x, t, tol)?;
    if x == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            lower: 0.0,
            upper: 0.0,
            evaluations: 0,
        });
    }
    let norm = 1.0 / (2.0 * PI * t).sqrt();
    // e^{-(x-y)^2/2t + beta y} (1 - e^{-2xy/t})
    let f = |y: f64| {
        let lead = -(x - y).powi(2) / (2.0 * t) + beta * y;
        norm * lead.exp() * -(-2.0 * x * y / t).exp_m1()
    };
    let centre = x + beta * t;
    let (lo, hi) = gaussian_window(centre, t, TRUNCATION_LOG_DROP);
    let mut r = integrate(f, &breaks_around(lo, hi, centre), QuadOptions::with_abs_tol(tol))?;
    r.lower = lo;
    r.upper = hi;
    Ok(r)
}

/// `I(beta, gamma, x, t) = E_x[e^{beta |Y_t| + gamma L_t} 1{T_0 <= t}]`,
/// integrated against the joint law of `(L_t, |Y_t|)`.
///
/// In the coordinates `z = l + y`, `y = theta z` the joint density only
/// depends on `z` and the Jacobian is `z`; the `theta` integral of
/// `e^{z (gamma + (beta - gamma) theta)}` is taken in closed form and the
/// remaining radial integral adaptively.
pub fn i_exact(beta: f64, gamma: f64, x: f64, t: f64, tol: f64) -> Result<QuadResult> {
    check(x, t, tol)?;
    let norm = (2.0 / (PI * t.powi(3))).sqrt();
    let top = beta.max(gamma);
    let gap = (beta - gamma).abs();
    // z int_0^1 e^{z(gamma + (beta-gamma) theta)} dtheta = e^{top z} (1 - e^{-gap z}) / gap
    let f = |z: f64| {
        let angular = if gap == 0.0 {
            z
        } else {
            -(-gap * z).exp_m1() / gap
        };
        let lead = -(x + z).powi(2) / (2.0 * t) + top * z;
        norm * (x + z) * lead.exp() * angular
    };
    let centre = top * t - x;
    let (lo, hi) = gaussian_window(centre, t, TRUNCATION_LOG_DROP);
    let mut breaks = breaks_around(lo, hi, centre);
    // for decaying exponents the mass sits within a few 1/|top| of zero
    if top < 0.0 {
        let scale = 4.0 / top.abs();
        if scale < hi {
            breaks = vec![lo, scale, hi];
        }
    }
    let mut r = integrate(f, &breaks, QuadOptions::with_abs_tol(tol))?;
    r.lower = lo;
    r.upper = hi;
    Ok(r)
}

/// `Z(alpha, gamma, x, k, t) = sum_m mu_m I(alpha_m, gamma, x, t) + J(alpha_k, x, t)`.
pub fn z_exact(
    params: &PenaltyParams,
    space: &BranchSpace,
    x: f64,
    k: Branch,
    t: f64,
    tol: f64,
) -> Result<QuadResult> {
    params.check_space(space)?;
    let share = tol / (space.len() as f64 + 1.0);
    let mut value = 0.0;
    let mut abs_error = 0.0;
    let mut upper: f64 = 0.0;
    let mut evaluations = 0;
    for (m, &mu) in space.weights().iter().enumerate() {
        let r = i_exact(params.alpha()[m], params.gamma(), x, t, share)?;
        value += mu * r.value;
        abs_error += mu * r.abs_error;
        upper = upper.max(r.upper);
        evaluations += r.evaluations;
    }
    let r = j_exact(params.alpha_of(k), x, t, share)?;
    Ok(QuadResult {
        value: value + r.value,
        abs_error: abs_error + r.abs_error,
        lower: 0.0,
        upper: upper.max(r.upper),
        evaluations: evaluations + r.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::local_time_law::joint_density_local_time;
    use crate::closed_forms::majorants::{i_star, j_star};
    use crate::math::normal_cdf;
    use approx::assert_relative_eq;

    const TOL: f64 = 1e-12;

    #[test]
    fn j_exact_examples() {
        for (b, t) in [(1.0, 1.0), (-2.0, 5.0), (0.0, 0.1)] {
            assert_eq!(j_exact(b, 0.0, t, TOL).unwrap().value, 0.0);
        }
        // P(|N| <= 1)
        let v = j_exact(0.0, 1.0, 1.0, TOL).unwrap().value;
        assert_relative_eq!(v, 2.0 * normal_cdf(1.0) - 1.0, max_relative = 1e-12);
        assert_relative_eq!(v, 0.682_689_492_137_085_9, max_relative = 1e-12);
    }

    #[test]
    fn i_exact_examples() {
        assert_relative_eq!(i_exact(0.0, 0.0, 0.0, 1.0, TOL).unwrap().value, 1.0, max_relative = 1e-12);
        assert_relative_eq!(i_exact(0.0, 0.0, 0.0, 37.0, TOL).unwrap().value, 1.0, max_relative = 1e-12);
        // 2 P(N >= 1)
        let v = i_exact(0.0, 0.0, 1.0, 1.0, TOL).unwrap().value;
        assert_relative_eq!(v, 2.0 * (1.0 - normal_cdf(1.0)), max_relative = 1e-12);
        assert_relative_eq!(v, 0.317_310_507_862_914_2, max_relative = 1e-12);
    }

    #[test]
    fn j_satisfies_reflection_identity() {
        // J(beta) = J(-beta) + 2 sinh(beta x) e^{t beta^2 / 2} for beta > 0
        for (b, x, t) in [(1.0, 1.0, 1.0), (0.3, 2.0, 4.0), (1.7, 0.4, 0.3)] {
            let lhs = j_exact(b, x, t, TOL).unwrap().value;
            let rhs = j_exact(-b, x, t, TOL).unwrap().value
                + 2.0 * f64::sinh(b * x) * (t * b * b / 2.0).exp();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-11);
        }
    }

    #[test]
    fn i_matches_nested_quadrature_of_joint_density() {
        // independent route: integrate e^{beta y + gamma l} against the
        // joint density in (l, y) directly
        for (b, g, x, t) in [(-1.0, -0.5, 0.0, 2.0), (0.5, -1.0, 0.7, 1.0), (0.4, 0.4, 0.2, 1.5)] {
            let outer = |l: f64| {
                integrate(
                    |y| (b * y + g * l).exp() * joint_density_local_time(x, t, l, y).unwrap(),
                    &[0.0, 40.0],
                    QuadOptions::with_abs_tol(1e-14),
                )
                .unwrap()
                .value
            };
            let nested = integrate(outer, &[0.0, 40.0], QuadOptions::with_abs_tol(1e-12)).unwrap();
            let fast = i_exact(b, g, x, t, TOL).unwrap();
            assert_relative_eq!(fast.value, nested.value, max_relative = 1e-9);
        }
    }

    #[test]
    fn i_ratio_approaches_one_for_negative_exponents() {
        let mut prev = 0.0;
        for t in [10.0, 1e2, 1e3, 1e4] {
            let r = i_exact(-1.0, -1.0, 0.0, t, 1e-300).unwrap().value / i_star(-1.0, -1.0, 0.0, t).unwrap();
            assert!(r > prev && r <= 1.0 + 1e-9, "t={t}: {r}");
            prev = r;
        }
        assert!(prev > 0.999);
    }

    #[test]
    fn j_ratio_approaches_one_for_positive_beta() {
        let r = j_exact(1.0, 1.0, 50.0, 1e-300).unwrap().value / j_star(1.0, 1.0, 50.0).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn window_is_recorded() {
        let r = i_exact(1.0, 0.0, 0.0, 1000.0, TOL).unwrap();
        assert!(r.lower > 0.0 && r.lower < 1000.0 && r.upper > 1000.0);
    }

    #[test]
    fn z_exact_of_zero_params_is_one() {
        let s = BranchSpace::uniform(2).unwrap();
        let p = PenaltyParams::new(&s, vec![0.0, 0.0], 0.0).unwrap();
        let z = z_exact(&p, &s, 0.0, Branch(0), 5.0, TOL).unwrap();
        assert_relative_eq!(z.value, 1.0, max_relative = 1e-11);
    }
}
