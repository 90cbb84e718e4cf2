//! Closed-form majorants of the normalizing expectations and their
//! large-time equivalents.
//!
//! For a Brownian motion `Y` from `x >= 0` with local time `L` at zero and
//! first zero `T_0`:
//!
//! * `J(beta, x, t) = E_x[exp(beta Y_t) 1{T_0 > t}]` is bounded by [`j_star`],
//! * `I(beta, gamma, x, t) = E_x[exp(beta |Y_t| + gamma L_t) 1{T_0 <= t}]`
//!   is bounded by [`i_star`],
//!
//! and both bounds are sharp as `t -> inf`. The spider normalizer is the
//! mixture `Z = sum_m mu_m I(alpha_m, gamma, .) + J(alpha_k, .)`, bounded by
//! [`z_star`].

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::math::{ln_sinh, sqrt_2_over_pi_t, two_sinh_exp};
use crate::space::{Branch, BranchSpace, PenaltyParams};

fn check_time(t: f64, what: &str) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} requires a finite time > 0, got {t}")))
    }
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("starting distance must be finite and >= 0, got {x}")))
    }
}

/// Majorant of `J(beta, x, t)`.
pub fn j_star(beta: f64, x: f64, t: f64) -> Result<f64> {
    check_time(t, "J*")?;
    check_x(x)?;
    let poly = if beta != 0.0 {
        (2.0 / (PI * t.powi(3))).sqrt() * x / (beta * beta)
    } else {
        sqrt_2_over_pi_t(t) * x
    };
    let growth = if beta > 0.0 {
        two_sinh_exp(beta * x, t * beta * beta / 2.0)
    } else {
        0.0
    };
    Ok(poly + growth)
}

/// Majorant of `I(beta, gamma, x, t)`; seven cases on the signs and order
/// of `beta` and `gamma`.
pub fn i_star(beta: f64, gamma: f64, x: f64, t: f64) -> Result<f64> {
    check_time(t, "I*")?;
    check_x(x)?;
    let c = sqrt_2_over_pi_t(t);
    let v = if beta < 0.0 && gamma < 0.0 {
        (2.0 / (PI * t.powi(3))).sqrt()
            * (x / (beta * gamma) + (beta.abs() + gamma.abs()) / (beta * beta * gamma * gamma))
    } else if beta == 0.0 && gamma < 0.0 {
        c / gamma.abs()
    } else if gamma == 0.0 && beta < 0.0 {
        c / beta.abs()
    } else if beta == 0.0 && gamma == 0.0 {
        1.0
    } else if beta > 0.0 && beta > gamma {
        let d = beta - gamma;
        c / d + 2.0 * beta / d * (-beta * x + t * beta * beta / 2.0).exp()
    } else if gamma > 0.0 && gamma > beta {
        let d = gamma - beta;
        c / d + 2.0 * gamma / d * (-gamma * x + t * gamma * gamma / 2.0).exp()
    } else {
        // gamma == beta > 0
        gamma * (2.0 * t / PI).sqrt()
            + 2.0 * (t * gamma * gamma + 1.0) * (-gamma * x + t * gamma * gamma / 2.0).exp()
    };
    Ok(v)
}

/// Majorant of the spider normalizer `Z(alpha, gamma, x, k, t)`.
pub fn z_star(
    params: &PenaltyParams,
    space: &BranchSpace,
    x: f64,
    k: Branch,
    t: f64,
) -> Result<f64> {
    params.check_space(space)?;
    let mut total = 0.0;
    for (m, &mu) in space.weights().iter().enumerate() {
        total += mu * i_star(params.alpha()[m], params.gamma(), x, t)?;
    }
    Ok(total + j_star(params.alpha_of(k), x, t)?)
}

/// Which row of the large-time equivalent table applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticRow {
    /// `gamma > 0`, `gamma >= alpha`, with ties `alpha_m = gamma`.
    GammaTied,
    /// `gamma > 0`, `gamma > alpha_m` for all m.
    GammaStrict,
    /// `max(alpha) > gamma`, `max(alpha) > 0`.
    AlphaDominant,
    /// `gamma = 0`, `max(alpha) = 0`.
    NeutralFlat,
    /// `gamma = 0`, all `alpha < 0`.
    NeutralNegative,
    /// `gamma < 0`, `max(alpha) = 0`.
    NegGammaFlat,
    /// `gamma < 0`, all `alpha < 0`.
    NegGammaNegative,
}

pub fn asymptotic_row(params: &PenaltyParams) -> AsymptoticRow {
    let g = params.gamma();
    let ab = params.alpha_max();
    if g > 0.0 && g >= ab {
        if ab == g {
            AsymptoticRow::GammaTied
        } else {
            AsymptoticRow::GammaStrict
        }
    } else if ab > 0.0 && ab > g {
        AsymptoticRow::AlphaDominant
    } else if g == 0.0 {
        if ab == 0.0 {
            AsymptoticRow::NeutralFlat
        } else {
            AsymptoticRow::NeutralNegative
        }
    } else if ab == 0.0 {
        AsymptoticRow::NegGammaFlat
    } else {
        AsymptoticRow::NegGammaNegative
    }
}

/// `ln` of the large-`u` equivalent of `Z*(alpha, gamma, x, k, u)`.
///
/// Kept in log space: the positive-exponent rows grow like `e^{u c^2 / 2}`
/// and overflow long before the ratios built from them stop converging.
pub fn ln_z_star_asymptotic(
    params: &PenaltyParams,
    space: &BranchSpace,
    x: f64,
    k: Branch,
    u: f64,
) -> Result<f64> {
    params.check_space(space)?;
    check_time(u, "the asymptotic equivalent")?;
    check_x(x)?;
    let mu = space.weights();
    let alpha = params.alpha();
    let g = params.gamma();
    let ab = params.alpha_max();
    let mass_at = |v: f64| -> f64 {
        mu.iter()
            .zip(alpha)
            .filter(|(_, &a)| a == v)
            .map(|(m, _)| m)
            .sum()
    };
    let k_alpha = alpha[k.0];
    let ln = match asymptotic_row(params) {
        AsymptoticRow::GammaTied => {
            (2.0 * mass_at(g) * u * g * g).ln() - g * x + u * g * g / 2.0
        }
        AsymptoticRow::GammaStrict => {
            let c: f64 = mu
                .iter()
                .zip(alpha)
                .map(|(m, a)| 2.0 * g * m / (g - a))
                .sum();
            c.ln() - g * x + u * g * g / 2.0
        }
        AsymptoticRow::AlphaDominant => {
            let lead = (2.0 * ab / (ab - g) * mass_at(ab)).ln() - ab * x;
            let inner = if k_alpha == ab && x > 0.0 {
                crate::math::ln_add_exp(lead, LN_2 + ln_sinh(ab * x))
            } else {
                lead
            };
            u * ab * ab / 2.0 + inner
        }
        AsymptoticRow::NeutralFlat => mass_at(0.0).ln(),
        AsymptoticRow::NeutralNegative => {
            let c: f64 = mu.iter().zip(alpha).map(|(m, a)| m / a.abs()).sum();
            sqrt_2_over_pi_t(u).ln() + c.ln()
        }
        AsymptoticRow::NegGammaFlat => {
            let on_j = if k_alpha == 0.0 { x } else { 0.0 };
            sqrt_2_over_pi_t(u).ln() + (mass_at(0.0) / g.abs() + on_j).ln()
        }
        AsymptoticRow::NegGammaNegative => {
            let constant: f64 = mu
                .iter()
                .zip(alpha)
                .map(|(m, a)| m * (a.abs() + g.abs()) / (a * a * g * g))
                .sum();
            let cross: f64 = mu.iter().zip(alpha).map(|(m, a)| m / (a * g)).sum();
            let slope = 1.0 / (k_alpha * k_alpha) + cross;
            0.5 * (2.0 / (PI * u.powi(3))).ln() + (constant + x * slope).ln()
        }
    };
    Ok(ln)
}

/// Large-`u` equivalent of `Z*(alpha, gamma, x, k, u)`. May overflow to
/// infinity for the growing rows; use [`ln_z_star_asymptotic`] for ratios.
pub fn z_star_asymptotic(
    params: &PenaltyParams,
    space: &BranchSpace,
    x: f64,
    k: Branch,
    u: f64,
) -> Result<f64> {
    Ok(ln_z_star_asymptotic(params, space, x, k, u)?.exp())
}

/// `e^{gamma l} Z~(x, k, u - s) / Z~(0, k, u)`, which tends to the martingale
/// density `M(x, k, l, s)` as `u -> inf`.
pub fn asymptotic_density_ratio(
    params: &PenaltyParams,
    space: &BranchSpace,
    x: f64,
    k: Branch,
    l: f64,
    s: f64,
    u: f64,
) -> Result<f64> {
    if !(u > s) {
        return Err(Error::Domain(format!("ratio needs u > s (u={u}, s={s})")));
    }
    let num = ln_z_star_asymptotic(params, space, x, k, u - s)?;
    let den = ln_z_star_asymptotic(params, space, 0.0, k, u)?;
    Ok((params.gamma() * l + num - den).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn j_star_examples() {
        assert_relative_eq!(j_star(0.0, 1.0, 2.0).unwrap(), 0.564_189_583_547_756_3, max_relative = 1e-14);
        assert_relative_eq!(j_star(-1.0, 2.0, 1.0).unwrap(), 1.595_769_121_605_730_8, max_relative = 1e-14);
        // sqrt(2/pi) + 2 sinh(1) e^{1/2}
        assert_relative_eq!(j_star(1.0, 1.0, 1.0).unwrap(), 4.673_042_971_428_297, max_relative = 1e-14);
        assert!(j_star(1.0, 1.0, 0.0).is_err());
        assert_eq!(j_star(-3.0, 0.0, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn j_star_large_exponent_is_finite() {
        let v = j_star(2.0, 100.0, 200.0).unwrap();
        assert!(v.is_finite());
        // ln(2 sinh(200) e^{400}) ~ 600
        assert_relative_eq!(v.ln(), 600.0, max_relative = 1e-12);
    }

    #[test]
    fn i_star_examples() {
        for (x, t) in [(0.0, 1.0), (3.0, 0.2), (1.0, 50.0)] {
            assert_eq!(i_star(0.0, 0.0, x, t).unwrap(), 1.0);
        }
        assert_relative_eq!(i_star(-1.0, -1.0, 0.0, 2.0).unwrap(), 0.564_189_583_547_756_3, max_relative = 1e-14);
        // sqrt(2/pi) + 2 e^{1/2}
        assert_relative_eq!(i_star(0.0, 1.0, 0.0, 1.0).unwrap(), 4.095_327_102_203_122, max_relative = 1e-14);
        // sqrt(2/pi) + 4 e^{1/2}
        assert_relative_eq!(i_star(1.0, 1.0, 0.0, 1.0).unwrap(), 7.392_769_643_603_378, max_relative = 1e-14);
        assert!(i_star(1.0, 1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn i_star_is_symmetric_off_the_diagonal() {
        // the two dominant-sign rows are mirror images of each other
        for (b, g) in [(0.7, -0.2), (1.5, 0.3), (0.4, 0.0)] {
            for (x, t) in [(0.0, 1.0), (0.5, 7.0)] {
                assert_relative_eq!(
                    i_star(b, g, x, t).unwrap(),
                    i_star(g, b, x, t).unwrap(),
                    max_relative = 1e-14
                );
            }
        }
    }

    fn two(alpha: [f64; 2], gamma: f64) -> (BranchSpace, PenaltyParams) {
        let s = BranchSpace::new([("a", 0.5), ("b", 0.5)]).unwrap();
        let p = PenaltyParams::new(&s, alpha.to_vec(), gamma).unwrap();
        (s, p)
    }

    #[test]
    fn z_star_examples() {
        let (s, p) = two([0.0, 0.0], 0.0);
        assert_eq!(z_star(&p, &s, 0.0, Branch(0), 3.0).unwrap(), 1.0);
        let (s, p) = two([-1.0, -1.0], -1.0);
        assert_relative_eq!(z_star(&p, &s, 0.0, Branch(0), 2.0).unwrap(), 0.564_189_583_547_756_3, max_relative = 1e-14);
    }

    #[test]
    fn asymptotic_examples() {
        let s = BranchSpace::new([("a", 0.25), ("b", 0.75)]).unwrap();
        let p = PenaltyParams::new(&s, vec![-0.5, -2.0], 0.0).unwrap();
        let u = 3.0;
        let expected = (2.0 / (PI * u)).sqrt() * (0.25 / 0.5 + 0.75 / 2.0);
        assert_relative_eq!(z_star_asymptotic(&p, &s, 0.7, Branch(1), u).unwrap(), expected, max_relative = 1e-14);

        let p = PenaltyParams::new(&s, vec![0.0, -1.0], 1.0).unwrap();
        let expected = (2.0 * 0.25 / 1.0 + 2.0 * 0.75 / 2.0) * 0.5f64.exp();
        assert_relative_eq!(z_star_asymptotic(&p, &s, 0.0, Branch(0), 1.0).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn asymptotic_table_tracks_z_star() {
        // the table keeps the leading term of z_star, row by row
        let s = BranchSpace::new([("a", 0.4), ("b", 0.6)]).unwrap();
        for (alpha, gamma) in [
            ([0.5, 1.0], 1.0),
            ([0.5, -1.0], 1.0),
            ([1.0, 0.5], 0.3),
            ([0.0, -1.0], 0.0),
            ([-0.5, -1.0], 0.0),
            ([0.0, -1.0], -0.5),
            ([-0.5, -1.0], -0.5),
        ] {
            let p = PenaltyParams::new(&s, alpha.to_vec(), gamma).unwrap();
            let mut prev = f64::INFINITY;
            for u in [1e2, 1e4, 1e6] {
                let exact = z_star(&p, &s, 0.5, Branch(0), u);
                let ln_eq = ln_z_star_asymptotic(&p, &s, 0.5, Branch(0), u).unwrap();
                let Ok(exact) = exact else { continue };
                if !exact.is_finite() {
                    continue;
                }
                let gap = (exact.ln() - ln_eq).abs();
                assert!(gap <= prev + 1e-12, "{alpha:?} {gamma}: gap {gap} at u={u}");
                prev = gap;
            }
            assert!(prev < 0.05, "{alpha:?} {gamma}: final gap {prev}");
        }
    }

    #[test]
    fn ratio_rejects_short_horizon() {
        let (s, p) = two([0.0, 0.0], 1.0);
        assert!(asymptotic_density_ratio(&p, &s, 0.5, Branch(0), 1.0, 2.0, 1.0).is_err());
    }
}
