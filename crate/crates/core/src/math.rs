//! Small numerically careful helpers shared by the closed forms.

use std::f64::consts::{LN_2, PI};

/// `ln(sinh(y))` for `y >= 0`; `-inf` at zero.
pub(crate) fn ln_sinh(y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    if y > 20.0 {
        y - LN_2 + (-(-2.0 * y).exp()).ln_1p()
    } else {
        y.sinh().ln()
    }
}

/// `ln(e^a + e^b)` without overflow.
pub(crate) fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `2 sinh(y) e^c` evaluated in log space once the exponent is large.
pub(crate) fn two_sinh_exp(y: f64, c: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    if y.abs() + c > 500.0 {
        let mag = (LN_2 + ln_sinh(y.abs()) + c).exp();
        mag.copysign(y)
    } else {
        2.0 * y.sinh() * c.exp()
    }
}

/// `sqrt(2 / (pi t))`
pub(crate) fn sqrt_2_over_pi_t(t: f64) -> f64 {
    (2.0 / (PI * t)).sqrt()
}

/// Standard normal CDF.
#[cfg(test)]
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Pairwise summation, insensitive to the order work was scheduled in.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_sinh_matches_direct_form() {
        for y in [1e-8, 0.3, 5.0, 19.9, 20.1, 40.0] {
            let d = f64::ln(f64::sinh(y));
            assert!((ln_sinh(y) - d).abs() < 1e-13 * d.abs().max(1.0), "{y}");
        }
        assert!(ln_sinh(800.0).is_finite());
    }

    #[test]
    fn two_sinh_exp_switches_smoothly() {
        let small = 2.0 * 3.0f64.sinh() * 497.0f64.exp();
        let big = two_sinh_exp(3.0, 497.5);
        assert!((big / (small * 0.5f64.exp()) - 1.0).abs() < 1e-12);
        assert!(two_sinh_exp(400.0, 400.0).is_infinite());
    }

    #[test]
    fn ln_add_exp_handles_neg_infinity() {
        assert_eq!(ln_add_exp(f64::NEG_INFINITY, 0.0), 0.0);
        assert!((ln_add_exp(1000.0, 1000.0) - (1000.0 + LN_2)).abs() < 1e-12);
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }
}
