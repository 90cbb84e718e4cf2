use super::regime::{classify_regime, Regime, RegimeTag};
use crate::error::{Error, Result};
use crate::math::{ln_add_exp, ln_sinh};
use crate::space::{Branch, BranchSpace, PenaltyParams};

/// Slopes of the negative-gamma martingale densities
/// `M = e^{gamma l} (1 + theta_k x)`; they satisfy `sum mu_k theta_k = |gamma|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaWeights {
    pub theta: Vec<f64>,
}

impl ThetaWeights {
    pub fn of(&self, k: Branch) -> f64 {
        self.theta[k.0]
    }

    /// `sum_k mu_k theta_k`
    pub fn weighted_sum(&self, space: &BranchSpace) -> f64 {
        self.theta
            .iter()
            .zip(space.weights())
            .map(|(t, m)| t * m)
            .sum()
    }
}

fn negative_gamma_regime(params: &PenaltyParams, space: &BranchSpace) -> Result<Regime> {
    params.check_space(space)?;
    let regime = classify_regime(params, space);
    if regime.tag.is_negative_gamma() {
        Ok(regime)
    } else {
        Err(Error::RegimeMismatch {
            expected: "NEG_GAMMA_FLAT_MAX or NEG_GAMMA_ALL_NEG",
            found: regime.tag,
        })
    }
}

pub fn theta_weights(params: &PenaltyParams, space: &BranchSpace) -> Result<ThetaWeights> {
    let regime = negative_gamma_regime(params, space)?;
    Ok(theta_for_regime(params, space, &regime))
}

fn theta_for_regime(params: &PenaltyParams, space: &BranchSpace, regime: &Regime) -> ThetaWeights {
    let gamma = params.gamma();
    let theta = match regime.tag {
        RegimeTag::NegGammaFlatMax => {
            let mass = regime.argmax_weight(space);
            space
                .branches()
                .map(|k| if regime.contains(k) { gamma.abs() / mass } else { 0.0 })
                .collect()
        }
        RegimeTag::NegGammaAllNeg => {
            let mu = space.weights();
            let alpha = params.alpha();
            let cross: f64 = mu.iter().zip(alpha).map(|(m, a)| m / (a * gamma)).sum();
            let denom: f64 = mu
                .iter()
                .zip(alpha)
                .map(|(m, a)| m * (a.abs() + gamma.abs()) / (a * a * gamma * gamma))
                .sum();
            alpha.iter().map(|a| (1.0 / (a * a) + cross) / denom).collect()
        }
        _ => unreachable!("theta weights exist only for negative gamma"),
    };
    ThetaWeights { theta }
}

fn check_density_domain(x: f64, l: f64, s: f64) -> Result<()> {
    if x >= 0.0 && l >= 0.0 && s >= 0.0 && x.is_finite() && l.is_finite() && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "martingale density needs finite x, l, s >= 0 (got x={x}, l={l}, s={s})"
        )))
    }
}

/// Precomputed martingale density for one `(alpha, gamma)`; evaluating it
/// in a Monte Carlo loop avoids re-classifying the parameters per path.
#[derive(Debug, Clone)]
pub struct MartingaleDensity {
    regime: Regime,
    gamma: f64,
    // DOMINANT_ALPHA: coefficient of sinh(alpha_bar x) on J
    sinh_coeff: f64,
    theta: Option<ThetaWeights>,
}

impl MartingaleDensity {
    pub fn new(params: &PenaltyParams, space: &BranchSpace) -> Result<Self> {
        params.check_space(space)?;
        let regime = classify_regime(params, space);
        let gamma = params.gamma();
        let sinh_coeff = match regime.alpha_bar {
            Some(ab) => (ab - gamma) / (ab * regime.argmax_weight(space)),
            None => 0.0,
        };
        let theta = regime
            .tag
            .is_negative_gamma()
            .then(|| theta_for_regime(params, space, &regime));
        Ok(MartingaleDensity {
            regime,
            gamma,
            sinh_coeff,
            theta,
        })
    }

    pub fn regime(&self) -> &Regime {
        &self.regime
    }

    /// `ln M(x, k, l, s)`; `k` only matters when `x > 0`.
    pub fn ln_eval(&self, x: f64, k: Option<Branch>, l: f64, s: f64) -> f64 {
        let g = self.gamma;
        match self.regime.tag {
            RegimeTag::DominantGamma => g * (l - x) - s * g * g / 2.0,
            RegimeTag::DominantAlpha => {
                let ab = self.regime.alpha_bar.expect("alpha_bar set for DOMINANT_ALPHA");
                let on_argmax = k.is_some_and(|k| self.regime.contains(k));
                let inner = if on_argmax && x > 0.0 {
                    ln_add_exp(-ab * x, self.sinh_coeff.ln() + ln_sinh(ab * x))
                } else {
                    -ab * x
                };
                g * l - s * ab * ab / 2.0 + inner
            }
            RegimeTag::Neutral => 0.0,
            RegimeTag::NegGammaFlatMax | RegimeTag::NegGammaAllNeg => {
                let theta = self.theta.as_ref().expect("theta set for negative gamma");
                let slope = match k {
                    Some(k) if x > 0.0 => theta.of(k),
                    _ => 0.0,
                };
                g * l + (slope * x).ln_1p()
            }
        }
    }

    pub fn eval(&self, x: f64, k: Option<Branch>, l: f64, s: f64) -> f64 {
        self.ln_eval(x, k, l, s).exp()
    }
}

/// Density `M(alpha, gamma, x, k, l, s)` of the limit measure with respect to
/// the spider law on `F_s`.
pub fn martingale_density(
    params: &PenaltyParams,
    space: &BranchSpace,
    x: f64,
    k: Branch,
    l: f64,
    s: f64,
) -> Result<f64> {
    check_density_domain(x, l, s)?;
    if k.0 >= space.len() {
        return Err(Error::Domain(format!("branch index {} out of range", k.0)));
    }
    Ok(MartingaleDensity::new(params, space)?.eval(x, Some(k), l, s))
}

/// Law of the branch `V` carrying the final, unbounded excursion in the
/// negative-gamma limit processes.
pub fn limit_branch_law(params: &PenaltyParams, space: &BranchSpace) -> Result<Vec<f64>> {
    let regime = negative_gamma_regime(params, space)?;
    let mu = space.weights();
    let probs = match regime.tag {
        RegimeTag::NegGammaFlatMax => {
            let mass = regime.argmax_weight(space);
            space
                .branches()
                .map(|m| if regime.contains(m) { mu[m.0] / mass } else { 0.0 })
                .collect()
        }
        _ => {
            let g = params.gamma().abs();
            let alpha = params.alpha();
            let common: f64 = mu.iter().zip(alpha).map(|(m, a)| m / a.abs()).sum();
            let denom: f64 = mu
                .iter()
                .zip(alpha)
                .map(|(m, a)| m * (a.abs() + g) / (a * a))
                .sum();
            mu.iter()
                .zip(alpha)
                .map(|(m, a)| m * (g / (a * a) + common) / denom)
                .collect()
        }
    };
    Ok(probs)
}
