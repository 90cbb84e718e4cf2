use crate::space::{Branch, BranchSpace, PenaltyParams};

/// The five parameter regimes of the penalized spider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegimeTag {
    /// `gamma > 0` and `gamma >= alpha_m` for every branch.
    DominantGamma,
    /// `max(alpha) > gamma` and `max(alpha) > 0`.
    DominantAlpha,
    /// `gamma = 0` and every `alpha_m <= 0`.
    Neutral,
    /// `gamma < 0`, `max(alpha) = 0`.
    NegGammaFlatMax,
    /// `gamma < 0`, every `alpha_m < 0`.
    NegGammaAllNeg,
}

impl RegimeTag {
    pub const ALL: [RegimeTag; 5] = [
        RegimeTag::DominantGamma,
        RegimeTag::DominantAlpha,
        RegimeTag::Neutral,
        RegimeTag::NegGammaFlatMax,
        RegimeTag::NegGammaAllNeg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegimeTag::DominantGamma => "DOMINANT_GAMMA",
            RegimeTag::DominantAlpha => "DOMINANT_ALPHA",
            RegimeTag::Neutral => "NEUTRAL",
            RegimeTag::NegGammaFlatMax => "NEG_GAMMA_FLAT_MAX",
            RegimeTag::NegGammaAllNeg => "NEG_GAMMA_ALL_NEG",
        }
    }

    pub fn is_negative_gamma(self) -> bool {
        matches!(self, RegimeTag::NegGammaFlatMax | RegimeTag::NegGammaAllNeg)
    }
}

/// Classification of `(alpha, gamma)`.
///
/// `argmax_set` is the set `J` of branches attaining `max(alpha)`; it is
/// populated for [`RegimeTag::DominantAlpha`] and
/// [`RegimeTag::NegGammaFlatMax`] and empty otherwise. `alpha_bar` is
/// `max(alpha)` for the dominant-alpha regime.
#[derive(Debug, Clone, PartialEq)]
pub struct Regime {
    pub tag: RegimeTag,
    pub argmax_set: Vec<Branch>,
    pub alpha_bar: Option<f64>,
}

impl Regime {
    pub fn contains(&self, k: Branch) -> bool {
        self.argmax_set.contains(&k)
    }

    /// Total `mu` mass of `argmax_set`.
    pub fn argmax_weight(&self, space: &BranchSpace) -> f64 {
        self.argmax_set.iter().map(|&b| space.weight(b)).sum()
    }
}

fn argmax(params: &PenaltyParams, value: f64) -> Vec<Branch> {
    params
        .alpha()
        .iter()
        .enumerate()
        .filter(|(_, &a)| a == value)
        .map(|(i, _)| Branch(i))
        .collect()
}

/// Selects the row of the martingale-density table covering `(alpha, gamma)`.
///
/// The classifier is total. On the boundary `gamma = max(alpha) > 0` the
/// dominant-gamma row wins; `gamma = 0 = max(alpha)` is neutral.
pub fn classify_regime(params: &PenaltyParams, space: &BranchSpace) -> Regime {
    debug_assert!(params.check_space(space).is_ok());
    let gamma = params.gamma();
    let alpha_bar = params.alpha_max();
    if gamma > 0.0 && gamma >= alpha_bar {
        return Regime {
            tag: RegimeTag::DominantGamma,
            argmax_set: Vec::new(),
            alpha_bar: None,
        };
    }
    if alpha_bar > 0.0 && alpha_bar > gamma {
        return Regime {
            tag: RegimeTag::DominantAlpha,
            argmax_set: argmax(params, alpha_bar),
            alpha_bar: Some(alpha_bar),
        };
    }
    // Remaining: gamma <= 0 and alpha_bar <= 0.
    let (tag, argmax_set) = if gamma == 0.0 {
        (RegimeTag::Neutral, Vec::new())
    } else if alpha_bar == 0.0 {
        (RegimeTag::NegGammaFlatMax, argmax(params, 0.0))
    } else {
        (RegimeTag::NegGammaAllNeg, Vec::new())
    };
    Regime {
        tag,
        argmax_set,
        alpha_bar: None,
    }
}
