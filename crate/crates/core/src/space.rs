//! Branch spaces and penalty parameters.
//!
//! A spider lives on finitely many half-lines glued at the origin. The
//! branches carry labels and selection weights `mu`; every excursion away
//! from the origin independently picks its branch with law `mu`.

use crate::error::{Error, Result};

/// Index of a branch inside its [`BranchSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch(pub usize);

impl Branch {
    pub fn index(self) -> usize {
        self.0
    }
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Finite label set with strictly positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSpace {
    labels: Vec<String>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl BranchSpace {
    pub fn new<S: Into<String>>(entries: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let (labels, weights): (Vec<String>, Vec<f64>) =
            entries.into_iter().map(|(l, w)| (l.into(), w)).unzip();
        if labels.is_empty() {
            return Err(Error::InvalidSpace("at least one branch is required".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidSpace(format!("duplicate label `{l}`")));
            }
        }
        for (l, &w) in labels.iter().zip(&weights) {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidSpace(format!(
                    "weight of `{l}` must be strictly positive, got {w}"
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidSpace(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(BranchSpace {
            labels,
            weights,
            cumulative,
        })
    }

    /// `n` branches named `0..n` with equal weights.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("at least one branch is required".into()));
        }
        let w = 1.0 / n as f64;
        // Equal weights 1/n only sum to 1 up to rounding; renormalize the last.
        let mut entries: Vec<(String, f64)> = (0..n).map(|i| (i.to_string(), w)).collect();
        let head: f64 = entries[..n - 1].iter().map(|e| e.1).sum();
        entries[n - 1].1 = 1.0 - head;
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, b: Branch) -> f64 {
        self.weights[b.0]
    }

    pub fn label(&self, b: Branch) -> &str {
        &self.labels[b.0]
    }

    pub fn branch(&self, label: &str) -> Option<Branch> {
        self.labels.iter().position(|l| l == label).map(Branch)
    }

    pub fn branches(&self) -> impl Iterator<Item = Branch> + '_ {
        (0..self.len()).map(Branch)
    }

    /// Inverse-CDF draw of a branch from `mu` given `u` in [0, 1).
    pub fn pick(&self, u: f64) -> Branch {
        pick_from_cumulative(&self.cumulative, u)
    }
}

pub(crate) fn pick_from_cumulative(cumulative: &[f64], u: f64) -> Branch {
    let target = u * cumulative[cumulative.len() - 1];
    let i = cumulative.partition_point(|&c| c <= target);
    Branch(i.min(cumulative.len() - 1))
}

/// Penalty slopes `alpha` (one per branch) and the local-time rate `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyParams {
    alpha: Vec<f64>,
    gamma: f64,
}

impl PenaltyParams {
    pub fn new(space: &BranchSpace, alpha: Vec<f64>, gamma: f64) -> Result<Self> {
        if alpha.len() != space.len() {
            return Err(Error::InvalidSpace(format!(
                "alpha has {} entries but the space has {} branches",
                alpha.len(),
                space.len()
            )));
        }
        if let Some(a) = alpha.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidSpace(format!("alpha entry {a} is not finite")));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidSpace(format!("gamma {gamma} is not finite")));
        }
        Ok(PenaltyParams { alpha, gamma })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn alpha_of(&self, b: Branch) -> f64 {
        self.alpha[b.0]
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn check_space(&self, space: &BranchSpace) -> Result<()> {
        if self.alpha.len() == space.len() {
            Ok(())
        } else {
            Err(Error::InvalidSpace(format!(
                "parameters cover {} branches, space has {}",
                self.alpha.len(),
                space.len()
            )))
        }
    }
}
