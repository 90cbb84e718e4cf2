//! Samplers for the limit processes of the penalized spider.
//!
//! - `γ > 0` dominant: `|bang-bang|`, realized as `S - Ỹ` for a walk `Ỹ`
//!   with drift `γ` ([`sample_bang_bang_abs`]).
//! - `ᾱ > max(γ, 0)`: `|B^{(ᾱ)}|` reweighted by `((ᾱ - γ)/ᾱ) e^{γ L_∞}`,
//!   the unbounded last excursion labelled from `μ` restricted to the
//!   argmax set ([`sample_case2`]).
//! - `γ = 0`, `α <= 0`: the spider itself.
//! - `γ < 0`, `α <= 0`: a spider stopped when its local time reaches an
//!   independent `Exp(|γ|)` level, followed by a Bessel(3) on an
//!   independent branch `V` ([`sample_case4`]).

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::closed_forms::{classify_regime, limit_branch_law, RegimeTag};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::{pick_from_cumulative, Branch, BranchSpace, PenaltyParams};
use crate::spider_sim::{Labeler, SpiderPath};
use crate::walk::{bridge_local_time, bridge_maximum, normal, open_uniform, step_count};

/// A real-valued trajectory on a uniform grid, with its local time at zero
/// where that is meaningful (zeros otherwise).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarPath {
    pub step: f64,
    pub x: Vec<f64>,
    pub local_time: Vec<f64>,
}

impl ScalarPath {
    pub fn last(&self) -> f64 {
        *self.x.last().expect("paths have at least one point")
    }

    pub fn horizon(&self) -> f64 {
        (self.x.len() - 1) as f64 * self.step
    }

    /// Value at the grid point `floor(s / step)`.
    pub fn at(&self, s: f64) -> f64 {
        let i = ((s / self.step * (1.0 + 1e-12)).floor() as usize).min(self.x.len() - 1);
        self.x[i]
    }
}

/// A spider path with an importance weight relative to the target law.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPath {
    pub path: SpiderPath,
    pub weight: f64,
    /// Total local time at zero over the whole (infinite) trajectory.
    pub l_inf: f64,
}

/// Output of [`sample_case4`].
#[derive(Clone, Debug, PartialEq)]
pub struct Case4Path {
    pub path: SpiderPath,
    /// The exponential level `e`; equals the total local time `L_∞`.
    pub l_inf: f64,
    /// Branch carrying the final Bessel(3) excursion.
    pub final_branch: Branch,
    /// Inverse local time at `e`. When it lies beyond the horizon it is the
    /// exact first-passage time continued past the grid.
    pub tau_e: f64,
    /// First grid index of the spliced Bessel(3) segment, if inside the grid.
    pub splice_index: Option<usize>,
}

fn require(tag: RegimeTag, allowed: &[RegimeTag], expected: &'static str) -> Result<()> {
    if allowed.contains(&tag) {
        Ok(())
    } else {
        Err(Error::RegimeMismatch { expected, found: tag })
    }
}

/// `|bang-bang|` with parameter `gamma`, as `S - Ỹ` for a walk with drift
/// `gamma`. `local_time` holds `S`.
pub fn sample_bang_bang_abs(gamma: f64, t_end: f64, step: f64, stream: RngStream) -> Result<ScalarPath> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Config(format!("bang-bang parameter must be > 0, got {gamma}")));
    }
    let n = step_count(t_end, step)?;
    let mut rng = stream.rng();
    let sd = step.sqrt();
    let mut x = Vec::with_capacity(n + 1);
    let mut local_time = Vec::with_capacity(n + 1);
    x.push(0.0);
    local_time.push(0.0);
    let (mut w, mut s) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let next = w + gamma * step + sd * normal(&mut rng);
        s = s.max(bridge_maximum(w, next, step, open_uniform(&mut rng)));
        w = next;
        x.push(s - w);
        local_time.push(s);
    }
    Ok(ScalarPath { step, x, local_time })
}

/// Local time still to come from `b` for a Brownian motion with drift
/// `alpha_bar > 0`: zero unless it returns to the origin (probability
/// `e^{-2 ᾱ b}` from `b > 0`, certain from `b <= 0`), then `Exp(ᾱ)`.
fn residual_local_time<R: Rng + ?Sized>(alpha_bar: f64, b: f64, rng: &mut R) -> f64 {
    let returns = b <= 0.0 || rng.random::<f64>() < (-2.0 * alpha_bar * b).exp();
    if returns {
        Exp::new(alpha_bar).expect("positive rate").sample(rng)
    } else {
        0.0
    }
}

/// `|B^{(ᾱ)}|` from zero with its local time, run until the probability of
/// ever returning to zero, `e^{-2 ᾱ B}`, falls below `tail_eps` with
/// `B > 0`.
///
/// The returned `l_inf` adds the local time still to come after the stop,
/// sampled from its exact conditional law, so it is exactly `Exp(ᾱ)`.
pub fn sample_drifted_reflected_with_l_inf(
    alpha_bar: f64,
    step: f64,
    stream: RngStream,
    tail_eps: f64,
) -> Result<(ScalarPath, f64)> {
    if !(alpha_bar > 0.0 && alpha_bar.is_finite()) {
        return Err(Error::Config(format!("drift must be > 0, got {alpha_bar}")));
    }
    if !(tail_eps > 0.0 && tail_eps < 1.0) {
        return Err(Error::Config(format!("tail_eps must lie in (0, 1), got {tail_eps}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("step must be > 0, got {step}")));
    }
    let mut rng = stream.rng();
    let sd = step.sqrt();
    let escape = -tail_eps.ln() / (2.0 * alpha_bar);
    let mut x = vec![0.0];
    let mut local_time = vec![0.0];
    let (mut b, mut l) = (0.0f64, 0.0f64);
    while b <= escape {
        let next = b + alpha_bar * step + sd * normal(&mut rng);
        l += bridge_local_time(b, next, step, open_uniform(&mut rng));
        b = next;
        x.push(b.abs());
        local_time.push(l);
    }
    let l_inf = l + residual_local_time(alpha_bar, b, &mut rng);
    Ok((ScalarPath { step, x, local_time }, l_inf))
}

/// Limit process when `ᾱ = max α > max(γ, 0)`, on `[0, t_end]`, as a
/// weighted sample.
///
/// The radial part is `|B^{(ᾱ)}|`; excursion labels are i.i.d. `μ` except
/// that the excursion straddling `t_end` is relabelled from `μ` restricted
/// to the argmax set when it never returns to zero. The weight is
/// `((ᾱ - γ)/ᾱ) e^{γ L_∞}`.
pub fn sample_case2(
    params: &PenaltyParams,
    space: &BranchSpace,
    t_end: f64,
    step: f64,
    stream: RngStream,
) -> Result<WeightedPath> {
    params.check_space(space)?;
    let regime = classify_regime(params, space);
    require(regime.tag, &[RegimeTag::DominantAlpha], "DOMINANT_ALPHA")?;
    let alpha_bar = regime.alpha_bar.expect("populated for DOMINANT_ALPHA");
    let n = step_count(t_end, step)?;
    let mut rng = stream.rng();
    let sd = step.sqrt();
    let mut x = Vec::with_capacity(n + 1);
    let mut branch = Vec::with_capacity(n + 1);
    let mut local_time = Vec::with_capacity(n + 1);
    x.push(0.0);
    branch.push(None);
    local_time.push(0.0);
    let mut labels = Labeler::new(space);
    let (mut b, mut l) = (0.0f64, 0.0f64);
    let mut last_start = 0;
    for i in 1..=n {
        let next = b + alpha_bar * step + sd * normal(&mut rng);
        let dl = bridge_local_time(b, next, step, open_uniform(&mut rng));
        b = next;
        l += dl;
        let xi = b.abs();
        let was_zero = x[i - 1] == 0.0;
        x.push(xi);
        branch.push(labels.next(xi, dl > 0.0, &mut rng));
        local_time.push(l);
        if xi > 0.0 && (dl > 0.0 || was_zero) {
            last_start = i;
        }
    }
    let tail = residual_local_time(alpha_bar, b, &mut rng);
    if tail == 0.0 && b != 0.0 {
        // the excursion running at t_end is the unbounded one
        let mut cumulative = Vec::with_capacity(regime.argmax_set.len());
        let total = regime.argmax_weight(space);
        let mut acc = 0.0;
        for &k in &regime.argmax_set {
            acc += space.weight(k) / total;
            cumulative.push(acc);
        }
        let pick = pick_from_cumulative(&cumulative, rng.random::<f64>());
        let label = regime.argmax_set[pick.index()];
        for slot in &mut branch[last_start..] {
            *slot = Some(label);
        }
    }
    let l_inf = l + tail;
    let gamma = params.gamma();
    let weight = (alpha_bar - gamma) / alpha_bar * (gamma * l_inf).exp();
    let path = SpiderPath::from_parts(step, x, branch, local_time, stream);
    Ok(WeightedPath { path, weight, l_inf })
}

/// Bessel(3) from zero: the norm of three independent Gaussian walks.
pub fn sample_bessel3(t_end: f64, step: f64, stream: RngStream) -> Result<ScalarPath> {
    let n = step_count(t_end, step)?;
    let mut rng = stream.rng();
    Ok(ScalarPath {
        step,
        x: bessel3_values(n, step, &mut rng),
        local_time: vec![0.0; n + 1],
    })
}

fn bessel3_values<R: Rng + ?Sized>(n: usize, step: f64, rng: &mut R) -> Vec<f64> {
    let sd = step.sqrt();
    let mut p = [0.0f64; 3];
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for _ in 0..n {
        for c in &mut p {
            *c += sd * normal(rng);
        }
        out.push((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt());
    }
    out
}

/// Limit process when `γ < 0` and `α <= 0`, on `[0, t_end]`.
///
/// A spider runs until its local time reaches `e ~ Exp(|γ|)`; from the
/// next grid point on, the distance to the origin is an independent
/// Bessel(3) from zero on branch `V ~` [`limit_branch_law`], and the local
/// time stays at `e`. The level is crossed inside the step where the exact
/// bridge maximum of the driving walk passes `e`, and the splice starts at
/// the end of that step. When `τ_e` lies beyond the horizon the grid holds
/// an ordinary spider and `tau_e` is completed from the first-passage law
/// of the walk to level `e`.
pub fn sample_case4(
    params: &PenaltyParams,
    space: &BranchSpace,
    t_end: f64,
    step: f64,
    stream: RngStream,
) -> Result<Case4Path> {
    params.check_space(space)?;
    let regime = classify_regime(params, space);
    require(
        regime.tag,
        &[RegimeTag::NegGammaFlatMax, RegimeTag::NegGammaAllNeg],
        "NEG_GAMMA_FLAT_MAX or NEG_GAMMA_ALL_NEG",
    )?;
    let law = limit_branch_law(params, space)?;
    let mut cumulative = Vec::with_capacity(law.len());
    let mut acc = 0.0;
    for p in &law {
        acc += p;
        cumulative.push(acc);
    }
    let n = step_count(t_end, step)?;
    let mut rng = stream.rng();
    let level = Exp::new(params.gamma().abs()).expect("nonzero rate").sample(&mut rng);
    let final_branch = pick_from_cumulative(&cumulative, rng.random::<f64>());

    let sd = step.sqrt();
    let mut x = Vec::with_capacity(n + 1);
    let mut branch = Vec::with_capacity(n + 1);
    let mut local_time = Vec::with_capacity(n + 1);
    x.push(0.0);
    branch.push(None);
    local_time.push(0.0);
    let mut labels = Labeler::new(space);
    let (mut w, mut s) = (0.0f64, 0.0f64);
    let mut splice_index = None;
    for i in 1..=n {
        let next = w + sd * normal(&mut rng);
        let top = bridge_maximum(w, next, step, open_uniform(&mut rng));
        if top >= level {
            splice_index = Some(i);
            break;
        }
        let touched = top > s;
        if touched {
            s = top;
        }
        w = next;
        let xi = s - w;
        x.push(xi);
        branch.push(labels.next(xi, touched, &mut rng));
        local_time.push(s);
    }
    let tau_e = match splice_index {
        Some(i) => {
            let tail = bessel3_values(n - i, step, &mut rng);
            for r in tail {
                x.push(r);
                branch.push((r > 0.0).then_some(final_branch));
                local_time.push(level);
            }
            i as f64 * step
        }
        None => {
            // first passage of the walk from w to level: (level - w)^2 / Z^2
            let z = normal(&mut rng);
            n as f64 * step + (level - w).powi(2) / (z * z)
        }
    };
    Ok(Case4Path {
        path: SpiderPath::from_parts(step, x, branch, local_time, stream),
        l_inf: level,
        final_branch,
        tau_e,
        splice_index,
    })
}
