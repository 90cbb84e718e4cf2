//! Desk-scale acceptance checks, shared by the `acceptance` test target and
//! the command-line experiment kinds.
//!
//! Each function runs one check end to end and returns a [`CriterionOutcome`]
//! carrying one [`ReportRecord`] per sub-check. Sub-checks that need their
//! own randomness use seeds `seed`, `seed + 1`, ... so they never share
//! streams.

use rand::Rng;

use crate::closed_forms::{
    asymptotic_density_ratio, classify_regime, i_exact, i_star, j_exact, j_star, limit_branch_law,
    martingale_density, radial_cdf, theta_weights, MartingaleDensity, RegimeTag,
};
use crate::error::Result;
use crate::experiment::{compare_runs, ExperimentConfig, ExperimentKind};
use crate::limit_laws::{sample_bang_bang_abs, sample_case2, sample_case4, sample_drifted_reflected_with_l_inf};
use crate::rng::RngStream;
use crate::space::{Branch, BranchSpace, PenaltyParams};
use crate::spider_sim::{path_stats, simulate_spider};
use crate::verify::convergence::{ratios_converge, z_convergence_check, RATIO_SLACK};
use crate::verify::martingale::martingale_check_many;
use crate::verify::mc::{par_samples, McEstimate};
use crate::verify::report::ReportRecord;
use crate::verify::stats::{
    chi_square_gof, distance_correlation, ks_one_sample, ks_two_sample, least_squares, resample_by_weight,
};
use crate::verify::theorem3::{theorem3_check, DEFAULT_TOL};

/// Result of one acceptance check.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionOutcome {
    pub number: u8,
    pub title: &'static str,
    pub records: Vec<ReportRecord>,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.verdict)
    }

    /// One-line summary, `PASS`/`FAIL` first.
    pub fn summary(&self) -> String {
        let failed: Vec<&str> = self
            .records
            .iter()
            .filter(|r| !r.verdict)
            .map(|r| r.name.as_str())
            .collect();
        let tail = if failed.is_empty() {
            format!("{} checks", self.records.len())
        } else {
            format!("failed: {}", failed.join(", "))
        };
        format!(
            "{} criterion {:>2} {}: {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.number,
            self.title,
            tail
        )
    }
}

/// Two equally weighted branches `a`, `b`.
pub fn two_branches() -> BranchSpace {
    BranchSpace::new([("a", 0.5), ("b", 0.5)]).expect("valid space")
}

/// One parameter set per regime on [`two_branches`], in table order.
pub fn reference_params(space: &BranchSpace) -> Vec<PenaltyParams> {
    [
        (vec![0.0, 0.0], 1.0),
        (vec![1.0, 0.0], 0.0),
        (vec![-1.0, -2.0], 0.0),
        (vec![0.0, -1.0], -1.0),
        (vec![-1.0, -2.0], -1.0),
    ]
    .into_iter()
    .map(|(a, g)| PenaltyParams::new(space, a, g).expect("valid parameters"))
    .collect()
}

fn describe(p: &PenaltyParams) -> String {
    let a: Vec<String> = p.alpha().iter().map(|v| v.to_string()).collect();
    format!("alpha=({}) gamma={}", a.join(","), p.gamma())
}

/// Monte Carlo controls shared by the simulation-based checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McSettings {
    pub n: usize,
    pub step: f64,
    pub seed: u64,
}

impl McSettings {
    pub fn new(n: usize, step: f64, seed: u64) -> Self {
        McSettings { n, step, seed }
    }
}

/// Criterion 1: `E[M_1] = 1` in every regime, within `max(4 stderr, 0.02)`.
pub fn martingale_normalization(mc: McSettings) -> Result<CriterionOutcome> {
    let space = two_branches();
    let params = reference_params(&space);
    let estimates = martingale_check_many(&params, &space, 1.0, mc.n, mc.step, mc.seed)?;
    let records = params
        .iter()
        .zip(estimates)
        .map(|(p, e)| {
            let tag = classify_regime(p, &space).tag;
            let ok = (e.mean - 1.0).abs() <= (4.0 * e.std_error).max(0.02);
            ReportRecord::new(format!("E[M_1] {tag}"), e.mean, e.std_error, ok)
                .param("params", describe(p))
                .param("n", e.n)
        })
        .collect();
    Ok(CriterionOutcome {
        number: 1,
        title: "martingale normalization",
        records,
    })
}

/// Random `(β, γ, x, t)` with `β, γ ∈ [-2, 2]`, `x ∈ [0, 3]` and `t`
/// log-uniform on `[0.1, 100]`.
pub fn random_majorant_tuples(count: usize, seed: u64) -> Vec<(f64, f64, f64, f64)> {
    let mut rng = RngStream::new(seed, 0).rng();
    (0..count)
        .map(|_| {
            let beta = rng.random_range(-2.0..2.0);
            let gamma = rng.random_range(-2.0..2.0);
            let x = rng.random_range(0.0..3.0);
            let t = 10f64.powf(rng.random_range(-1.0..2.0));
            (beta, gamma, x, t)
        })
        .collect()
}

/// Criterion 2: `J <= J*` and `I <= I*` by quadrature on random tuples, relative slack
/// `1e-9`.
pub fn majorant_inequalities(count: usize, seed: u64) -> Result<CriterionOutcome> {
    let mut worst_j: f64 = 0.0;
    let mut worst_i: f64 = 0.0;
    for (beta, gamma, x, t) in random_majorant_tuples(count, seed) {
        let js = j_star(beta, x, t)?;
        if js > 0.0 {
            worst_j = worst_j.max(j_exact(beta, x, t, js * 1e-13)?.value / js);
        }
        let is = i_star(beta, gamma, x, t)?;
        worst_i = worst_i.max(i_exact(beta, gamma, x, t, is * 1e-13)?.value / is);
    }
    let bound = 1.0 + RATIO_SLACK;
    Ok(CriterionOutcome {
        number: 2,
        title: "majorant inequalities",
        records: vec![
            ReportRecord::new("max J/J*", worst_j, 0.0, worst_j <= bound).param("tuples", count),
            ReportRecord::new("max I/I*", worst_i, 0.0, worst_i <= bound).param("tuples", count),
        ],
    })
}

/// Criterion 3: `Z / Z*` at `t = 10^3` in `[0.9, 1]`, increasing along
/// `t ∈ {10, 10^2, 10^3}`, for three regimes.
pub fn z_equivalence() -> Result<CriterionOutcome> {
    let space = two_branches();
    let sets = [
        (vec![-1.0, -1.0], -1.0),
        (vec![-1.0, -2.0], 0.0),
        (vec![0.0, 0.0], 1.0),
    ];
    let mut records = Vec::new();
    for (alpha, gamma) in sets {
        let p = PenaltyParams::new(&space, alpha, gamma)?;
        let rows = z_convergence_check(&p, &space, 0.0, Branch(0), &[10.0, 100.0, 1000.0])?;
        let ratios: Vec<String> = rows.iter().map(|r| format!("{:.6}", r.ratio)).collect();
        let last = rows.last().expect("three rows").ratio;
        records.push(
            ReportRecord::new(format!("Z/Z* {}", classify_regime(&p, &space).tag), last, 0.0, ratios_converge(&rows, 0.1))
                .param("params", describe(&p))
                .param("ratios", ratios.join("|")),
        );
    }
    Ok(CriterionOutcome {
        number: 3,
        title: "Z equivalence",
        records,
    })
}

/// Criterion 4: Joint law of `(L_1, X_1)` from zero: `L_1 + X_1` against the radial
/// law, `X_1 / (L_1 + X_1)` against `U[0, 1]`, distance correlation below
/// 0.05.
pub fn local_time_joint_law(mc: McSettings) -> Result<CriterionOutcome> {
    let space = two_branches();
    let pairs = par_samples(mc.n, mc.seed, |stream| {
        let path = simulate_spider(&space, 1.0, mc.step, stream)?;
        let pt = path_stats(&path, 1.0)?;
        Ok((pt.local_time + pt.x, pt.x / (pt.local_time + pt.x)))
    })?;
    let radial: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let angle: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let ks_r = ks_one_sample(&radial, |z| radial_cdf(0.0, 1.0, z).unwrap_or(f64::NAN))?;
    let ks_a = ks_one_sample(&angle, |u| u.clamp(0.0, 1.0))?;
    let dcor = distance_correlation(&radial, &angle)?;
    Ok(CriterionOutcome {
        number: 4,
        title: "joint law of local time and distance",
        records: vec![
            ReportRecord::new("KS radial", ks_r.statistic, ks_r.critical, !ks_r.exceeded).param("n", mc.n),
            ReportRecord::new("KS angle", ks_a.statistic, ks_a.critical, !ks_a.exceeded).param("n", mc.n),
            ReportRecord::new("distance correlation", dcor, 0.05, dcor < 0.05).param("n", mc.n),
        ],
    })
}

/// Criterion 5: Spider `X_1` resampled by `M` (`γ = 1`, `α ≡ 0`) against `|bang-bang|`
/// at time 1, two-sample KS.
pub fn case1_bang_bang(mc: McSettings) -> Result<CriterionOutcome> {
    let space = two_branches();
    let p = PenaltyParams::new(&space, vec![0.0, 0.0], 1.0)?;
    let density = MartingaleDensity::new(&p, &space)?;
    let weighted = par_samples(mc.n, mc.seed, |stream| {
        let path = simulate_spider(&space, 1.0, mc.step, stream)?;
        let pt = path_stats(&path, 1.0)?;
        Ok((pt.x, density.eval(pt.x, pt.branch, pt.local_time, 1.0)))
    })?;
    let limit = par_samples(mc.n, mc.seed + 1, |stream| {
        Ok(sample_bang_bang_abs(1.0, 1.0, mc.step, stream)?.last())
    })?;
    let xs: Vec<f64> = weighted.iter().map(|p| p.0).collect();
    let ws: Vec<f64> = weighted.iter().map(|p| p.1).collect();
    let resampled = resample_by_weight(&xs, &ws, &mut RngStream::new(mc.seed + 2, 0).rng())?;
    let ks = ks_two_sample(&resampled, &limit)?;
    Ok(CriterionOutcome {
        number: 5,
        title: "limit law, dominant gamma",
        records: vec![ReportRecord::new("KS weighted spider vs |bang-bang|", ks.statistic, ks.critical, !ks.exceeded)
            .param("resampled", resampled.len())
            .param("limit", limit.len())],
    })
}

fn exp_cdf(rate: f64) -> impl Fn(f64) -> f64 {
    move |v| if v <= 0.0 { 0.0 } else { -(-rate * v).exp_m1() }
}

/// Criterion 6: Dominant `ᾱ = 1`: `L_∞ ~ Exp(1)` when `γ = 0`; with `γ = 0.5` the
/// weighted `L_∞ ~ Exp(0.5)` and the mean weight is 1.
pub fn case2_local_time(mc: McSettings) -> Result<CriterionOutcome> {
    let l_plain = par_samples(mc.n, mc.seed, |stream| {
        Ok(sample_drifted_reflected_with_l_inf(1.0, mc.step, stream, 1e-6)?.1)
    })?;
    let ks_plain = ks_one_sample(&l_plain, exp_cdf(1.0))?;

    let space = two_branches();
    let p = PenaltyParams::new(&space, vec![1.0, 0.0], 0.5)?;
    let draws = par_samples(mc.n, mc.seed + 1, |stream| {
        let w = sample_case2(&p, &space, 1.0, mc.step, stream)?;
        Ok((w.l_inf, w.weight))
    })?;
    let ls: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let ws: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let resampled = resample_by_weight(&ls, &ws, &mut RngStream::new(mc.seed + 2, 0).rng())?;
    let ks_weighted = ks_one_sample(&resampled, exp_cdf(0.5))?;
    let mean_w = McEstimate::from_samples(&ws)?;
    Ok(CriterionOutcome {
        number: 6,
        title: "limit law, dominant alpha",
        records: vec![
            ReportRecord::new("KS L_inf vs Exp(1), gamma=0", ks_plain.statistic, ks_plain.critical, !ks_plain.exceeded)
                .param("n", mc.n),
            ReportRecord::new(
                "KS weighted L_inf vs Exp(0.5), gamma=0.5",
                ks_weighted.statistic,
                ks_weighted.critical,
                !ks_weighted.exceeded,
            )
            .param("resampled", resampled.len()),
            ReportRecord::new("E[weight], gamma=0.5", mean_w.mean, mean_w.std_error, mean_w.within(1.0, 4.0))
                .param("n", mc.n),
        ],
    })
}

/// Criterion 7: Negative `γ` (`α = (-1, -2)`, `γ = -1`) on `[0, t_end]`: `L_∞ ~
/// Exp(|γ|)`, branch after `τ_e` follows the limit branch law, branch at
/// time 1 before `τ_e` follows `μ`, and `E[R_s^2] = 3 s` on the spliced
/// segment (least-squares slope within 5%).
pub fn case4_splice(mc: McSettings, t_end: f64) -> Result<CriterionOutcome> {
    let space = two_branches();
    let p = PenaltyParams::new(&space, vec![-1.0, -2.0], -1.0)?;
    let law = limit_branch_law(&p, &space)?;
    let window = (1.0 / mc.step).round() as usize;
    let paths = par_samples(mc.n, mc.seed, |stream| sample_case4(&p, &space, t_end, mc.step, stream))?;

    let l_inf: Vec<f64> = paths.iter().map(|c| c.l_inf).collect();
    let ks = ks_one_sample(&l_inf, exp_cdf(p.gamma().abs()))?;

    let last = paths[0].path.len() - 1;
    let mut after = vec![0u64; space.len()];
    let mut before = vec![0u64; space.len()];
    let mut sums = vec![0.0; window + 1];
    let mut used = 0usize;
    for c in &paths {
        if let Some(k) = c.splice_index {
            if let Some(b) = c.path.branch()[last] {
                after[b.index()] += 1;
            }
            if k + window <= last {
                used += 1;
                for (j, acc) in sums.iter_mut().enumerate() {
                    *acc += c.path.x()[k + j].powi(2);
                }
            }
        }
        if c.tau_e > 1.0 {
            if let Some(b) = path_stats(&c.path, 1.0)?.branch {
                before[b.index()] += 1;
            }
        }
    }
    let chi_after = chi_square_gof(&after, &law)?;
    let chi_before = chi_square_gof(&before, space.weights())?;
    let s_grid: Vec<f64> = (0..=window).map(|j| j as f64 * mc.step).collect();
    let means: Vec<f64> = sums.iter().map(|v| v / used.max(1) as f64).collect();
    let (_, slope) = least_squares(&s_grid, &means)?;
    Ok(CriterionOutcome {
        number: 7,
        title: "limit law, negative gamma",
        records: vec![
            ReportRecord::new("KS L_inf vs Exp(1)", ks.statistic, ks.critical, !ks.exceeded).param("n", mc.n),
            ReportRecord::new("chi2 branch after tau_e", chi_after.statistic, chi_after.critical, !chi_after.exceeded)
                .param("counts", format!("{after:?}"))
                .param("law", format!("{law:?}")),
            ReportRecord::new("chi2 branch before tau_e", chi_before.statistic, chi_before.critical, !chi_before.exceeded)
                .param("counts", format!("{before:?}")),
            ReportRecord::new("slope of E[R_s^2]", slope, 0.15, (slope / 3.0 - 1.0).abs() <= 0.05)
                .param("segments", used)
                .param("t_end", t_end),
        ],
    })
}

/// Random all-negative parameter sets on 2 to 5 branches.
pub fn random_negative_sets(count: usize, seed: u64) -> Result<Vec<(BranchSpace, PenaltyParams)>> {
    let mut rng = RngStream::new(seed, 0).rng();
    (0..count)
        .map(|_| {
            let size = rng.random_range(2..=5usize);
            let raw: Vec<f64> = (0..size).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let head: f64 = weights[1..].iter().sum();
            weights[0] = 1.0 - head;
            let space = BranchSpace::new(weights.iter().enumerate().map(|(i, &w)| (format!("e{i}"), w)))?;
            let alpha = (0..size).map(|_| -rng.random_range(0.1..3.0)).collect();
            let gamma = -rng.random_range(0.1..3.0);
            let params = PenaltyParams::new(&space, alpha, gamma)?;
            Ok((space, params))
        })
        .collect()
}

/// Criterion 8: `Σ μ θ = |γ|` and the limit branch law sums to 1, both to `1e-12`, on
/// random all-negative sets.
pub fn theta_identity(count: usize, seed: u64) -> Result<CriterionOutcome> {
    let mut worst_theta: f64 = 0.0;
    let mut worst_law: f64 = 0.0;
    let mut all_tagged = true;
    for (space, p) in random_negative_sets(count, seed)? {
        all_tagged &= classify_regime(&p, &space).tag == RegimeTag::NegGammaAllNeg;
        let theta = theta_weights(&p, &space)?;
        worst_theta = worst_theta.max((theta.weighted_sum(&space) - p.gamma().abs()).abs());
        let law: f64 = limit_branch_law(&p, &space)?.iter().sum();
        worst_law = worst_law.max((law - 1.0).abs());
    }
    Ok(CriterionOutcome {
        number: 8,
        title: "theta identity",
        records: vec![
            ReportRecord::new("max |sum mu theta - |gamma||", worst_theta, 1e-12, all_tagged && worst_theta <= 1e-12)
                .param("sets", count),
            ReportRecord::new("max |sum P(V=m) - 1|", worst_law, 1e-12, worst_law <= 1e-12).param("sets", count),
        ],
    })
}

/// Criterion 9: Admissible `(β, λ)` pass with residuals below `1e-4`; raising one
/// `λ` by 0.1 breaks the weight sum.
pub fn product_form_characterization() -> Result<CriterionOutcome> {
    let space = two_branches();
    let xs: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
    let ss: Vec<f64> = (0..=8).map(|i| i as f64 * 0.25).collect();
    let mut records = Vec::new();
    for (beta, lambdas) in [(1.0, [1.0, 1.0]), (1.0, [2.0, 0.0]), (0.5, [0.4, 1.6])] {
        let r = theorem3_check(&space, beta, &lambdas, &xs, &ss, DEFAULT_TOL)?;
        let worst = r.max_pde_residual.max(r.flux_residual).max(r.weight_sum_residual);
        records.push(
            ReportRecord::new("admissible combination passes", worst, DEFAULT_TOL, r.passed())
                .param("beta", beta)
                .param("lambda", format!("{lambdas:?}")),
        );
        let bumped = [lambdas[0] + 0.1, lambdas[1]];
        let r = theorem3_check(&space, beta, &bumped, &xs, &ss, DEFAULT_TOL)?;
        records.push(
            ReportRecord::new("perturbed combination fails", r.weight_sum_residual, DEFAULT_TOL, !r.weight_sum_pass)
                .param("beta", beta)
                .param("lambda", format!("{bumped:?}")),
        );
    }
    Ok(CriterionOutcome {
        number: 9,
        title: "product-form characterization",
        records,
    })
}

/// Criterion 10: `e^{γ l} Ž(x, k, u - s) / Ž(0, k, u)` against `M(x, k, l, s)` at
/// `(x, l, s) = (0.5, 1, 1)`: within `1e-3` at `u = 10^6` and `1e-6` at
/// `u = 10^8`, relative, on every branch.
pub fn asymptotic_consistency() -> Result<CriterionOutcome> {
    let space = two_branches();
    let (x, l, s) = (0.5, 1.0, 1.0);
    let mut records = Vec::new();
    for p in reference_params(&space) {
        let tag = classify_regime(&p, &space).tag;
        for k in space.branches() {
            let m = martingale_density(&p, &space, x, k, l, s)?;
            for (u, tol) in [(1e6, 1e-3), (1e8, 1e-6)] {
                let err = (asymptotic_density_ratio(&p, &space, x, k, l, s, u)? / m - 1.0).abs();
                records.push(
                    ReportRecord::new(format!("ratio vs M {tag} k={}", space.label(k)), err, tol, err <= tol)
                        .param("u", u),
                );
            }
        }
    }
    Ok(CriterionOutcome {
        number: 10,
        title: "asymptotic table consistency",
        records,
    })
}

/// Small-scale config for every experiment kind, used by [`reproducibility`].
pub fn reproducibility_configs(seed: u64) -> Vec<(ExperimentKind, ExperimentConfig)> {
    let mc = format!("seed = {seed}\nn = 2000\nstep = 0.001\n");
    let two = "mu.a = 0.5\nmu.b = 0.5\n";
    let texts: Vec<(ExperimentKind, String)> = vec![
        (ExperimentKind::Simulate, format!("seed = {seed}\npaths = 4\nt_end = 1\nstep = 0.001\n")),
        (ExperimentKind::VerifyMartingale, mc.clone()),
        (ExperimentKind::VerifyZ, format!("{two}alpha.a = 0\nalpha.b = -1\ngamma = -1\nx = 0.5\n")),
        (ExperimentKind::VerifyLimitLaw, format!("{mc}case = 1\n")),
        (ExperimentKind::VerifyLimitLaw, format!("{mc}case = 2\n")),
        (ExperimentKind::VerifyLimitLaw, format!("{mc}case = 4\nt_end = 2\n")),
        (ExperimentKind::Theorem3, String::new()),
        (ExperimentKind::Tables, String::new()),
        (ExperimentKind::VerifyMajorant, format!("seed = {seed}\n")),
        (ExperimentKind::VerifyLocalTimeLaw, mc.clone()),
        (ExperimentKind::VerifyTheta, format!("seed = {seed}\n")),
        (ExperimentKind::VerifyAsymptotic, String::new()),
        (
            ExperimentKind::VerifyPenalized,
            format!("{mc}{two}alpha.a = 0\nalpha.b = -1\ngamma = -1\nt_grid = 2, 3\n"),
        ),
    ];
    texts
        .into_iter()
        .map(|(k, t)| (k, ExperimentConfig::parse(&t).expect("fixed configs parse")))
        .collect()
}

/// Criterion 11: Every experiment kind produces byte-identical files on 1 worker and
/// on `threads` workers.
pub fn reproducibility(seed: u64, threads: usize) -> Result<CriterionOutcome> {
    let mut records = Vec::new();
    for (kind, cfg) in reproducibility_configs(seed) {
        let report = compare_runs(kind, &cfg, (1, threads))?;
        let differing = report.files.iter().filter(|f| !f.1).count();
        let mut record = ReportRecord::new(format!("bytes identical: {kind}"), differing as f64, 0.0, report.identical())
            .param("files", report.files.len())
            .param("threads", format!("1 vs {threads}"));
        if let Some(case) = cfg.str("case") {
            record = record.param("case", case);
        }
        records.push(record);
    }
    Ok(CriterionOutcome {
        number: 11,
        title: "reproducibility across worker counts",
        records,
    })
}
