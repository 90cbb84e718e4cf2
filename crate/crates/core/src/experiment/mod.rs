//! Config-driven experiment runs: CSV tables, SVG plots and a hash manifest.
//!
//! Every kind reads an [`ExperimentConfig`], runs to completion and returns
//! its files in memory as a [`RunOutput`]. Each CSV starts with the comment
//! line `# spiderlab <kind> v1`, which pins its column layout. Floats are
//! printed in shortest round-trip form, and all Monte Carlo work goes
//! through order-preserving parallel maps, so outputs are byte-identical
//! for a fixed config whatever the worker count.

mod config;
pub mod plot;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

pub use config::ExperimentConfig;
use plot::{render_svg, Labels, PlotKind, Series};

use crate::closed_forms::{classify_regime, martingale_density, MartingaleDensity};
use crate::error::{Error, Result};
use crate::limit_laws::{sample_bang_bang_abs, sample_case4, sample_drifted_reflected_with_l_inf};
use crate::space::{Branch, BranchSpace, PenaltyParams};
use crate::spider_sim::{excursions, simulate_spider, PathPoint};
use crate::verify::convergence::{ratios_converge, z_convergence_check};
use crate::verify::criteria::{self, two_branches, CriterionOutcome, McSettings};
use crate::verify::martingale::{martingale_check_many, penalized_vs_limit};
use crate::verify::mc::par_samples;
use crate::verify::report::ReportRecord;
use crate::verify::theorem3::{theorem3_check, DEFAULT_TOL};

/// Seed used when neither the config nor the command line sets one.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Name of the manifest written next to the outputs.
pub const MANIFEST: &str = "manifest.sha256";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    /// Spider paths dumped as CSV, with a plot of the first few.
    Simulate,
    /// `E[M_s] = 1` for the configured parameters, or for one set per
    /// regime when none are given.
    VerifyMartingale,
    /// `Z / Z*` sweep along `t_grid`.
    VerifyZ,
    /// Limit-law checks; `case = 1 | 2 | 4`.
    VerifyLimitLaw,
    /// Product-form characterization residuals.
    Theorem3,
    /// The limiting density on a grid of `(x, k, l, s)`.
    Tables,
    VerifyMajorant,
    VerifyLocalTimeLaw,
    VerifyTheta,
    VerifyAsymptotic,
    /// Penalized expectations at growing horizons against the limit.
    VerifyPenalized,
    /// Runs `inner` under two worker counts and compares the bytes.
    Reproducibility,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 12] = [
        ExperimentKind::Simulate,
        ExperimentKind::VerifyMartingale,
        ExperimentKind::VerifyZ,
        ExperimentKind::VerifyLimitLaw,
        ExperimentKind::Theorem3,
        ExperimentKind::Tables,
        ExperimentKind::VerifyMajorant,
        ExperimentKind::VerifyLocalTimeLaw,
        ExperimentKind::VerifyTheta,
        ExperimentKind::VerifyAsymptotic,
        ExperimentKind::VerifyPenalized,
        ExperimentKind::Reproducibility,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::VerifyMartingale => "verify-martingale",
            ExperimentKind::VerifyZ => "verify-z",
            ExperimentKind::VerifyLimitLaw => "verify-limit-law",
            ExperimentKind::Theorem3 => "theorem3",
            ExperimentKind::Tables => "tables",
            ExperimentKind::VerifyMajorant => "verify-majorant",
            ExperimentKind::VerifyLocalTimeLaw => "verify-local-time-law",
            ExperimentKind::VerifyTheta => "verify-theta",
            ExperimentKind::VerifyAsymptotic => "verify-asymptotic",
            ExperimentKind::VerifyPenalized => "verify-penalized",
            ExperimentKind::Reproducibility => "reproducibility",
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{s}`")))
    }
}

/// Files produced by a run, in emission order, plus the overall verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub passed: bool,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
}

impl RunOutput {
    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// `sha256  name` per file, in emission order.
    pub fn manifest(&self) -> String {
        self.files
            .iter()
            .map(|(name, bytes)| format!("{}  {name}\n", hex::encode(Sha256::digest(bytes))))
            .collect()
    }
}

/// Shortest round-trip decimal form, always with a `.` or exponent.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(kind: ExperimentKind, columns: &[&str]) -> Self {
        Csv {
            text: format!("# spiderlab {kind} v1\n{}\n", columns.join(",")),
        }
    }

    fn row(&mut self, cells: &[String]) {
        let cells: Vec<String> = cells.iter().map(|c| field(c)).collect();
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

fn records_csv(kind: ExperimentKind, records: &[ReportRecord]) -> Vec<u8> {
    let mut csv = Csv::new(kind, &["name", "params", "estimate", "error", "verdict"]);
    for r in records {
        csv.row(&[
            r.name.clone(),
            r.params_joined(),
            num(r.estimate),
            num(r.error),
            (if r.verdict { "pass" } else { "fail" }).to_string(),
        ]);
    }
    csv.into_bytes()
}

fn from_outcome(kind: ExperimentKind, outcome: CriterionOutcome) -> RunOutput {
    let mut summary = vec![outcome.summary()];
    summary.extend(outcome.records.iter().map(|r| r.to_string()));
    RunOutput {
        files: vec![("records.csv".into(), records_csv(kind, &outcome.records))],
        passed: outcome.passed(),
        summary,
    }
}

fn svg(series: &[Series], kind: PlotKind, title: &str, x: &str, y: &str) -> Result<Vec<u8>> {
    let labels = Labels {
        title: title.into(),
        x: x.into(),
        y: y.into(),
    };
    Ok(render_svg(series, kind, &labels)?.into_bytes())
}

fn seed(cfg: &ExperimentConfig) -> Result<u64> {
    cfg.u64_or("seed", DEFAULT_SEED)
}

fn mc_settings(cfg: &ExperimentConfig, n: usize) -> Result<McSettings> {
    Ok(McSettings::new(
        cfg.count_or("n", n, 2)?,
        cfg.positive_f64_or("step", 1e-3)?,
        seed(cfg)?,
    ))
}

fn space_or_default(cfg: &ExperimentConfig) -> Result<BranchSpace> {
    Ok(cfg.branch_space()?.unwrap_or_else(two_branches))
}

fn required_params(cfg: &ExperimentConfig, space: &BranchSpace, kind: ExperimentKind) -> Result<PenaltyParams> {
    cfg.penalty(space)?
        .ok_or_else(|| Error::Config(format!("{kind} needs `alpha.<label>` and/or `gamma`")))
}

/// The configured parameters, or one reference set per regime on two equal
/// branches when the config gives no branch space.
fn configured_or_reference(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<(BranchSpace, Vec<PenaltyParams>)> {
    match cfg.branch_space()? {
        Some(space) => {
            let p = required_params(cfg, &space, kind)?;
            Ok((space, vec![p]))
        }
        None => {
            if cfg.contains("gamma") {
                return Err(Error::Config(format!("{kind}: `gamma` given without `mu.<label>` weights")));
            }
            let space = two_branches();
            let params = criteria::reference_params(&space);
            Ok((space, params))
        }
    }
}

fn branch_key(cfg: &ExperimentConfig, space: &BranchSpace) -> Result<Branch> {
    match cfg.str("branch") {
        None => Ok(Branch(0)),
        Some(label) => space
            .branch(label)
            .ok_or_else(|| Error::Config(format!("`branch = {label}` names no branch"))),
    }
}

fn describe(p: &PenaltyParams) -> String {
    let a: Vec<String> = p.alpha().iter().map(|v| num(*v)).collect();
    format!("alpha=({}) gamma={}", a.join(" "), num(p.gamma()))
}

/// Keep at most `max` evenly spaced points.
fn thin(points: Vec<(f64, f64)>, max: usize) -> Vec<(f64, f64)> {
    if points.len() <= max {
        return points;
    }
    let stride = points.len().div_ceil(max);
    let last = *points.last().expect("nonempty");
    let mut out: Vec<(f64, f64)> = points.into_iter().step_by(stride).collect();
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

/// Run one experiment. Config problems surface as [`Error::Config`]; a
/// failed verdict is reported through [`RunOutput::passed`].
pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<RunOutput> {
    if let Some(k) = cfg.str("kind") {
        if k != kind.as_str() {
            return Err(Error::Config(format!("config sets kind = {k} but {kind} was requested")));
        }
    }
    match kind {
        ExperimentKind::Simulate => simulate(cfg),
        ExperimentKind::VerifyMartingale => verify_martingale(cfg),
        ExperimentKind::VerifyZ => verify_z(cfg),
        ExperimentKind::VerifyLimitLaw => verify_limit_law(cfg),
        ExperimentKind::Theorem3 => theorem3(cfg),
        ExperimentKind::Tables => tables(cfg),
        ExperimentKind::VerifyMajorant => Ok(from_outcome(
            kind,
            criteria::majorant_inequalities(cfg.count_or("tuples", 200, 1)?, seed(cfg)?)?,
        )),
        ExperimentKind::VerifyLocalTimeLaw => Ok(from_outcome(kind, criteria::local_time_joint_law(mc_settings(cfg, 10_000)?)?)),
        ExperimentKind::VerifyTheta => Ok(from_outcome(
            kind,
            criteria::theta_identity(cfg.count_or("sets", 100, 1)?, seed(cfg)?)?,
        )),
        ExperimentKind::VerifyAsymptotic => Ok(from_outcome(kind, criteria::asymptotic_consistency()?)),
        ExperimentKind::VerifyPenalized => verify_penalized(cfg),
        ExperimentKind::Reproducibility => reproducibility(cfg),
    }
}

fn simulate(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let kind = ExperimentKind::Simulate;
    let space = space_or_default(cfg)?;
    let paths = cfg.count_or("paths", 1, 1)?;
    let t_end = cfg.positive_f64_or("t_end", 1.0)?;
    let step = cfg.positive_f64_or("step", 1e-3)?;
    let sims = par_samples(paths, seed(cfg)?, |stream| simulate_spider(&space, t_end, step, stream))?;

    let mut files = Vec::new();
    let mut summary = Csv::new(kind, &["path", "x_end", "branch_end", "local_time_end", "excursions"]);
    let mut series = Vec::new();
    for (i, p) in sims.iter().enumerate() {
        let mut text = format!("# spiderlab {kind} v1\n").into_bytes();
        p.write_csv(&space, &mut text)
            .map_err(|e| Error::Io(e.to_string()))?;
        files.push((format!("path_{i:04}.csv"), text));
        let last = p.len() - 1;
        summary.row(&[
            i.to_string(),
            num(p.x()[last]),
            p.branch()[last].map_or(String::new(), |b| space.label(b).to_string()),
            num(p.local_time()[last]),
            excursions(p).len().to_string(),
        ]);
        if i < 3 {
            let pts = p.x().iter().enumerate().map(|(j, &x)| (p.time(j), x)).collect();
            series.push(Series::new(format!("path {i}"), thin(pts, 2000)));
        }
    }
    files.push(("summary.csv".into(), summary.into_bytes()));
    files.push(("paths.svg".into(), svg(&series, PlotKind::Line, "spider paths", "t", "X_t")?));
    Ok(RunOutput {
        files,
        passed: true,
        summary: vec![format!("{paths} path(s) on [0, {t_end}] with step {step}")],
    })
}

fn verify_martingale(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let kind = ExperimentKind::VerifyMartingale;
    let (space, params) = configured_or_reference(cfg, kind)?;
    let s = cfg.positive_f64_or("s", 1.0)?;
    let mc = mc_settings(cfg, 100_000)?;
    let tol = cfg.positive_f64_or("tol", 0.02)?;
    let estimates = martingale_check_many(&params, &space, s, mc.n, mc.step, mc.seed)?;
    let mut csv = Csv::new(kind, &["regime", "params", "s", "n", "mean", "std_error", "verdict"]);
    let mut passed = true;
    let mut summary = Vec::new();
    for (p, e) in params.iter().zip(estimates) {
        let tag = classify_regime(p, &space).tag;
        let ok = (e.mean - 1.0).abs() <= (4.0 * e.std_error).max(tol);
        passed &= ok;
        csv.row(&[
            tag.to_string(),
            describe(p),
            num(s),
            e.n.to_string(),
            num(e.mean),
            num(e.std_error),
            (if ok { "pass" } else { "fail" }).into(),
        ]);
        summary.push(format!(
            "{} {tag}: E[M_s] = {} +/- {}",
            if ok { "pass" } else { "FAIL" },
            num(e.mean),
            num(e.std_error)
        ));
    }
    Ok(RunOutput {
        files: vec![("martingale.csv".into(), csv.into_bytes())],
        passed,
        summary,
    })
}

fn verify_z(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let kind = ExperimentKind::VerifyZ;
    let Some(space) = cfg.branch_space()? else {
        return Ok(from_outcome(kind, criteria::z_equivalence()?));
    };
    let p = required_params(cfg, &space, kind)?;
    let x = cfg.f64_or("x", 0.0)?;
    if x < 0.0 {
        return Err(Error::Config(format!("`x` must be >= 0, got {x}")));
    }
    let k = branch_key(cfg, &space)?;
    let t_grid = cfg.list_or("t_grid", &[10.0, 100.0, 1000.0])?;
    let band = cfg.positive_f64_or("band", 0.1)?;
    let rows = z_convergence_check(&p, &space, x, k, &t_grid)?;
    let passed = ratios_converge(&rows, band);
    let mut csv = Csv::new(kind, &["t", "z_exact", "z_star", "ratio"]);
    for r in &rows {
        csv.row(&[num(r.t), num(r.z_exact), num(r.z_star), num(r.ratio)]);
    }
    let curve = Series::new("Z / Z*", rows.iter().map(|r| (r.t.log10(), r.ratio)).collect());
    Ok(RunOutput {
        files: vec![
            ("z_ratio.csv".into(), csv.into_bytes()),
            ("z_ratio.svg".into(), svg(&[curve], PlotKind::Line, "exact over majorant", "log10 t", "ratio")?),
        ],
        passed,
        summary: rows
            .iter()
            .map(|r| format!("t = {}: Z/Z* = {}", num(r.t), num(r.ratio)))
            .chain([format!("{} (band {band})", if passed { "pass" } else { "FAIL" })])
            .collect(),
    })
}

fn exp_density_curve(rate: f64, top: f64) -> Series {
    Series::new(
        format!("Exp({}) density", num(rate)),
        (0..=200).map(|i| {
            let v = top * i as f64 / 200.0;
            (v, rate * (-rate * v).exp())
        })
        .collect(),
    )
}

fn verify_limit_law(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let kind = ExperimentKind::VerifyLimitLaw;
    let case = cfg
        .str("case")
        .ok_or_else(|| Error::Config("verify-limit-law needs `case = 1 | 2 | 4`".into()))?;
    let mc = mc_settings(cfg, 10_000)?;
    let bins = cfg.count_or("bins", 40, 1)?;
    // The plot sample uses its own streams so the verdict does not depend
    // on whether plots are drawn.
    let plot_seed = mc.seed.wrapping_add(1_000);
    let (outcome, plot) = match case {
        "1" => {
            let out = criteria::case1_bang_bang(mc)?;
            let xs = par_samples(mc.n, plot_seed, |s| Ok(sample_bang_bang_abs(1.0, 1.0, mc.step, s)?.last()))?;
            let samples = Series::new("|bang-bang| at t=1", xs.into_iter().map(|v| (v, 0.0)).collect());
            (out, svg(&[samples], PlotKind::Histogram { bins }, "limit law, dominant gamma", "x", "density")?)
        }
        "2" => {
            let out = criteria::case2_local_time(mc)?;
            let ls = par_samples(mc.n, plot_seed, |s| Ok(sample_drifted_reflected_with_l_inf(1.0, mc.step, s, 1e-6)?.1))?;
            let top = ls.iter().cloned().fold(0.0, f64::max);
            let samples = Series::new("L_inf samples", ls.into_iter().map(|v| (v, 0.0)).collect());
            let series = [samples, exp_density_curve(1.0, top)];
            (out, svg(&series, PlotKind::Histogram { bins }, "total local time, drift 1", "L_inf", "density")?)
        }
        "4" => {
            let t_end = cfg.positive_f64_or("t_end", 5.0)?;
            let out = criteria::case4_splice(mc, t_end)?;
            let space = two_branches();
            let p = PenaltyParams::new(&space, vec![-1.0, -2.0], -1.0)?;
            let ls = par_samples(mc.n, plot_seed, |s| Ok(sample_case4(&p, &space, 1.0, mc.step, s)?.l_inf))?;
            let top = ls.iter().cloned().fold(0.0, f64::max);
            let samples = Series::new("L_inf samples", ls.into_iter().map(|v| (v, 0.0)).collect());
            let series = [samples, exp_density_curve(1.0, top)];
            (out, svg(&series, PlotKind::Histogram { bins }, "total local time, gamma = -1", "L_inf", "density")?)
        }
        other => return Err(Error::Config(format!("`case = {other}`: expected 1, 2 or 4"))),
    };
    let mut run = from_outcome(kind, outcome);
    run.files.push(("limit_law.svg".into(), plot));
    Ok(run)
}

fn theorem3(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let kind = ExperimentKind::Theorem3;
    if !cfg.contains("beta") {
        return Ok(from_outcome(kind, criteria::product_form_characterization()?));
    }
    let space = space_or_default(cfg)?;
    let beta = cfg.positive_f64_or("beta", 1.0)?;
    let lambdas = cfg
        .per_branch("lambda", &space)?
        .ok_or_else(|| Error::Config("theorem3 with `beta` needs `lambda.<label>` for every branch".into()))?;
    let x_grid = cfg.list_or("x_grid", &(0..=20).map(|i| i as f64 * 0.25).collect::<Vec<_>>())?;
    let s_grid = cfg.list_or("s_grid", &(0..=8).map(|i| i as f64 * 0.25).collect::<Vec<_>>())?;
    let tol = cfg.positive_f64_or("tol", DEFAULT_TOL)?;
    let r = theorem3_check(&space, beta, &lambdas, &x_grid, &s_grid, tol)?;
    let verdict = |ok: bool| (if ok { "pass" } else { "fail" }).to_string();
    let mut csv = Csv::new(kind, &["check", "residual", "tol", "verdict"]);
    csv.row(&["pde".into(), num(r.max_pde_residual), num(tol), verdict(r.pde_pass)]);
    csv.row(&["flux".into(), num(r.flux_residual), num(tol), verdict(r.flux_pass)]);
    csv.row(&["weight_sum".into(), num(r.weight_sum_residual), num(tol), verdict(r.weight_sum_pass)]);
    csv.row(&["positivity".into(), String::new(), String::new(), verdict(r.positivity_pass)]);
    Ok(RunOutput {
        files: vec![("theorem3.csv".into(), csv.into_bytes())],
        passed: r.passed(),
        summary: vec![format!(
            "{}: pde {} flux {} weight sum {}",
            if r.passed() { "pass" } else { "FAIL" },
            num(r.max_pde_residual),
            num(r.flux_residual),
            num(r.weight_sum_residual)
        )],
    })
}

fn tables(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let kind = ExperimentKind::Tables;
    let (space, params) = configured_or_reference(cfg, kind)?;
    let x_grid = cfg.list_or("x_grid", &[0.0, 0.5, 1.0, 2.0])?;
    let l_grid = cfg.list_or("l_grid", &[0.0, 1.0])?;
    let s_grid = cfg.list_or("s_grid", &[0.5, 1.0, 2.0])?;
    let mut csv = Csv::new(kind, &["regime", "params", "x", "branch", "l", "s", "density"]);
    let mut passed = true;
    let mut summary = Vec::new();
    for p in &params {
        let tag = classify_regime(p, &space).tag;
        let m = MartingaleDensity::new(p, &space)?;
        let mut rows = 0;
        for &x in &x_grid {
            for k in space.branches() {
                for &l in &l_grid {
                    for &s in &s_grid {
                        let v = martingale_density(p, &space, x, k, l, s)
                            .map_err(|e| Error::Config(format!("grid point (x={x}, l={l}, s={s}): {e}")))?;
                        passed &= v.is_finite() && v >= 0.0 && v == m.eval(x, Some(k), l, s);
                        csv.row(&[
                            tag.to_string(),
                            describe(p),
                            num(x),
                            space.label(k).to_string(),
                            num(l),
                            num(s),
                            num(v),
                        ]);
                        rows += 1;
                    }
                }
            }
        }
        summary.push(format!("{tag}: {rows} rows ({})", describe(p)));
    }
    Ok(RunOutput {
        files: vec![("density_table.csv".into(), csv.into_bytes())],
        passed,
        summary,
    })
}

fn functional(name: &str) -> Result<fn(PathPoint) -> f64> {
    Ok(match name {
        "x" => |p: PathPoint| p.x,
        "x2" => |p: PathPoint| p.x * p.x,
        "local_time" => |p: PathPoint| p.local_time,
        "at_zero" => |p: PathPoint| if p.x == 0.0 { 1.0 } else { 0.0 },
        other => {
            return Err(Error::Config(format!(
                "`functional = {other}`: expected x, x2, local_time or at_zero"
            )))
        }
    })
}

fn verify_penalized(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let kind = ExperimentKind::VerifyPenalized;
    let space = space_or_default(cfg)?;
    let p = required_params(cfg, &space, kind)?;
    let s = cfg.positive_f64_or("s", 1.0)?;
    let t_grid = cfg.list_or("t_grid", &[2.0, 5.0, 10.0])?;
    let f_name = cfg.str("functional").unwrap_or("x");
    let f = functional(f_name)?;
    let mc = mc_settings(cfg, 10_000)?;
    let band = cfg.positive_f64_or("band", 0.05)?;
    let rows = penalized_vs_limit(&p, &space, s, &t_grid, f, mc.n, mc.step, mc.seed)?;
    let mut csv = Csv::new(
        kind,
        &["t", "penalized", "penalized_se", "limit", "limit_se", "ess", "heavy_tail"],
    );
    for r in &rows {
        csv.row(&[
            num(r.t),
            num(r.penalized.mean),
            num(r.penalized.std_error),
            num(r.limit.mean),
            num(r.limit.std_error),
            num(r.ess),
            r.heavy_tail.to_string(),
        ]);
    }
    // only the largest horizon with enough effective samples is judged
    let judged = rows.iter().rev().find(|r| !r.heavy_tail);
    let passed = judged.is_none_or(|r| {
        let se = r.penalized.std_error.hypot(r.limit.std_error);
        (r.penalized.mean - r.limit.mean).abs() <= 4.0 * se + band * r.limit.mean.abs()
    });
    let mut summary: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "t = {}: penalized {} +/- {}, limit {} +/- {}, ess {}{}",
                num(r.t),
                num(r.penalized.mean),
                num(r.penalized.std_error),
                num(r.limit.mean),
                num(r.limit.std_error),
                num(r.ess),
                if r.heavy_tail { " (heavy tail, not judged)" } else { "" }
            )
        })
        .collect();
    if judged.is_none() {
        summary.push("every horizon is below the effective-sample floor; nothing judged".into());
    }
    let penalized = Series::new(
        "penalized",
        rows.iter().map(|r| (r.t, r.penalized.mean)).collect(),
    );
    let limit = Series::new("limit", rows.iter().map(|r| (r.t, r.limit.mean)).collect());
    Ok(RunOutput {
        files: vec![
            ("penalized.csv".into(), csv.into_bytes()),
            (
                "penalized.svg".into(),
                svg(&[penalized, limit], PlotKind::Line, &format!("E[{f_name}] at s"), "t", f_name)?,
            ),
        ],
        passed,
        summary,
    })
}

/// Run `kind` on a dedicated pool with `threads` workers.
pub fn run_with_threads(kind: ExperimentKind, cfg: &ExperimentConfig, threads: usize) -> Result<RunOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build a pool of {threads} workers: {e}")))?;
    pool.install(|| run_experiment(kind, cfg))
}

/// Byte comparison of two runs of the same config under different worker
/// counts.
#[derive(Clone, Debug, PartialEq)]
pub struct ReproducibilityReport {
    pub kind: ExperimentKind,
    pub threads: (usize, usize),
    /// `(file, identical)` for every file of either run.
    pub files: Vec<(String, bool)>,
}

impl ReproducibilityReport {
    pub fn identical(&self) -> bool {
        !self.files.is_empty() && self.files.iter().all(|f| f.1)
    }
}

pub fn compare_runs(
    kind: ExperimentKind,
    cfg: &ExperimentConfig,
    threads: (usize, usize),
) -> Result<ReproducibilityReport> {
    if kind == ExperimentKind::Reproducibility {
        return Err(Error::Config("reproducibility cannot nest itself".into()));
    }
    let a = run_with_threads(kind, cfg, threads.0)?;
    let b = run_with_threads(kind, cfg, threads.1)?;
    let mut files: Vec<(String, bool)> = a
        .files
        .iter()
        .map(|(name, bytes)| (name.clone(), b.file(name) == Some(bytes.as_slice())))
        .collect();
    for (name, _) in &b.files {
        if a.file(name).is_none() {
            files.push((name.clone(), false));
        }
    }
    Ok(ReproducibilityReport { kind, threads, files })
}

fn reproducibility(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let kind = ExperimentKind::Reproducibility;
    let inner: ExperimentKind = cfg
        .str("inner")
        .ok_or_else(|| Error::Config("reproducibility needs `inner = <kind>`".into()))?
        .parse()?;
    let threads = cfg.count_or("threads", 4, 1)?;
    let mut inner_cfg = cfg.clone();
    inner_cfg.remove("kind");
    inner_cfg.remove("inner");
    inner_cfg.remove("threads");
    let report = compare_runs(inner, &inner_cfg, (1, threads))?;
    let mut csv = Csv::new(kind, &["file", "identical"]);
    for (name, same) in &report.files {
        csv.row(&[name.clone(), same.to_string()]);
    }
    Ok(RunOutput {
        files: vec![("reproducibility.csv".into(), csv.into_bytes())],
        passed: report.identical(),
        summary: vec![format!(
            "{}: {inner} with 1 and {threads} workers, {} file(s) compared",
            if report.identical() { "identical" } else { "DIFFERENT" },
            report.files.len()
        )],
    })
}

/// Write every file of `run` into `dir` (created if needed) followed by the
/// manifest; returns the manifest path.
pub fn write_outputs(dir: &Path, run: &RunOutput) -> Result<PathBuf> {
    let io = |path: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    for (name, bytes) in &run.files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| io(&path, e))?;
    }
    let path = dir.join(MANIFEST);
    std::fs::write(&path, run.manifest()).map_err(|e| io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn kinds_round_trip_through_their_names() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.as_str().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn flat_density_gives_exact_ones() {
        let c = cfg("mu.a = 0.5\nmu.b = 0.5\nalpha.a = -1\nalpha.b = -2\ngamma = 0\nn = 50\nstep = 0.01\n");
        let out = run_experiment(ExperimentKind::VerifyMartingale, &c).unwrap();
        assert!(out.passed);
        let text = String::from_utf8(out.files[0].1.clone()).unwrap();
        assert!(text.starts_with("# spiderlab verify-martingale v1\n"));
        let row = text.lines().nth(2).unwrap();
        assert!(row.contains(",1.0,0.0,pass"), "{row}");
    }

    #[test]
    fn csv_fields_with_commas_are_quoted() {
        assert_eq!(field("a,b"), "\"a,b\"");
        assert_eq!(field("say \"hi\", ok"), "\"say \"\"hi\"\", ok\"");
        assert_eq!(field("plain"), "plain");
    }

    #[test]
    fn manifest_lists_every_file() {
        let out = run_experiment(ExperimentKind::Simulate, &cfg("paths = 2\nt_end = 0.1\nstep = 0.01\n")).unwrap();
        let manifest = out.manifest();
        assert_eq!(manifest.lines().count(), out.files.len());
        for (name, _) in &out.files {
            assert!(manifest.contains(&format!("  {name}\n")));
        }
        let first = manifest.lines().next().unwrap();
        assert_eq!(first.split("  ").next().unwrap().len(), 64);
    }

    #[test]
    fn mismatched_kind_is_a_config_error() {
        let err = run_experiment(ExperimentKind::Tables, &cfg("kind = simulate\n")).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn tables_cover_the_grid() {
        let out = run_experiment(ExperimentKind::Tables, &cfg("")).unwrap();
        assert!(out.passed);
        let text = std::str::from_utf8(out.file("density_table.csv").unwrap()).unwrap();
        // 5 parameter sets, 4 x, 2 branches, 2 l, 3 s, plus two header lines
        assert_eq!(text.lines().count(), 5 * 4 * 2 * 2 * 3 + 2);
    }

    #[test]
    fn worker_count_does_not_change_bytes() {
        let c = cfg("paths = 3\nt_end = 0.2\nstep = 0.01\n");
        let report = compare_runs(ExperimentKind::Simulate, &c, (1, 3)).unwrap();
        assert!(report.identical(), "{report:?}");
    }
}
