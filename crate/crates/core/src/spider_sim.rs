//! Walsh spider from the origin through the Lévy construction.
//!
//! A standard walk `W` is sampled on a uniform grid together with its
//! running maximum `S`; the distance to the origin is `X = S - W` and the
//! local time is `L = S`. Every excursion of `X` away from zero carries a
//! branch label drawn from `μ`, independently of everything else.
//!
//! By default the maximum over each step is drawn from the exact bridge law
//! given the step's endpoints, which makes `(X, L)` exact in law at every
//! grid point. [`LocalTimeScheme::GridMaximum`] keeps the plain maximum over
//! grid values instead (biased low by about `0.58 sqrt(step)`).

use std::io::{self, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::{Branch, BranchSpace};
use crate::walk::{bridge_maximum, normal, open_uniform, step_count};

/// How the running maximum of the driving walk is advanced over a step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LocalTimeScheme {
    /// Exact bridge maximum between consecutive grid values.
    #[default]
    BridgeMaximum,
    /// Maximum over grid values only.
    GridMaximum,
}

/// A spider trajectory on the grid `0, step, 2 step, ..., n step`.
///
/// `branch[i]` is `None` exactly where `x[i] == 0`. A new excursion starts
/// at `i` when `x[i] > 0` and either `x[i - 1] == 0` or the local time
/// increased over step `i` (the walk came back to zero inside the step).
#[derive(Clone, Debug, PartialEq)]
pub struct SpiderPath {
    step: f64,
    x: Vec<f64>,
    branch: Vec<Option<Branch>>,
    local_time: Vec<f64>,
    stream: RngStream,
}

/// `(X_s, N_s, L_s)` read off a path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathPoint {
    pub x: f64,
    pub branch: Option<Branch>,
    pub local_time: f64,
}

/// One maximal excursion on the grid, indices inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Excursion {
    pub start: usize,
    pub end: usize,
    pub label: Branch,
}

impl SpiderPath {
    pub(crate) fn from_parts(
        step: f64,
        x: Vec<f64>,
        branch: Vec<Option<Branch>>,
        local_time: Vec<f64>,
        stream: RngStream,
    ) -> Self {
        debug_assert!(x.len() == branch.len() && x.len() == local_time.len());
        SpiderPath {
            step,
            x,
            branch,
            local_time,
            stream,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of grid points, `n + 1`.
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Time of the last grid point.
    pub fn horizon(&self) -> f64 {
        (self.x.len() - 1) as f64 * self.step
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn branch(&self) -> &[Option<Branch>] {
        &self.branch
    }

    pub fn local_time(&self) -> &[f64] {
        &self.local_time
    }

    pub fn stream(&self) -> RngStream {
        self.stream
    }

    /// Grid time of index `i`.
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    /// Whether a new excursion begins at index `i`.
    pub(crate) fn starts_excursion(&self, i: usize) -> bool {
        self.x[i] > 0.0 && (i == 0 || self.x[i - 1] == 0.0 || self.local_time[i] > self.local_time[i - 1])
    }

    /// Write the path as CSV with columns `t,x,branch,local_time`.
    pub fn write_csv<W: Write>(&self, space: &BranchSpace, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x,branch,local_time")?;
        for i in 0..self.len() {
            let label = self.branch[i].map(|b| space.label(b)).unwrap_or("");
            writeln!(
                out,
                "{},{},{},{}",
                self.time(i),
                self.x[i],
                label,
                self.local_time[i]
            )?;
        }
        Ok(())
    }
}

/// Draws labels for a discretized excursion structure.
pub(crate) struct Labeler<'a> {
    space: &'a BranchSpace,
    current: Option<Branch>,
}

impl<'a> Labeler<'a> {
    pub(crate) fn new(space: &'a BranchSpace) -> Self {
        Labeler { space, current: None }
    }

    /// Label of the grid point reached after a step; `touched` says whether
    /// the step visited zero.
    #[inline]
    pub(crate) fn next<R: Rng + ?Sized>(&mut self, x: f64, touched: bool, rng: &mut R) -> Option<Branch> {
        if x <= 0.0 {
            self.current = None;
        } else if touched || self.current.is_none() {
            self.current = Some(self.space.pick(rng.random::<f64>()));
        }
        self.current
    }
}

/// Simulate a spider from the origin on `[0, t_end]` with the default
/// [`LocalTimeScheme::BridgeMaximum`].
///
/// ```
/// use spiderlab::{simulate_spider, BranchSpace, RngStream};
///
/// let space = BranchSpace::uniform(3).unwrap();
/// let path = simulate_spider(&space, 1.0, 1e-3, RngStream::new(1, 0)).unwrap();
/// assert_eq!(path.len(), 1001);
/// assert!(path.local_time().windows(2).all(|w| w[0] <= w[1]));
/// ```
pub fn simulate_spider(space: &BranchSpace, t_end: f64, step: f64, stream: RngStream) -> Result<SpiderPath> {
    simulate_spider_with(space, t_end, step, stream, LocalTimeScheme::default())
}

/// Simulate a spider from the origin with an explicit local-time scheme.
pub fn simulate_spider_with(
    space: &BranchSpace,
    t_end: f64,
    step: f64,
    stream: RngStream,
    scheme: LocalTimeScheme,
) -> Result<SpiderPath> {
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
    let (mut w, mut s) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let next = w + sd * normal(&mut rng);
        let top = match scheme {
            LocalTimeScheme::BridgeMaximum => bridge_maximum(w, next, step, open_uniform(&mut rng)),
            LocalTimeScheme::GridMaximum => next,
        };
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
    Ok(SpiderPath::from_parts(step, x, branch, local_time, stream))
}

/// `(X_s, N_s, L_s)` at the grid point `floor(s / step)`.
pub fn path_stats(path: &SpiderPath, s: f64) -> Result<PathPoint> {
    let horizon = path.horizon();
    if !(s >= 0.0) || s > horizon * (1.0 + 1e-12) {
        return Err(Error::OutOfRange { time: s, horizon });
    }
    let i = ((s / path.step * (1.0 + 1e-12)).floor() as usize).min(path.len() - 1);
    Ok(PathPoint {
        x: path.x[i],
        branch: path.branch[i],
        local_time: path.local_time[i],
    })
}

/// Maximal excursions of the path, in order.
pub fn excursions(path: &SpiderPath) -> Vec<Excursion> {
    let mut out: Vec<Excursion> = Vec::new();
    for i in 0..path.len() {
        let Some(label) = path.branch[i] else { continue };
        if path.starts_excursion(i) {
            out.push(Excursion { start: i, end: i, label });
        } else if let Some(last) = out.last_mut() {
            last.end = i;
        }
    }
    out
}

/// First grid index where the local time reaches `level`, `None` if the
/// horizon comes first.
pub fn inverse_local_time(path: &SpiderPath, level: f64) -> Option<usize> {
    let i = path.local_time.partition_point(|&l| l < level);
    (i < path.len()).then_some(i)
}
