//! Distribution tests and resampling.

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::math::pairwise_sum;

/// Asymptotic Kolmogorov-Smirnov constant at the 1% level.
pub const KS_CRITICAL_1PCT: f64 = 1.628;

/// Outcome of a Kolmogorov-Smirnov test at the 1% level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    /// Sup-distance between the CDFs.
    pub statistic: f64,
    pub critical: f64,
    pub exceeded: bool,
}

impl KsResult {
    fn new(statistic: f64, critical: f64) -> Self {
        KsResult {
            statistic,
            critical,
            exceeded: statistic > critical,
        }
    }
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(i) = xs.iter().position(|v| v.is_nan()) {
        return Err(Error::NonFiniteSample { index: i as u64, value: xs[i] });
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample KS: `sup |F_a - F_b|`, critical value
/// `1.628 sqrt((n + m) / (n m))`.
///
/// ```
/// use spiderlab::verify::ks_two_sample;
///
/// let a = [0.1, 0.4, 0.2, 0.9];
/// assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
/// ```
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(KsResult::new(d, KS_CRITICAL_1PCT * ((n + m) / (n * m)).sqrt()))
}

/// One-sample KS against a continuous CDF; critical value `1.628 / sqrt(n)`.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    let s = sorted(sample)?;
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in s.iter().enumerate() {
        let f = cdf(v);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult::new(d, KS_CRITICAL_1PCT / n.sqrt()))
}

/// Outcome of a chi-square goodness-of-fit test at the 1% level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub critical: f64,
    pub p_value: f64,
    pub exceeded: bool,
}

/// Pearson chi-square of `observed` counts against `probs`.
///
/// Categories with zero probability do not contribute degrees of freedom;
/// any count in one makes the statistic infinite.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != probs.len() {
        return Err(Error::Domain(format!(
            "{} counts for {} categories",
            observed.len(),
            probs.len()
        )));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::EmptySample);
    }
    let mut stat = 0.0;
    let mut live = 0usize;
    for (&o, &p) in observed.iter().zip(probs) {
        if p > 0.0 {
            let e = p * total as f64;
            stat += (o as f64 - e).powi(2) / e;
            live += 1;
        } else if o > 0 {
            stat = f64::INFINITY;
        }
    }
    let dof = live.saturating_sub(1);
    if dof == 0 {
        let ok = stat == 0.0 || stat.is_finite();
        return Ok(ChiSquareResult {
            statistic: stat,
            dof,
            critical: 0.0,
            p_value: if ok { 1.0 } else { 0.0 },
            exceeded: !ok,
        });
    }
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    let critical = dist.inverse_cdf(0.99);
    let p_value = if stat.is_finite() { dist.sf(stat) } else { 0.0 };
    Ok(ChiSquareResult {
        statistic: stat,
        dof,
        critical,
        p_value,
        exceeded: stat > critical,
    })
}

/// Sample distance correlation of two equally long samples.
///
/// `O(n^2)` time, `O(n)` memory: the doubly centred distance matrices are
/// never stored, only their row means.
pub fn distance_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Domain("distance correlation needs paired samples".into()));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::EmptySample);
    }
    let row_means = |x: &[f64]| -> (Vec<f64>, f64) {
        let rows: Vec<f64> = (0..n)
            .map(|i| {
                let d: Vec<f64> = x.iter().map(|v| (x[i] - v).abs()).collect();
                pairwise_sum(&d) / n as f64
            })
            .collect();
        let grand = pairwise_sum(&rows) / n as f64;
        (rows, grand)
    };
    let (ra, ga) = row_means(a);
    let (rb, gb) = row_means(b);
    let mut sums = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut buf = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        for j in 0..n {
            let u = (a[i] - a[j]).abs() - ra[i] - ra[j] + ga;
            let v = (b[i] - b[j]).abs() - rb[i] - rb[j] + gb;
            buf[0][j] = u * v;
            buf[1][j] = u * u;
            buf[2][j] = v * v;
        }
        for k in 0..3 {
            sums[k].push(pairwise_sum(&buf[k]));
        }
    }
    let (vab, vaa, vbb) = (pairwise_sum(&sums[0]), pairwise_sum(&sums[1]), pairwise_sum(&sums[2]));
    if vaa <= 0.0 || vbb <= 0.0 {
        return Ok(0.0);
    }
    Ok((vab.max(0.0) / (vaa * vbb).sqrt()).sqrt())
}

/// `(Σ w)^2 / Σ w^2`.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let sq: Vec<f64> = weights.iter().map(|w| w * w).collect();
    let s2 = pairwise_sum(&sq);
    if s2 == 0.0 {
        return 0.0;
    }
    pairwise_sum(weights).powi(2) / s2
}

/// Multinomial resampling: `size` indices drawn with probability
/// proportional to `weights`.
pub fn resample_indices<R: Rng + ?Sized>(weights: &[f64], size: usize, rng: &mut R) -> Result<Vec<usize>> {
    if weights.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::NonFiniteSample { index: i as u64, value: weights[i] });
    }
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cumulative.push(acc);
    }
    if acc <= 0.0 {
        return Err(Error::Domain("weights sum to zero".into()));
    }
    Ok((0..size)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            cumulative.partition_point(|&c| c <= u).min(weights.len() - 1)
        })
        .collect())
}

/// Resample `values` by `weights` down to `min(n, ESS)` draws.
pub fn resample_by_weight<R: Rng + ?Sized>(values: &[f64], weights: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if values.len() != weights.len() {
        return Err(Error::Domain("values and weights differ in length".into()));
    }
    let size = (effective_sample_size(weights).floor() as usize).clamp(1, values.len().max(1));
    Ok(resample_indices(weights, size, rng)?.into_iter().map(|i| values[i]).collect())
}

/// Least-squares line `y = intercept + slope x`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Domain("least squares needs at least two paired points".into()));
    }
    let n = xs.len() as f64;
    let mx = pairwise_sum(xs) / n;
    let my = pairwise_sum(ys) / n;
    let sxy: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let sxx: Vec<f64> = xs.iter().map(|x| (x - mx) * (x - mx)).collect();
    let slope = pairwise_sum(&sxy) / pairwise_sum(&sxx);
    Ok((my - slope * mx, slope))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn uniforms(seed: u64, n: usize, shift: f64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, 0).rng();
        (0..n).map(|_| rng.random::<f64>() + shift).collect()
    }

    #[test]
    fn ks_identical_is_zero() {
        let a = uniforms(1, 100, 0.0);
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
    }

    #[test]
    fn ks_shifted_uniforms_near_half() {
        let r = ks_two_sample(&uniforms(1, 10_000, 0.0), &uniforms(2, 10_000, 0.5)).unwrap();
        assert!((r.statistic - 0.5).abs() < 0.03, "{}", r.statistic);
        assert!(r.exceeded);
    }

    #[test]
    fn ks_same_law_is_accepted() {
        let r = ks_two_sample(&uniforms(1, 10_000, 0.0), &uniforms(2, 10_000, 0.0)).unwrap();
        assert!(!r.exceeded);
        assert!((r.critical - 1.628 * (2.0f64 / 1e4).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ks_one_sample_uniform() {
        let r = ks_one_sample(&uniforms(3, 5000, 0.0), |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(!r.exceeded);
        let r = ks_one_sample(&uniforms(3, 5000, 0.2), |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.exceeded);
    }

    #[test]
    fn ks_empty_is_an_error() {
        assert!(matches!(ks_two_sample(&[], &[1.0]), Err(Error::EmptySample)));
    }

    #[test]
    fn chi_square_known_value() {
        // (55 - 50)^2/50 + (45 - 50)^2/50 = 1
        let r = chi_square_gof(&[55, 45], &[0.5, 0.5]).unwrap();
        assert!((r.statistic - 1.0).abs() < 1e-12);
        assert_eq!(r.dof, 1);
        assert!((r.critical - 6.634896601021214).abs() < 1e-9);
        assert!(!r.exceeded);
        let r = chi_square_gof(&[10, 1], &[1.0, 0.0]).unwrap();
        assert!(r.exceeded);
        let r = chi_square_gof(&[10, 0], &[1.0, 0.0]).unwrap();
        assert!(!r.exceeded);
    }

    #[test]
    fn distance_correlation_extremes() {
        let a = uniforms(4, 300, 0.0);
        let b = uniforms(5, 300, 0.0);
        assert!(distance_correlation(&a, &b).unwrap() < 0.15);
        let sq: Vec<f64> = a.iter().map(|x| x * x).collect();
        assert!(distance_correlation(&a, &sq).unwrap() > 0.9);
        assert!((distance_correlation(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ess_of_equal_weights_is_n() {
        assert!((effective_sample_size(&[2.0; 50]) - 50.0).abs() < 1e-12);
        assert!((effective_sample_size(&[1.0, 0.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resampling_follows_weights() {
        let mut rng = RngStream::new(6, 0).rng();
        let idx = resample_indices(&[0.0, 3.0, 1.0], 40_000, &mut rng).unwrap();
        let ones = idx.iter().filter(|&&i| i == 1).count() as f64 / 40_000.0;
        assert!(!idx.contains(&0));
        assert!((ones - 0.75).abs() < 0.01);
    }

    #[test]
    fn least_squares_recovers_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (a, b) = least_squares(&xs, &ys).unwrap();
        assert!((a - 1.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
    }
}
