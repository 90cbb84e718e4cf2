//! Limit-process samplers against their known marginals.

use std::f64::consts::PI;

use spiderlab::limit_laws::{sample_bang_bang_abs, sample_bessel3, sample_case2, sample_drifted_reflected_with_l_inf};
use spiderlab::quadrature::{integrate, QuadOptions};
use spiderlab::verify::{chi_square_gof, ks_two_sample, par_samples, McEstimate};
use spiderlab::{path_stats, simulate_spider, BranchSpace, PenaltyParams};

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn bang_bang_settles_to_symmetric_exponential() {
    // stationary law of |bang-bang| is Exp(2 gamma), local time grows like gamma t
    let runs = par_samples(2_000, 21, |s| {
        let p = sample_bang_bang_abs(1.0, 20.0, 1e-3, s)?;
        Ok((p.last(), *p.local_time.last().unwrap()))
    })
    .unwrap();
    let x: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let l: Vec<f64> = runs.iter().map(|r| r.1).collect();
    assert!((mean(&x) / 0.5 - 1.0).abs() < 0.05, "mean {}", mean(&x));
    assert!((mean(&l) / 20.0 - 1.0).abs() < 0.10, "local time {}", mean(&l));
    assert!(x.iter().all(|&v| v >= 0.0));
}

#[test]
fn vanishing_drift_recovers_reflected_motion() {
    let space = BranchSpace::uniform(2).unwrap();
    let bb = par_samples(10_000, 22, |s| Ok(sample_bang_bang_abs(1e-8, 1.0, 1e-2, s)?.last())).unwrap();
    let sp = par_samples(10_000, 23, |s| Ok(path_stats(&simulate_spider(&space, 1.0, 1e-2, s)?, 1.0)?.x)).unwrap();
    let ks = ks_two_sample(&bb, &sp).unwrap();
    assert!(!ks.exceeded, "KS {} vs {}", ks.statistic, ks.critical);
}

#[test]
fn total_local_time_has_mean_one_over_drift() {
    let l = par_samples(10_000, 24, |s| Ok(sample_drifted_reflected_with_l_inf(2.0, 1e-3, s, 1e-6)?.1)).unwrap();
    assert!(l.iter().all(|&v| v >= 0.0));
    let m = McEstimate::from_samples(&l).unwrap();
    assert!(m.within(0.5, 4.0), "{} +/- {}", m.mean, m.std_error);
}

#[test]
fn unbounded_excursion_lands_on_the_argmax_set() {
    // alpha = (1, 0, 1): J = {a, c}; the last excursion is almost surely the
    // unbounded one by t = 10, with label law mu restricted to J
    let space = BranchSpace::new([("a", 0.2), ("b", 0.3), ("c", 0.5)]).unwrap();
    let p = PenaltyParams::new(&space, vec![1.0, 0.0, 1.0], 0.0).unwrap();
    let last = par_samples(4_000, 25, |s| {
        let w = sample_case2(&p, &space, 10.0, 1e-2, s)?;
        assert_eq!(w.weight, 1.0);
        Ok(*w.path.branch().last().unwrap())
    })
    .unwrap();
    let mut counts = [0u64; 3];
    for b in last.iter().flatten() {
        counts[b.index()] += 1;
    }
    assert!(counts[1] as f64 <= 0.01 * last.len() as f64, "{counts:?}");
    let chi = chi_square_gof(&[counts[0], counts[2]], &[0.2 / 0.7, 0.5 / 0.7]).unwrap();
    assert!(!chi.exceeded, "{counts:?}");
}

#[test]
fn bessel_moments() {
    let r = par_samples(100_000, 26, |s| Ok(sample_bessel3(1.0, 0.25, s)?.last())).unwrap();
    assert!(r.iter().all(|&v| v > 0.0));
    let sq: Vec<f64> = r.iter().map(|v| v * v).collect();
    let m = McEstimate::from_samples(&sq).unwrap();
    assert!(m.within(3.0, 4.0), "E[R^2] {} +/- {}", m.mean, m.std_error);

    // oracle: integrate r^{-1} against the Maxwell density on a long interval
    let maxwell = |r: f64| (2.0 / PI).sqrt() * r * r * (-r * r / 2.0).exp();
    let oracle = integrate(|r| maxwell(r) / r.max(f64::MIN_POSITIVE), &[0.0, 3.0, 40.0], QuadOptions::default())
        .unwrap()
        .value;
    let inv: Vec<f64> = r.iter().map(|v| 1.0 / v).collect();
    let m = McEstimate::from_samples(&inv).unwrap();
    assert!(m.within(oracle, 4.0), "E[1/R] {} +/- {} vs {oracle}", m.mean, m.std_error);
}
