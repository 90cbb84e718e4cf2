//! Laws of simulated spider paths against independent closed forms.

use spiderlab::verify::{chi_square_gof, ks_one_sample, mc_expectation, par_samples, McEstimate};
use spiderlab::{excursions, inverse_local_time, path_stats, simulate_spider, BranchSpace, RngStream};

fn uneven() -> BranchSpace {
    BranchSpace::new([("a", 0.2), ("b", 0.3), ("c", 0.5)]).unwrap()
}

fn half_normal_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        libm::erf(x / std::f64::consts::SQRT_2)
    }
}

#[test]
fn time_one_marginals() {
    let space = uneven();
    let n = 100_000;
    let points = par_samples(n, 11, |s| path_stats(&simulate_spider(&space, 1.0, 1e-3, s)?, 1.0)).unwrap();

    let x2: Vec<f64> = points.iter().map(|p| p.x * p.x).collect();
    let m = McEstimate::from_samples(&x2).unwrap();
    assert!(m.within(1.0, 4.0), "E[X_1^2] = {} +/- {}", m.mean, m.std_error);

    // X_1 = |W_1| in law: half-normal
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ks = ks_one_sample(&xs, half_normal_cdf).unwrap();
    assert!(!ks.exceeded, "KS {} vs {}", ks.statistic, ks.critical);

    // L_1 = sup W on [0, 1]: also half-normal
    let ls: Vec<f64> = points.iter().map(|p| p.local_time).collect();
    let ks = ks_one_sample(&ls, half_normal_cdf).unwrap();
    assert!(!ks.exceeded, "KS {} vs {}", ks.statistic, ks.critical);

    let mut counts = [0u64; 3];
    for p in &points {
        if let Some(b) = p.branch {
            counts[b.index()] += 1;
        }
    }
    let chi = chi_square_gof(&counts, space.weights()).unwrap();
    assert!(!chi.exceeded, "branch counts {counts:?}, chi2 {}", chi.statistic);
    // P(N_1 = m, L_1 > 0) = mu_m P(L_1 > 0), with P(L_1 > 0) = 1
    for (c, w) in counts.iter().zip(space.weights()) {
        let p = *c as f64 / n as f64;
        let se = (w * (1.0 - w) / n as f64).sqrt();
        assert!((p - w).abs() <= 4.0 * se, "{p} vs {w}");
    }
}

#[test]
fn exponential_of_local_time_matches_closed_form() {
    // L_1 is half-normal, so E[e^{-L_1}] = e^{1/2} erfc(1/sqrt 2)
    let space = uneven();
    let oracle = 0.5f64.exp() * libm::erfc(std::f64::consts::FRAC_1_SQRT_2);
    let est = mc_expectation(20_000, 12, |s| {
        Ok((-path_stats(&simulate_spider(&space, 1.0, 1e-3, s)?, 1.0)?.local_time).exp())
    })
    .unwrap();
    assert!(est.within(oracle, 4.0), "{} +/- {} vs {oracle}", est.mean, est.std_error);
}

#[test]
fn occupation_estimate_tracks_local_time() {
    // L_t = lim (2 eps)^{-1} |{s <= t : X_s < eps}|, checked at eps = 2 sqrt(step)
    let space = uneven();
    let step: f64 = 1e-4;
    let eps = 2.0 * step.sqrt();
    let pairs = par_samples(1_000, 13, |s| {
        let p = simulate_spider(&space, 1.0, step, s)?;
        let near = p.x().iter().skip(1).filter(|&&x| x < eps).count() as f64;
        Ok((near * step / (2.0 * eps), *p.local_time().last().unwrap()))
    })
    .unwrap();
    let diff: Vec<f64> = pairs.iter().map(|(o, l)| o - l).collect();
    let d = McEstimate::from_samples(&diff).unwrap();
    let mean_l = pairs.iter().map(|p| p.1).sum::<f64>() / pairs.len() as f64;
    assert!(d.mean.abs() < 0.05 * mean_l, "mean gap {} against mean L {mean_l}", d.mean);
    // pathwise agreement is only up to O(sqrt eps) noise; ask for strong correlation
    let n = pairs.len() as f64;
    let (mo, ml) = (pairs.iter().map(|p| p.0).sum::<f64>() / n, mean_l);
    let cov: f64 = pairs.iter().map(|(o, l)| (o - mo) * (l - ml)).sum();
    let vo: f64 = pairs.iter().map(|(o, _)| (o - mo).powi(2)).sum();
    let vl: f64 = pairs.iter().map(|(_, l)| (l - ml).powi(2)).sum();
    let corr = cov / (vo * vl).sqrt();
    assert!(corr > 0.95, "correlation {corr}");
}

#[test]
fn excursion_labels_are_iid_mu() {
    let space = uneven();
    let labels = par_samples(2_000, 14, |s| {
        let p = simulate_spider(&space, 1.0, 1e-3, s)?;
        Ok(excursions(&p).iter().map(|e| e.label.index()).collect::<Vec<_>>())
    })
    .unwrap();
    let mut single = [0u64; 3];
    let mut pairs = [0u64; 9];
    for seq in &labels {
        for &k in seq {
            single[k] += 1;
        }
        for w in seq.windows(2) {
            pairs[3 * w[0] + w[1]] += 1;
        }
    }
    let chi = chi_square_gof(&single, space.weights()).unwrap();
    assert!(!chi.exceeded, "{single:?}");
    let product: Vec<f64> = space
        .weights()
        .iter()
        .flat_map(|a| space.weights().iter().map(move |b| a * b))
        .collect();
    let chi = chi_square_gof(&pairs, &product).unwrap();
    assert!(!chi.exceeded, "consecutive labels {pairs:?}");
}

#[test]
fn inverse_local_time_grows_with_level() {
    let space = uneven();
    let levels = [0.25, 0.5, 1.0];
    let taus = par_samples(1_000, 15, |s| {
        let p = simulate_spider(&space, 20.0, 1e-2, s)?;
        Ok(levels.map(|l| inverse_local_time(&p, l).map_or(p.horizon(), |i| p.time(i))))
    })
    .unwrap();
    let means: Vec<f64> = (0..3).map(|j| taus.iter().map(|t| t[j]).sum::<f64>() / taus.len() as f64).collect();
    assert!(means[0] < means[1] && means[1] < means[2], "{means:?}");
    // pathwise too, since the local time is nondecreasing
    assert!(taus.iter().all(|t| t[0] <= t[1] && t[1] <= t[2]));
}

#[test]
fn paths_replay_from_their_stream() {
    let space = uneven();
    let a = simulate_spider(&space, 0.5, 1e-3, RngStream::new(3, 17)).unwrap();
    let b = simulate_spider(&space, 0.5, 1e-3, a.stream()).unwrap();
    assert_eq!(a, b);
}
