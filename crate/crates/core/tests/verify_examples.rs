//! Martingale and penalization checks on concrete parameter sets.

use spiderlab::closed_forms::martingale_density;
use spiderlab::verify::criteria::{reference_params, two_branches};
use spiderlab::verify::{martingale_check_many, penalized_vs_limit};
use spiderlab::{BranchSpace, PenaltyParams, PathPoint};

#[test]
fn martingale_marginals_hold_at_several_times() {
    let space = two_branches();
    let params = reference_params(&space);
    let mut at_half = Vec::new();
    let mut at_one = Vec::new();
    for (i, s) in [0.25, 0.5, 1.0].into_iter().enumerate() {
        let est = martingale_check_many(&params, &space, s, 20_000, 1e-3, 30 + i as u64).unwrap();
        for (p, e) in params.iter().zip(&est) {
            assert!(e.within(1.0, 4.0), "s={s} {p:?}: {} +/- {}", e.mean, e.std_error);
        }
        if s == 0.5 {
            at_half = est;
        } else if s == 1.0 {
            at_one = est;
        }
    }
    for (a, b) in at_half.iter().zip(&at_one) {
        let joint = a.std_error.hypot(b.std_error);
        assert!((a.mean - b.mean).abs() <= 4.0 * joint.max(1e-300));
    }
}

fn distance(pt: PathPoint) -> f64 {
    pt.x
}

#[test]
fn negative_penalty_converges_to_the_limit() {
    let space = BranchSpace::uniform(2).unwrap();
    let p = PenaltyParams::new(&space, vec![-1.0, -1.0], -1.0).unwrap();
    let rows = penalized_vs_limit(&p, &space, 0.5, &[1.0, 2.0, 4.0, 8.0], distance, 20_000, 1e-2, 40).unwrap();
    let gaps: Vec<f64> = rows.iter().map(|r| (r.penalized.mean - r.limit.mean).abs()).collect();
    let last = rows.last().unwrap();
    let joint = last.penalized.std_error.hypot(last.limit.std_error);
    assert!(gaps[3] <= 4.0 * joint, "gaps {gaps:?}, joint stderr {joint}");
    assert!(gaps[0] > gaps[3], "gaps {gaps:?}");
    assert!(rows.iter().all(|r| !r.heavy_tail));
}

#[test]
fn positive_penalty_converges_or_flags_heavy_tails() {
    let space = BranchSpace::uniform(2).unwrap();
    let p = PenaltyParams::new(&space, vec![0.0, 0.0], 0.5).unwrap();
    let rows = penalized_vs_limit(&p, &space, 0.5, &[1.0, 2.0, 4.0], distance, 20_000, 1e-2, 41).unwrap();
    for r in &rows {
        if !r.heavy_tail {
            assert!(r.ess >= 100.0);
        }
    }
    let judged = rows.iter().rev().find(|r| !r.heavy_tail).expect("t = 1 keeps enough samples");
    let joint = judged.penalized.std_error.hypot(judged.limit.std_error);
    let gap = (judged.penalized.mean - judged.limit.mean).abs();
    assert!(gap <= 4.0 * joint + 0.05 * judged.limit.mean, "t={} gap {gap} joint {joint}", judged.t);
}

#[test]
fn density_is_one_at_time_zero() {
    let space = BranchSpace::uniform(2).unwrap();
    let p = PenaltyParams::new(&space, vec![0.5, -1.0], 0.3).unwrap();
    for k in space.branches() {
        assert_eq!(martingale_density(&p, &space, 0.0, k, 0.0, 0.0).unwrap(), 1.0);
    }
}
