//! Acceptance suite: every desk-scale criterion at its stated tolerance.
//!
//! Runs as a plain binary (no libtest harness) so each criterion prints
//! exactly one PASS/FAIL line; the process exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use spiderlab::verify::criteria::{self, CriterionOutcome, McSettings};
use spiderlab::Result;

const SEED: u64 = 20_240_601;
const STEP: f64 = 1e-3;

type Check = Box<dyn Fn() -> Result<CriterionOutcome>>;

fn main() -> ExitCode {
    let runs: Vec<(&str, Check)> = vec![
        ("1", Box::new(|| criteria::martingale_normalization(McSettings::new(100_000, STEP, SEED)))),
        ("2", Box::new(|| criteria::majorant_inequalities(200, SEED))),
        ("3", Box::new(criteria::z_equivalence)),
        ("4", Box::new(|| criteria::local_time_joint_law(McSettings::new(10_000, STEP, SEED)))),
        ("5", Box::new(|| criteria::case1_bang_bang(McSettings::new(10_000, STEP, SEED)))),
        ("6", Box::new(|| criteria::case2_local_time(McSettings::new(10_000, STEP, SEED)))),
        ("7", Box::new(|| criteria::case4_splice(McSettings::new(10_000, STEP, SEED), 5.0))),
        ("8", Box::new(|| criteria::theta_identity(100, SEED))),
        ("9", Box::new(criteria::product_form_characterization)),
        ("10", Box::new(criteria::asymptotic_consistency)),
        ("11", Box::new(|| criteria::reproducibility(SEED, 4))),
    ];
    let verbose = std::env::var_os("ACCEPTANCE_VERBOSE").is_some();
    let mut failures = 0;
    for (id, run) in runs {
        let start = Instant::now();
        match run() {
            Ok(outcome) => {
                println!("{}  ({:.1}s)", outcome.summary(), start.elapsed().as_secs_f64());
                if verbose || !outcome.passed() {
                    for r in &outcome.records {
                        println!("    {r}");
                    }
                }
                if !outcome.passed() {
                    failures += 1;
                }
            }
            Err(e) => {
                println!("FAIL criterion {id:>2}: error: {e}");
                failures += 1;
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
