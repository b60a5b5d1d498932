//! Prints one PASS/FAIL line per acceptance criterion; exits non-zero if
//! any fails.

use std::process::ExitCode;
use std::time::Instant;

use repeater_validation::CRITERIA;

fn main() -> ExitCode {
    let mut failed = 0;
    for (i, (name, check)) in CRITERIA.into_iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        failed += !o.passed as usize;
        println!(
            "criterion {:>2} {verdict} {name} [{:.1}s]: {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
