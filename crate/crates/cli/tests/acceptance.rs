//! Acceptance criteria 1-13, one PASS/FAIL line each with the measured values below it.
//! Exits nonzero if any criterion fails.

use minklab_cli::golden::Golden;
use minklab_cli::suite::{run_check, Context, CRITERIA};

fn main() {
    // libtest flags such as --nocapture or a name filter are accepted and ignored
    let ctx = Context::new(Golden::builtin());
    let mut failed = Vec::new();
    for def in CRITERIA.iter() {
        let check = run_check(def, &ctx);
        println!("{}", check.summary());
        for line in check.details() {
            println!("{line}");
        }
        if !check.passed() {
            failed.push(check.id);
        }
    }
    println!();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
    } else {
        println!("acceptance: {} of {} criteria failed: {}", failed.len(), CRITERIA.len(), failed.join(", "));
        std::process::exit(1);
    }
}
