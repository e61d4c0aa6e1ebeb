//! End-to-end acceptance run: every cross-evaluator check at its stated
//! tolerance, one PASS/FAIL line per check (visible with --nocapture or on
//! failure).

use discordq::verify::{run_all, VerifyConfig};

#[test]
fn acceptance() {
    let reports = run_all(&VerifyConfig::default());
    assert_eq!(reports.len(), 8);
    let mut all_passed = true;
    for report in &reports {
        let tag = if report.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {} — {}", report.id, report.name, report.details);
        all_passed &= report.passed;
    }
    assert!(all_passed, "at least one acceptance check failed; see lines above");
}
