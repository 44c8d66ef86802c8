//! Acceptance suite: every criterion at its stated tolerance and time budget.
//!
//! Lines go straight to the stderr handle so they show even when the harness
//! captures test output.

use std::io::Write;

use subfrac_core::validation::{self, CriterionReport, SuiteConfig, CRITERIA};

fn emit(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = err.write_all(line.as_bytes());
    let _ = err.write_all(b"\n");
}

fn report(id: usize, cfg: &SuiteConfig) -> CriterionReport {
    match validation::run_criterion(id, cfg) {
        Ok(r) => r,
        Err(e) => panic!("criterion {id} could not be set up: {e}"),
    }
}

#[test]
fn acceptance_criteria() {
    let cfg = SuiteConfig::default();
    let mut failed = Vec::new();
    for id in 1..=CRITERIA {
        let r = report(id, &cfg);
        emit(&r.to_string());
        if !r.passed() {
            for case in &r.cases {
                emit(&format!("    {case}"));
            }
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
