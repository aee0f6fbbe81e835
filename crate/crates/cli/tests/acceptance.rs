//! Criteria 1–9, one PASS/FAIL line each. Runs without the libtest harness so the lines are
//! always printed; exits non-zero if any criterion fails.

use std::process::ExitCode;

use vacuumlab_cli::run_acceptance;

fn main() -> ExitCode {
    let root = tempfile::tempdir().expect("tempdir");
    let report = match run_acceptance(&root.path().join("accept"), |o| println!("{}", o.line())) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("acceptance suite aborted: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    let ids: Vec<u8> = report.outcomes.iter().map(|o| o.id).collect();
    assert_eq!(ids, (1..=9).collect::<Vec<_>>());
    assert!(root.path().join("accept/acceptance.csv").exists());
    let passed = report.outcomes.iter().filter(|o| o.verdict == vacuumlab::Verdict::Pass).count();
    println!("acceptance: {passed}/9 criteria passed");
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
