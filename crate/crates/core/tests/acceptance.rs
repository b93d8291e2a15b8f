//! Acceptance suite: every criterion at its fixed tolerance, one PASS/FAIL
//! line each. Runs without the libtest harness so the lines always print;
//! the process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use twpa::checks::{run_all, DEFAULT_SEED};
use twpa::io::DeviceConfig;

fn main() -> ExitCode {
    // `cargo test -- --list` and filters pass arguments; the suite is a
    // single unit, so only the listing request needs special handling.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let config = DeviceConfig::default();
    let outcomes = run_all(&config, DEFAULT_SEED);
    for o in &outcomes {
        println!("{}  [{:.2} s]", o.line(), o.runtime_s);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        outcomes.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
