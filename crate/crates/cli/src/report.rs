//! Runs every reproduction check against a device configuration.

use serde::Serialize;
use twpa::checks::{run_all, CheckOutcome};
use twpa::io::DeviceConfig;

use crate::bundle::Bundle;
use crate::error::CliResult;

/// Check outcome without its runtime, so bundles stay byte-identical.
#[derive(Serialize)]
struct Recorded<'a> {
    id: u32,
    name: &'a str,
    passed: bool,
    measured: &'a [(String, f64)],
    tolerance: &'a str,
    detail: &'a str,
}

impl<'a> From<&'a CheckOutcome> for Recorded<'a> {
    fn from(o: &'a CheckOutcome) -> Self {
        Self {
            id: o.id,
            name: &o.name,
            passed: o.passed,
            measured: &o.measured,
            tolerance: &o.tolerance,
            detail: &o.detail,
        }
    }
}

#[derive(Serialize)]
struct ReportResults<'a> {
    all_passed: bool,
    checks: Vec<Recorded<'a>>,
}

pub fn run(config: &DeviceConfig, seed: u64) -> CliResult<(Bundle, Option<String>)> {
    let outcomes = run_all(config, seed);
    // Runtimes go to stderr only.
    for o in &outcomes {
        eprintln!("[{:>2}] {:.2} s", o.id, o.runtime_s);
    }
    let mut b = Bundle::new("paper-report", seed);
    b.device(config);
    for o in &outcomes {
        b.line(o.line());
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    b.line(format!("{} of {} checks passed", outcomes.len() - failed.len(), outcomes.len()));

    let (ids, flags): (Vec<f64>, Vec<f64>) =
        outcomes.iter().map(|o| (f64::from(o.id), f64::from(u8::from(o.passed)))).unzip();
    b.csv("checks.csv", &["check", "passed"], &[&ids, &flags])?;
    b.results(&ReportResults { all_passed: failed.is_empty(), checks: outcomes.iter().map(Recorded::from).collect() });
    let failure = (!failed.is_empty()).then(|| format!("checks failed: {failed:?}"));
    Ok((b, failure))
}
