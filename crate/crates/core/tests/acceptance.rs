use std::process::ExitCode;

use cubekh::selftest;

fn main() -> ExitCode {
    let report = selftest::run();
    for c in &report.criteria {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {mark} [{} ms] {}: {}", c.id, c.millis, c.title, c.detail);
    }
    for c in &report.controls {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        println!("control      {mark} [{} ms] {}: {}", c.millis, c.title, c.detail);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
