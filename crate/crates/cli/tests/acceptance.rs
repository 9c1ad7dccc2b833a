//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use pilotopt::verify::{run_criterion, Check, VerifyOptions, CRITERIA};

const BIN: &str = env!("CARGO_BIN_EXE_pilotopt");

fn pilotopt(args: &[&str]) -> std::process::Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("pilotopt runs")
}

fn determinism() -> Vec<Check> {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut checks = Vec::new();
    for n in 1..=9 {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("fig{n}-{run}.csv"));
            let status = pilotopt(&["fig", &n.to_string(), "--out", path.to_str().unwrap()]).status;
            assert!(status.success(), "fig {n} failed: {status}");
            outputs.push(std::fs::read(&path).expect("figure output"));
        }
        let differ = outputs[0] != outputs[1] || outputs[0].is_empty();
        checks.push(check(
            10,
            format!("fig {n} byte-identical rerun"),
            differ as u8 as f64,
            0.0,
        ));
    }
    let start = Instant::now();
    let out = pilotopt(&["verify", "--level", "summary"]);
    let elapsed = start.elapsed();
    let report = String::from_utf8_lossy(&out.stdout);
    let completed = matches!(out.status.code(), Some(0 | 2))
        && report.lines().filter(|l| l.contains("criterion")).count() == CRITERIA.len();
    checks.push(check(
        10,
        "verify completed",
        (!completed) as u8 as f64,
        0.0,
    ));
    checks.push(check(
        10,
        "verify runtime (s)",
        elapsed.as_secs_f64(),
        Duration::from_secs(300).as_secs_f64(),
    ));
    checks
}

fn check(criterion: u8, name: impl Into<String>, observed: f64, tolerance: f64) -> Check {
    Check {
        criterion,
        name: name.into(),
        tolerance,
        observed,
        pass: observed <= tolerance,
    }
}

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let mut failed = 0;
    for id in 1..=10u8 {
        let start = Instant::now();
        let (title, checks) = if id == 10 {
            ("end-to-end determinism", determinism())
        } else {
            let title = CRITERIA[id as usize - 1].1;
            match run_criterion(id, &opts) {
                Ok(c) => (title, c),
                Err(e) => (
                    title,
                    vec![check(id, format!("error: {e:#}"), f64::NAN, 0.0)],
                ),
            }
        };
        let pass = checks.iter().all(|c| c.pass);
        failed += usize::from(!pass);
        let worst = checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} = {:.3e} > {:.3e}", c.name, c.observed, c.tolerance))
            .collect::<Vec<_>>()
            .join("; ");
        println!(
            "criterion {id:>2} {}: {title} ({:.1}s){}",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            if pass {
                String::new()
            } else {
                format!(" [{worst}]")
            }
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
