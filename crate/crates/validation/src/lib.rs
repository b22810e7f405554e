//! Groups validation-suite checks into the numbered acceptance criteria.

use std::time::Instant;

use nfg_cli::suite::{self, run_suite, Check, SuiteReport};

pub const C1_SECONDS: f64 = 120.0;
pub const C2_SECONDS: f64 = 180.0;
pub const C6_SECONDS: f64 = 600.0;
pub const C8_SECONDS: f64 = 300.0;
pub const C9_SECONDS: f64 = 900.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub label: String,
    pub passed: bool,
    pub summary: String,
}

impl std::fmt::Display for Line {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.label, self.summary)
    }
}

fn find<'a>(report: &'a SuiteReport, name: &str) -> &'a Check {
    report
        .checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("suite has no check {name}"))
}

/// Passes when every check passes and their summed time is under `runtime_limit`.
pub fn criterion(label: &str, checks: &[&Check], runtime_limit: Option<f64>) -> Line {
    let seconds: f64 = checks.iter().map(|c| c.seconds).sum();
    let in_time = runtime_limit.is_none_or(|limit| seconds < limit);
    let parts: Vec<String> = checks
        .iter()
        .map(|c| {
            let state = if c.passed { "ok" } else { "failed" };
            format!("{} {state} value={:.3e} limit={:.3e}", c.name, c.value, c.limit)
        })
        .collect();
    let time = match runtime_limit {
        Some(limit) => format!("{seconds:.1}s of {limit:.0}s"),
        None => format!("{seconds:.1}s"),
    };
    Line {
        label: label.to_owned(),
        passed: in_time && checks.iter().all(|c| c.passed),
        summary: format!("{}; {time}", parts.join("; ")),
    }
}

/// Runs everything and returns the criterion lines in order. `log` sees each
/// check of the first suite run as it finishes.
pub fn evaluate(seed: u64, mut log: impl FnMut(&Check)) -> Vec<Line> {
    let literal = suite::duality_literal(seed);
    log(&literal);

    let start = Instant::now();
    let first = run_suite(seed, &mut log);
    let first_seconds = start.elapsed().as_secs_f64();

    let mut lines = vec![
        criterion("C1", &[&literal], Some(C1_SECONDS)),
        criterion("C1 (scale q^|E|)", &[find(&first, "duality")], Some(C1_SECONDS)),
        criterion("C2", &[find(&first, "mapping")], Some(C2_SECONDS)),
        criterion("C3", &[find(&first, "fixed_points")], None),
        criterion("C4", &[find(&first, "bounds_and_uncertainty")], None),
        criterion("C5", &[find(&first, "closed_forms")], None),
        criterion("C6", &[find(&first, "swp_histogram"), find(&first, "swp_via_dual")], Some(C6_SECONDS)),
        criterion(
            "C7",
            &[
                find(&first, "bp_dual_beats_primal_halfnormal"),
                find(&first, "bp_dual_beats_primal_complete"),
                find(&first, "bp_primal_dual_agree"),
            ],
            None,
        ),
        criterion(
            "C8",
            &[find(&first, "gaussian_variances"), find(&first, "woodbury"), find(&first, "gaussian_dual_map")],
            Some(C8_SECONDS),
        ),
    ];

    let start = Instant::now();
    let second = run_suite(seed, |_| {});
    let second_seconds = start.elapsed().as_secs_f64();
    let same = first.fingerprint() == second.fingerprint();
    let slowest = first_seconds.max(second_seconds);
    lines.push(Line {
        label: "C9".into(),
        passed: same && first.failures() == 0 && second.failures() == 0 && slowest < C9_SECONDS,
        summary: format!(
            "{} checks, failures {} and {}, identical reports: {same}; slowest run {slowest:.1}s of {C9_SECONDS:.0}s",
            first.checks.len(),
            first.failures(),
            second.failures()
        ),
    });
    lines
}
