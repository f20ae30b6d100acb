//! Runner for the acceptance criteria in `tests/acceptance.rs`.
//!
//! Lives in its own package so a red criterion does not stop `cargo test --workspace`
//! before the other crates' tests have run.

/// Pass flag and a one-line summary.
pub type Outcome = (bool, String);

/// Prints a header, detail lines (from the criterion itself) and one PASS/FAIL line per
/// criterion, then a tally. Returns the number of failures.
pub fn run_criteria(criteria: &[(&str, fn() -> Outcome)]) -> usize {
    let mut failed = 0;
    for (label, f) in criteria {
        println!("criterion {label}");
        let (pass, summary) = f();
        println!("{} criterion {label}: {summary}", if pass { "PASS" } else { "FAIL" });
        failed += (!pass) as usize;
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    failed
}
