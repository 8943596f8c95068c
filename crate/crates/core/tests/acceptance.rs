//! Runs every verification criterion and prints one line per criterion.

use std::io::Write;

use ffbt_core::verify::{run_suite, VerifyOptions};

#[test]
fn acceptance() {
    let outcomes = run_suite(&VerifyOptions::default(), &[]);
    assert_eq!(outcomes.len(), 12);
    // written to the raw handle so the lines survive output capture
    let mut err = std::io::stderr().lock();
    for o in &outcomes {
        writeln!(err, "{o}").unwrap();
    }
    drop(err);
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| o.to_string())
        .collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
