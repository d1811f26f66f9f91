//! End-to-end acceptance: run the ten verification criteria across
//! m ∈ {2, 3, 4} and print one verdict line per criterion.

use wzeta::verify::{run_suite, VerifyOptions};

#[test]
fn acceptance_criteria() {
    let results = run_suite(&VerifyOptions::default());
    let mut failures = Vec::new();
    for result in &results {
        println!("{result}");
        if !result.passed {
            failures.push(result.index);
        }
    }
    assert!(
        failures.is_empty(),
        "acceptance criteria failed: {failures:?}"
    );
}
