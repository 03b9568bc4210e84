//! Runs the ten acceptance criteria and prints one line per criterion.

use qpagerank::acceptance;

#[test]
fn acceptance_criteria() {
    let results = acceptance::run_all();
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert_eq!(results.len(), 10);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
