//! Runs every acceptance criterion at its stated scale and prints one
//! PASS/FAIL line per criterion. Takes several minutes in release-like
//! test profile; set `ACCEPT_ONLY=5,10` to run a subset.

use idla_core::harness::acceptance::Suite;

#[test]
fn acceptance_criteria() {
    let only: Vec<u32> = std::env::var("ACCEPT_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect())
        .unwrap_or_default();
    let results = Suite::default().run(&only, |c| println!("{}", c.line()));
    println!();
    for c in &results {
        for v in &c.verdicts {
            println!("  [{:>2}] {}", c.id, v.line());
        }
    }
    let failed: Vec<u32> = results.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
