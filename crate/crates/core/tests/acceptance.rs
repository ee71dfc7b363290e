//! Acceptance gate: runs every numbered criterion, prints one pass/fail
//! line each, and exits nonzero if any fails.

use hamoracle_core::acceptance::run_all;

fn main() {
    let results = run_all();
    let mut failed = 0usize;
    for r in &results {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:2} - {} ({:.2} s)", r.id, r.name, r.seconds);
        if !r.pass {
            failed += 1;
            for c in r.checks.iter().filter(|c| !c.pass) {
                println!("     failed check: {} ({})", c.name, c.detail());
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", results.len());
}
