//! Runs the twelve acceptance criteria and prints one line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are reported but not asserted. Runs without the
//! libtest harness so the lines always reach the test log.

use rigid_core::verify::{run_criterion, KNOWN_UNATTAINABLE};

fn main() {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut unexpected = Vec::new();
    for id in 1..=12u8 {
        let r = run_criterion(id).expect("criterion id");
        println!("{}", r.line());
        for note in &r.notes {
            println!("    {}", note);
        }
        if !r.pass && !KNOWN_UNATTAINABLE.contains(&id) {
            unexpected.push(r.line());
        }
        if r.pass && KNOWN_UNATTAINABLE.contains(&id) {
            println!("    criterion {} is listed as unattainable but passed", id);
        }
    }
    assert!(unexpected.is_empty(), "failing criteria:\n{}", unexpected.join("\n"));
    println!("acceptance: {} criteria asserted, known unattainable {:?}", 12 - KNOWN_UNATTAINABLE.len(), KNOWN_UNATTAINABLE);
}
