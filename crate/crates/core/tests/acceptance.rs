//! The acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 7 asks for "irreducible iff l < q′" over F_{q′}, which is false
//! for some l >= q′ (for example ρ̄_{q′} over a prime field is the Frobenius
//! twist of the natural representation). Its failing checks are reported as
//! FAIL; the test asserts that those are exactly the irreducible l >= q′ cases
//! and that everything else in the criterion holds.

use tatereps::report::Status;
use tatereps::verify::{verify_all, CriterionReport, RunConfig};

fn line(c: &CriterionReport) -> String {
    let mark = if c.passed() { "PASS" } else { "FAIL" };
    let failing = c.checks.iter().filter(|r| r.status == Status::Fail).count();
    let detail = if failing > 0 { format!(" ({failing} of {} checks fail)", c.checks.len()) } else { String::new() };
    format!("criterion {:>2} {mark} {}{detail}", c.id, c.title)
}

fn brauer_nesbitt_failures_are_counterexamples(c: &CriterionReport) -> bool {
    c.checks.iter().filter(|r| r.status == Status::Fail).all(|r| {
        let l = r.params["l"].as_u64().unwrap();
        let qq = r.params["q_prime"].as_u64().unwrap();
        r.check == "meataxe" && l >= qq && r.params["verdict"] == "irreducible"
    }) && c.checks.iter().filter(|r| r.params["l"].as_u64() < r.params["q_prime"].as_u64()).all(|r| r.status == Status::Pass)
}

#[test]
fn acceptance_criteria() {
    let cfg = RunConfig::default();
    let first = verify_all(&cfg).expect("suite runs");
    let second = verify_all(&cfg).expect("suite runs");
    let identical = first.to_json() == second.to_json();

    let mut unexpected = vec![];
    for c in &first.criteria {
        let mut l = line(c);
        if c.id == 18 {
            let ok = c.passed() && identical;
            l = format!("criterion 18 {} {} (full suite run twice: {})", if ok { "PASS" } else { "FAIL" }, c.title, if identical { "identical JSON" } else { "JSON differs" });
            if !ok {
                unexpected.push(18);
            }
        } else if c.id == 7 {
            if !c.passed() {
                l.push_str(" [the statement is false for these l >= q′; see the report notes]");
            }
            if !brauer_nesbitt_failures_are_counterexamples(c) {
                unexpected.push(7);
            }
        } else if !c.passed() {
            unexpected.push(c.id);
        }
        println!("{l}");
    }
    assert_eq!(first.criteria.len(), 18);
    assert!(unexpected.is_empty(), "unexpected failures in criteria {unexpected:?}\n{}", first.to_text());
}
