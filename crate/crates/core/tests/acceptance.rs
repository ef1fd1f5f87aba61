//! Exit criteria: every registered claim, run once, with the wall-time limit
//! of each criterion. Prints one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use gapn_core::reproduce::{reproduce, Report, CLAIMS};

/// (criterion, claims it covers, time limit in seconds)
const CRITERIA: &[(&str, &[&str], u64)] = &[
    ("1 gold monomials", &["gold-monomials"], 5),
    ("2 inverse monomials", &["inverse-monomials"], 4),
    ("3 two-digit monomial sweep", &["monomial-conditions-sweep"], 120),
    ("4 odd-degree binomial sweep", &["odd-binomial-sweep"], 120),
    ("5 even-degree binomial sweep", &["even-binomial-sweep"], 300),
    ("6 trinomials at p = 7", &["p7-trinomials"], 30),
    ("7 binomial degree gaps over F_49", &["p7-binomial-even-gaps"], 120),
    ("8 no degree-4 GAPN function over F_9", &["p3-no-even-degree"], 1),
    ("9 binomial fixtures", &["p7-non-theorem-binomial", "p11-mixed-binomial"], 10),
    ("10 power identity", &["power-identity"], 10),
    ("11 derivative condition equivalence", &["derivative-condition-equivalence"], 60),
    ("12 no degree-15 monomial over F_121", &["p11-monomial-deg15-none"], 30),
    ("13 conjugate premise over F_27", &["conjugate-premise-f27"], 10),
];

fn main() -> ExitCode {
    let start = Instant::now();
    let mut reports: Vec<Report> = Vec::new();
    for (id, _) in CLAIMS {
        match reproduce(id, 0) {
            Ok(r) => reports.push(r),
            Err(e) => {
                println!("claim {id}: error {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    let total = start.elapsed();

    let mut all_ok = true;
    for (name, claims, limit_s) in CRITERIA {
        let rs: Vec<&Report> = claims
            .iter()
            .map(|c| reports.iter().find(|r| r.claim == *c).expect("claim registered"))
            .collect();
        let ms: u128 = rs.iter().map(|r| r.elapsed_ms).sum();
        let passed = rs.iter().all(|r| r.passed) && ms <= *limit_s as u128 * 1000;
        all_ok &= passed;
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {name} ({ms} ms, limit {limit_s} s)");
        for r in rs {
            println!("     {}: counts {:?}", r.claim, r.counts);
            for n in r.notes.iter().filter(|n| n.starts_with("FAILED")) {
                println!("     {n}");
            }
        }
    }

    let every = reports.iter().all(|r| r.passed);
    let ok14 = every && total.as_secs() < 15 * 60;
    all_ok &= ok14;
    println!(
        "{} criterion 14 reproduce all ({} claims, {} ms, limit 900 s)",
        if ok14 { "PASS" } else { "FAIL" },
        reports.len(),
        total.as_millis()
    );

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
