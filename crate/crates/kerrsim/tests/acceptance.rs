// SPDX-License-Identifier: Apache-2.0

//! One line per acceptance criterion. Known deviations are reported as FAIL
//! but do not fail the run; anything else failing does.

use kerrsim::checks::{all_checks, KNOWN_DEVIATIONS};

fn main() {
    let outcomes = all_checks();
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let known = !o.passed && KNOWN_DEVIATIONS.contains(&o.id);
        println!("{}{}", o.line(), if known { " (known deviation)" } else { "" });
        if !o.passed && !known {
            unexpected.push(o.id);
        }
    }
    for id in KNOWN_DEVIATIONS {
        if outcomes.iter().any(|o| o.id == id && o.passed) {
            println!("note: criterion {id} is listed as a known deviation but passed");
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} passed", outcomes.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
