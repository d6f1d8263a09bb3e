//! A short run of the seeded invariant suite, then the same run with the
//! sign of the triple index flipped.

use maslov::verify::{run_verify, Mutation, VerifyOptions};

fn main() {
    let opts = VerifyOptions {
        seed: 42,
        n_max: 3,
        instances: Some(8),
        ..VerifyOptions::default()
    };
    let report = run_verify(&opts);
    let passed = report.checks.iter().filter(|c| c.passed()).count();
    println!("{passed}/{} check groups pass", report.checks.len());

    let broken = run_verify(&VerifyOptions {
        mutation: Some(Mutation::FlipTauSign),
        ..opts
    });
    println!("with tau negated, failing: {:?}", broken.failed_ids());
}
