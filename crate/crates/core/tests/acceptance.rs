//! Acceptance criteria 1–13, one test each. Every test runs the shipped
//! preset for its criterion, prints a PASS/FAIL line with the report, and
//! fails unless every gating check passes within the runtime budget.

use std::time::{Duration, Instant};

use coalforge_core::harness::{run_experiment, Experiment};

fn criterion(c: u32, budget_secs: u64) {
    let experiment = Experiment::for_criterion(c).expect("criterion has a preset");
    let config = experiment.preset();
    let start = Instant::now();
    let report = run_experiment(&config).expect("preset configs are valid");
    let elapsed = start.elapsed();
    let within = elapsed <= Duration::from_secs(budget_secs);
    let verdict = if report.pass && within { "PASS" } else { "FAIL" };
    println!(
        "criterion {c:2} {verdict} {} ({:.1} s, budget {budget_secs} s)",
        experiment.name(),
        elapsed.as_secs_f64()
    );
    print!("{report}");
    for e in &report.estimates {
        match e.std_error {
            Some(se) => println!("    {} = {:.6} ± {:.6}", e.name, e.value, se),
            None => println!("    {} = {:.10}", e.name, e.value),
        }
    }
    assert_eq!(report.pass, report.recompute_pass());
    assert!(report.pass, "criterion {c} failed: {report}");
    assert!(within, "criterion {c} exceeded its {budget_secs} s budget");
}

#[test]
fn criterion_01_rates() {
    criterion(1, 10);
}

#[test]
fn criterion_02_tree_counts() {
    criterion(2, 30);
}

#[test]
fn criterion_03_sampler_uniformity() {
    criterion(3, 10);
}

#[test]
fn criterion_04_pruning_equals_lambda_coalescent() {
    criterion(4, 120);
}

#[test]
fn criterion_05_post_merger_uniformity() {
    criterion(5, 60);
}

#[test]
fn criterion_06_rayleigh_limit() {
    criterion(6, 900);
}

#[test]
fn criterion_07_last_event_limits() {
    criterion(7, 900);
}

#[test]
fn criterion_08_generating_function_coefficients() {
    criterion(8, 5);
}

#[test]
fn criterion_09_identity_suite() {
    criterion(9, 30);
}

#[test]
fn criterion_10_reduced_tree_law() {
    criterion(10, 300);
}

#[test]
fn criterion_11_cross_construction() {
    criterion(11, 1200);
}

#[test]
fn criterion_12_dust_and_theta() {
    criterion(12, 600);
}

#[test]
fn criterion_13_stochastic_order() {
    criterion(13, 5);
}
