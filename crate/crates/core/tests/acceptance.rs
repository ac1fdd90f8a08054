//! Acceptance suite (runs without the test harness so the summary is always
//! printed): one line per criterion. Criterion 8 combines the
//! deterministic sweeps with seeded property runs over the same predicates.

mod common;

use std::time::Instant;

use proptest::strategy::Strategy;
use proptest::test_runner::TestError;

use common::*;
use hyperclass::verify::props;
use hyperclass::verify::{run_criterion, Check, CriterionReport, CRITERIA};

fn property<S: Strategy>(name: &str, cases: u32, strategy: S, test: impl Fn(S::Value) -> props::PropResult) -> Check
where
    S::Value: std::fmt::Debug,
{
    let result = runner(cases).run(&strategy, |v| lift(test(v)));
    let (pass, detail) = match result {
        Ok(()) => (true, format!("{cases} cases")),
        Err(TestError::Fail(reason, value)) => (false, format!("{reason} at {value:?}")),
        Err(TestError::Abort(reason)) => (false, format!("aborted: {reason}")),
    };
    Check { name: format!("proptest: {name}"), pass, detail }
}

fn randomized_properties() -> Vec<Check> {
    vec![
        property("slab route = definition route (families)", 200, family_point(), |(_, sys, alpha)| {
            props::apex_routes_agree(&sys, &alpha)
        }),
        property("slab route = definition route (random configurations)", 200, random_point(), |(sys, alpha)| {
            props::apex_routes_agree(&sys, &alpha)
        }),
        property("signature <= volume", 300, family_point(), |(_, sys, alpha)| props::signature_within_volume(&sys, &alpha)),
        property(
            "signature depends on fractional parts only",
            150,
            family_point().prop_flat_map(|(f, sys, alpha)| {
                let dim = sys.dim;
                (proptest::strategy::Just((f, sys, alpha)), proptest::collection::vec(-2i64..=2, dim))
            }),
            |((_, sys, alpha), shift)| props::signature_integer_shift(&sys, &alpha, &shift),
        ),
        property(
            "floor-vector determinism",
            150,
            family_point().prop_flat_map(|(f, sys, alpha)| {
                let dim = sys.dim;
                (proptest::strategy::Just((f, sys, alpha)), proptest::collection::vec(-1i64..=1, dim))
            }),
            |((_, sys, alpha), dir)| props::floor_vector_determinism(&sys, &alpha, &dir),
        ),
        property("transport preserves signature", 300, transport_point(), |(iso, p)| props::transport_preserves_signature(&iso, &p)),
        property("lift_coprime postconditions", 500, lift_input(), |(k, d, m)| props::lift_coprime_postconditions(k, d, m)),
        property("half_window_witness postconditions", 500, half_window_input(), |(p, q, t)| {
            props::half_window_postconditions(p, q, &t)
        }),
    ]
}

fn criterion(id: u8) -> CriterionReport {
    let mut report = run_criterion(id).expect("known criterion");
    if id == 8 {
        let start = Instant::now();
        report.checks.extend(randomized_properties());
        report.elapsed_ms += start.elapsed().as_millis();
        report.pass = report.checks.iter().all(|c| c.pass);
    }
    report
}

fn main() {
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let report = criterion(id);
        println!("{}", report.line());
        for c in report.checks.iter().filter(|c| !c.pass) {
            println!("    failed: {}: {}", c.name, c.detail);
        }
        if !report.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("criteria failed: {failed:?}");
        std::process::exit(1);
    }
}
