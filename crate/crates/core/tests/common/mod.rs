#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use hyperclass::exact::{rat, Rational};
use hyperclass::families::{family_system, Family, Isomorphism};
use hyperclass::gkz::{build_system, saturation_defects, GkzSystem};
use hyperclass::verify::{sweep_families, transported_families};
use hyperclass::verify::props::PropResult;

/// Runner with a fixed seed so every run checks the same cases.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn lift(r: PropResult) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

fn over(nums: Vec<i64>, den: i64) -> Vec<Rational> {
    nums.into_iter().map(|n| rat(n.rem_euclid(den), den)).collect()
}

/// A family system together with a parameter point of small denominator.
pub fn family_point() -> impl Strategy<Value = (Family, Arc<GkzSystem>, Vec<Rational>)> {
    let families = sweep_families();
    (0..families.len()).prop_flat_map(move |i| {
        let f = families[i];
        let sys = family_system(f).expect("family system");
        let dim = sys.dim;
        (Just(f), Just(sys), (2i64..=8, prop::collection::vec(0i64..64, dim)).prop_map(|(d, v)| over(v, d)))
    })
}

/// A random saturated homogeneous configuration `{(1, x, y)}` with a
/// parameter point. Saturation is what makes the generator test complete.
pub fn random_point() -> impl Strategy<Value = (GkzSystem, Vec<Rational>)> {
    prop::collection::vec((0i64..=3, 0i64..=3), 3..=5)
        .prop_filter_map("configuration spans the space and is saturated", |pts| {
            let mut gens: Vec<Vec<i64>> = pts.into_iter().map(|(x, y)| vec![1, x, y]).collect();
            gens.sort();
            gens.dedup();
            // Normal semigroups in dimension 3 are generated in degree <= 2.
            build_system(gens).ok().filter(|sys| saturation_defects(sys, 3).is_empty())
        })
        .prop_flat_map(|sys| (Just(sys), (2i64..=6, prop::collection::vec(0i64..36, 3)).prop_map(|(d, v)| over(v, d))))
}

/// A declared isomorphism with source parameters of small denominator.
pub fn transport_point() -> impl Strategy<Value = (Isomorphism, Vec<Rational>)> {
    let isos: Vec<Isomorphism> = transported_families().into_iter().map(|f| f.isomorphism().expect("declared")).collect();
    (0..isos.len()).prop_flat_map(move |i| {
        let iso = isos[i].clone();
        let arity = iso.source.arity();
        (Just(iso), (2i64..=8, prop::collection::vec(0i64..64, arity)).prop_map(|(d, v)| over(v, d)))
    })
}

/// `(k, d, m)` with `k` a unit mod `d`.
pub fn lift_input() -> impl Strategy<Value = (u64, u64, u64)> {
    (1u64..=60, 1u64..=30).prop_flat_map(|(d, m)| {
        (1u64..=d.max(1), Just(d), Just(m)).prop_filter("k is a unit mod d", |(k, d, _)| num_integer::gcd(*k, *d) == 1)
    })
}

/// `(p, q, t)` with `0 <= t < 1/2`.
pub fn half_window_input() -> impl Strategy<Value = (i64, i64, Rational)> {
    (3i64..=80, 1i64..80, 2i64..=12)
        .prop_flat_map(|(q, p, tb)| (Just(p % q), Just(q), 0..(tb + 1) / 2, Just(tb)))
        .prop_filter_map("p/q is reduced and nonzero", |(p, q, tn, tb)| {
            (p != 0 && num_integer::gcd(p, q) == 1 && 2 * tn < tb).then(|| (p, q, rat(tn, tb)))
        })
}
