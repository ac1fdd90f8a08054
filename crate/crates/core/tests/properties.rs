mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::*;
use hyperclass::apex::{conjugate, denominator, is_algebraic, reduce, units};
use hyperclass::classify::{
    classify_family, compare_rows, compare_with_reference, f4_characterization, tuples_with_denominator, ClassifyConfig,
};
use hyperclass::exact::{frac, is_integer, rat, Rational};
use hyperclass::families::{family_system, Family};
use hyperclass::orbits::{apply, closure};
use hyperclass::reference::{table, TableId};
use hyperclass::verify::props;

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn apex_routes_agree_on_families((_, sys, alpha) in family_point()) {
        lift(props::apex_routes_agree(&sys, &alpha))?;
    }

    #[test]
    fn apex_routes_agree_on_random_configurations((sys, alpha) in random_point()) {
        lift(props::apex_routes_agree(&sys, &alpha))?;
        lift(props::signature_within_volume(&sys, &alpha))?;
    }

    #[test]
    fn signature_bounded_by_volume((_, sys, alpha) in family_point()) {
        lift(props::signature_within_volume(&sys, &alpha))?;
    }

    #[test]
    fn signature_ignores_integer_shifts((_, sys, alpha) in family_point(), seed in prop::collection::vec(-2i64..=2, 8)) {
        let shift = &seed[..sys.dim.min(seed.len())];
        prop_assume!(shift.len() == sys.dim);
        lift(props::signature_integer_shift(&sys, &alpha, shift))?;
    }

    #[test]
    fn floor_vector_determines_signature((_, sys, alpha) in family_point(), seed in prop::collection::vec(-1i64..=1, 8)) {
        let dir = &seed[..sys.dim.min(seed.len())];
        prop_assume!(dir.len() == sys.dim);
        lift(props::floor_vector_determinism(&sys, &alpha, dir))?;
    }

    #[test]
    fn transport_preserves_signature((iso, params) in transport_point()) {
        lift(props::transport_preserves_signature(&iso, &params))?;
    }

    #[test]
    fn conjugation_commutes_with_alpha_map((f, _, alpha) in family_point(), k in 1i64..60) {
        let params = f.params_from_alpha(&alpha);
        prop_assert_eq!(reduce(&f.alpha(&params).unwrap()), reduce(&alpha));
        let d = denominator(&params) as i64;
        prop_assume!(num_integer::gcd(k, d) == 1);
        let lhs = reduce(&f.alpha(&conjugate(&params, k)).unwrap());
        let rhs = conjugate(&alpha, k);
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lift_coprime_contract((k, d, m) in lift_input()) {
        lift(props::lift_coprime_postconditions(k, d, m))?;
    }

    #[test]
    fn half_window_contract((p, q, t) in half_window_input()) {
        lift(props::half_window_postconditions(p, q, &t))?;
    }
}

#[test]
fn nonresonance_forms_match_facet_test() {
    let families = [Family::Gauss, Family::FD(2), Family::FA(2), Family::FB(2), Family::FC(2), Family::G1, Family::G2, Family::G3]
        .into_iter()
        .chain([Family::H1, Family::H2, Family::H3, Family::H4, Family::H5, Family::H6, Family::H7]);
    for f in families {
        let sys = family_system(f).unwrap();
        let forms = f.nonresonance_forms().unwrap();
        let all = tuples_with_denominator(f.arity(), 8);
        let step = (all.len() / 4000).max(1);
        for t in all.into_iter().step_by(step) {
            let by_forms = forms.iter().all(|w| !is_integer(&w.iter().zip(&t).map(|(c, x)| x * rat(*c, 1)).sum::<Rational>()));
            assert_eq!(by_forms, sys.is_nonresonant(&f.alpha(&t).unwrap()), "{f} at {t:?}");
        }
    }
}

#[test]
fn solution_sets_are_closed() {
    for f in [Family::FD(2), Family::FA(2), Family::FB(2), Family::FC(2), Family::G1, Family::G2, Family::H1, Family::H2, Family::H4, Family::H7] {
        let s = classify_family(f, &ClassifyConfig::default()).unwrap();
        let set = s.sporadic();
        for t in &set {
            for k in units(denominator(t)) {
                assert!(set.contains(&conjugate(t, k as i64)), "{f}: conjugate {k} of {t:?} missing");
            }
            for g in &s.symmetry {
                assert!(set.contains(&apply(t, g)), "{f}: symmetry image of {t:?} missing");
            }
        }
        assert_eq!(s.added_by_closure, 0, "{f}");
    }
}

#[test]
fn f4_characterization_both_directions() {
    let f = Family::FC(2);
    let sys = family_system(f).unwrap();
    let s = classify_family(f, &ClassifyConfig::default()).unwrap();
    let mut solutions = 0;
    let mut others = 0;
    for t in tuples_with_denominator(4, 12).into_iter().step_by(3) {
        let alpha = f.alpha(&t).unwrap();
        if !sys.is_nonresonant(&alpha) {
            continue;
        }
        let algebraic = is_algebraic(&sys, &alpha).unwrap();
        assert_eq!(algebraic, s.contains(&t), "classification disagrees at {t:?}");
        assert_eq!(algebraic, f4_characterization(&t[0], &t[1], &t[2], &t[3]), "characterization disagrees at {t:?}");
        if algebraic {
            solutions += 1;
        } else {
            others += 1;
        }
    }
    assert!(solutions > 20 && others > 1000, "{solutions} solutions, {others} others");
}

#[test]
fn fc3_solutions_have_a_half_c() {
    let s = classify_family(Family::FC(3), &ClassifyConfig::default()).unwrap();
    let half = rat(1, 2);
    for t in s.sporadic() {
        assert!(t[2..].iter().filter(|c| **c == half).count() >= 1, "{t:?}");
    }
}

/// Replacing one printed row by a tuple outside the solution set must
/// surface as exactly that row's orbit missing and the original orbit extra.
fn inject_fault(family: Family, id: TableId, row: usize) {
    let s = classify_family(family, &ClassifyConfig::default()).unwrap();
    let baseline = compare_with_reference(&s, id).unwrap();
    assert!(baseline.pass);
    let t = table(id);
    let mut printed = t.printed();
    let original = printed[row].clone();
    let mut corrupted = original.clone();
    let last = corrupted.len() - 1;
    corrupted[last] = frac(&(&corrupted[last] + rat(1, 7)));
    assert!(!s.contains(&corrupted), "corrupted row is still a solution");
    printed[row] = corrupted.clone();
    let report = compare_rows(&s, id, &t.families, &printed, &printed).unwrap();
    assert!(!report.pass);
    // Rows printed twice (as conjugates of another row) stay unmatched.
    let changed: Vec<usize> = (0..printed.len()).filter(|&i| report.rows_matched[i] != baseline.rows_matched[i]).collect();
    assert_eq!(changed, vec![row]);
    let missing: BTreeSet<Vec<Rational>> = report.missing.into_iter().collect();
    let extra: BTreeSet<Vec<Rational>> = report.extra.into_iter().collect();
    assert_eq!(missing, closure([&corrupted], &s.symmetry));
    assert_eq!(extra, closure([&original], &s.symmetry));
}

#[test]
fn fault_injection_table3() {
    inject_fault(Family::FC(2), TableId::Table3, 5);
}

#[test]
fn fault_injection_table5() {
    inject_fault(Family::H4, TableId::Table5, 0);
}
