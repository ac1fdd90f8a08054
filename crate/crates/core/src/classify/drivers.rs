//! Candidate generation for each family.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use rayon::prelude::*;

use super::{classify_family, finish, Candidate, ClassifyConfig, ClassifyError, SolutionSet};
use crate::exact::{frac, int, rat, Rational};
use crate::families::{push_forward, Family};
use crate::schwarz::{is_gauss_triple, triples_with_first, GaussType};

/// Denominator bound on type-1 parameters for most families: every case
/// with a type-2 anchor has denominators at most 60, and the all-type-1
/// cases either give the declared families or small denominators.
const BOUND: u64 = 60;
/// For `F2` the all-type-1 case only bounds `r` by 120.
const F2_BOUND: u64 = 120;
/// Grid bound for `G3`, whose proof bounds both denominators of `alpha` by 10.
const G3_GRID: u64 = 12;
/// Family members with denominators up to this bound take part in joins.
const JOIN_BOUND: u64 = 60;

/// Every `p/q` in `[0, 1)` with `q <= max_den`, sorted.
fn values(max_den: u64) -> Vec<Rational> {
    let mut out: Vec<Rational> = vec![Rational::from_integer(0.into())];
    for q in 2..=max_den as i64 {
        for p in 1..q {
            if p.gcd(&q) == 1 {
                out.push(rat(p, q));
            }
        }
    }
    out.sort();
    out
}

/// All tuples of the given length whose common denominator is at most
/// `max_den`, sorted.
pub fn tuples_with_denominator(len: usize, max_den: u64) -> Vec<Vec<Rational>> {
    let mut out: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for d in 1..=max_den as i64 {
        let mut idx = vec![0i64; len];
        loop {
            out.insert(idx.iter().map(|&p| rat(p, d)).collect());
            let mut k = 0;
            while k < len {
                idx[k] += 1;
                if idx[k] < d {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == len {
                break;
            }
        }
    }
    out.into_iter().collect()
}

fn digit(t: GaussType) -> String {
    t.digit().to_string()
}

pub(super) fn run(family: Family, config: &ClassifyConfig) -> Result<SolutionSet, ClassifyError> {
    let candidates = match family {
        Family::Gauss => per_a(BOUND, |a| {
            triples_with_first(a).into_iter().map(|(t, k)| Candidate { tuple: t, tag: digit(k) }).collect()
        }),
        Family::FD(2) => per_a(BOUND, f1_candidates),
        Family::FA(2) => per_a(F2_BOUND, f2_candidates),
        Family::FC(2) => per_a(BOUND, f4_candidates),
        Family::G1 => per_a(BOUND, g1_candidates),
        Family::H1 => per_a(BOUND, h1_candidates),
        Family::H4 => per_a(BOUND, h4_candidates),
        Family::H5 => per_a(BOUND, |a| {
            triples_with_first(a).into_iter().map(|(t, k)| Candidate { tuple: t, tag: digit(k) }).collect()
        }),
        Family::G3 => g3_candidates(),
        Family::FD(_) | Family::FA(_) | Family::FC(_) => join(family, config)?,
        Family::FB(n) if n >= 3 => join(family, config)?,
        Family::FB(_) | Family::G2 | Family::H2 | Family::H3 | Family::H6 | Family::H7 => transported(family, config)?,
    };
    finish(family, candidates, config)
}

fn per_a<F>(bound: u64, f: F) -> Vec<Candidate>
where
    F: Fn(&Rational) -> Vec<Candidate> + Sync,
{
    values(bound).par_iter().flat_map_iter(&f).collect()
}

fn sum(x: &Rational, y: &Rational) -> Rational {
    frac(&(x + y))
}

fn diff(x: &Rational, y: &Rational) -> Rational {
    frac(&(x - y))
}

/// `(a,b1,c)`, `(a,b2,c)` and `(a,b1+b2,c)` are Gauss triples.
fn f1_candidates(a: &Rational) -> Vec<Candidate> {
    let mut by_c: BTreeMap<Rational, Vec<(Rational, GaussType)>> = BTreeMap::new();
    for (t, k) in triples_with_first(a) {
        by_c.entry(t[2].clone()).or_default().push((t[1].clone(), k));
    }
    let mut out = Vec::new();
    for (c, bs) in &by_c {
        for (b1, k1) in bs {
            for (b2, k2) in bs {
                if is_gauss_triple(a, &sum(b1, b2), c) {
                    out.push(Candidate {
                        tuple: vec![a.clone(), b1.clone(), b2.clone(), c.clone()],
                        tag: format!("{}{}", k1.digit(), k2.digit()),
                    });
                }
            }
        }
    }
    out
}

/// `(a,b1,c1)`, `(a,b2,c2)`, `(a-c2,b1,c1)` and `(a-c1,b2,c2)` are Gauss
/// triples.
fn f2_candidates(a: &Rational) -> Vec<Candidate> {
    let list = triples_with_first(a);
    let mut out = Vec::new();
    for (x, k1) in &list {
        for (y, k2) in &list {
            let (b1, c1, b2, c2) = (&x[1], &x[2], &y[1], &y[2]);
            if is_gauss_triple(&diff(a, c2), b1, c1) && is_gauss_triple(&diff(a, c1), b2, c2) {
                out.push(Candidate {
                    tuple: vec![a.clone(), b1.clone(), b2.clone(), c1.clone(), c2.clone()],
                    tag: format!("{}{}", k1.digit(), k2.digit()),
                });
            }
        }
    }
    out
}

/// `(a,b,c1)` and `(a,b,c2)` are Gauss triples.
fn f4_candidates(a: &Rational) -> Vec<Candidate> {
    let mut by_b: BTreeMap<Rational, Vec<(Rational, GaussType)>> = BTreeMap::new();
    for (t, k) in triples_with_first(a) {
        by_b.entry(t[1].clone()).or_default().push((t[2].clone(), k));
    }
    let mut out = Vec::new();
    for (b, cs) in &by_b {
        for (c1, k1) in cs {
            for (c2, k2) in cs {
                out.push(Candidate {
                    tuple: vec![a.clone(), b.clone(), c1.clone(), c2.clone()],
                    tag: format!("{}{}", k1.digit(), k2.digit()),
                });
            }
        }
    }
    out
}

/// `(a, b1, a+b1+b2)` is a Gauss triple.
fn g1_candidates(a: &Rational) -> Vec<Candidate> {
    triples_with_first(a)
        .into_iter()
        .map(|(t, k)| {
            let b2 = frac(&(&t[2] - a - &t[1]));
            Candidate { tuple: vec![a.clone(), t[1].clone(), b2], tag: digit(k) }
        })
        .collect()
}

/// `(a,b,d)` and `(b-d, c, d-a)` are Gauss triples.
fn h1_candidates(a: &Rational) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (t, k1) in triples_with_first(a) {
        let (b, d) = (&t[1], &t[2]);
        let x = diff(b, d);
        let z = diff(d, a);
        for (u, k2) in triples_with_first(&x) {
            if u[2] == z {
                out.push(Candidate {
                    tuple: vec![a.clone(), b.clone(), u[1].clone(), d.clone()],
                    tag: format!("{}{}", k1.digit(), k2.digit()),
                });
            }
        }
    }
    out
}

/// `(a/2, (a+1)/2, c)`, `(a,b,d)` and `(b, a-2c, d)` are Gauss triples.
fn h4_candidates(a: &Rational) -> Vec<Candidate> {
    let half_a = a * rat(1, 2);
    let partner = frac(&(&half_a + rat(1, 2)));
    let cs: Vec<(Rational, GaussType)> =
        triples_with_first(&half_a).into_iter().filter(|(t, _)| t[1] == partner).map(|(t, k)| (t[2].clone(), k)).collect();
    let abd = triples_with_first(a);
    let mut out = Vec::new();
    for (c, k1) in &cs {
        let a2c = frac(&(a - c * int(2)));
        for (t, k2) in &abd {
            let (b, d) = (&t[1], &t[2]);
            if is_gauss_triple(b, &a2c, d) {
                out.push(Candidate {
                    tuple: vec![a.clone(), b.clone(), c.clone(), d.clone()],
                    tag: format!("{}{}", k1.digit(), k2.digit()),
                });
            }
        }
    }
    out
}

fn g3_candidates() -> Vec<Candidate> {
    let vals = values(G3_GRID);
    let mut out = Vec::new();
    for x in &vals {
        for y in &vals {
            let params = Family::G3.params_from_alpha(&[x.clone(), y.clone()]);
            out.push(Candidate { tuple: params, tag: "grid".into() });
        }
    }
    out
}

/// Pushes the source family's solutions (and sampled family members)
/// through the declared isomorphism.
fn transported(family: Family, config: &ClassifyConfig) -> Result<Vec<Candidate>, ClassifyError> {
    let iso = family.isomorphism().expect("transported family");
    let src = classify_family(iso.source, config)?;
    let mut out = Vec::new();
    for t in src.materialize(config.max_family_denominator) {
        out.push(Candidate { tuple: push_forward(&iso, &t)?, tag: "transported".into() });
    }
    Ok(out)
}

/// Parameter slots of the last variable of a Lauricella family in `m`
/// variables.
fn last_slots(family: Family) -> Vec<usize> {
    match family {
        Family::FD(m) => vec![m],
        Family::FA(m) => vec![m, 2 * m],
        Family::FB(m) => vec![m - 1, 2 * m - 1],
        Family::FC(m) => vec![m + 1],
        _ => unreachable!("only Lauricella families are joined"),
    }
}

/// Adds the last variable of `t` to `s` as a new variable.
fn extend(prev: Family, s: &[Rational], t: &[Rational]) -> Vec<Rational> {
    let slots = last_slots(prev);
    let mut out = s.to_vec();
    // Insert from the back so earlier slots stay valid.
    for &k in slots.iter().rev() {
        out.insert(k + 1, t[k].clone());
    }
    out
}

fn smaller(family: Family) -> Family {
    match family {
        Family::FD(n) => Family::FD(n - 1),
        Family::FA(n) => Family::FA(n - 1),
        Family::FB(n) => Family::FB(n - 1),
        Family::FC(n) => Family::FC(n - 1),
        _ => unreachable!("only Lauricella families are joined"),
    }
}

/// Candidates in `n` variables all of whose `(n-1)`-variable restrictions
/// are solutions.
fn join(family: Family, config: &ClassifyConfig) -> Result<Vec<Candidate>, ClassifyError> {
    let prev = smaller(family);
    let prev_set = classify_family(prev, config)?.materialize(JOIN_BOUND);
    let m = prev.n();
    let mut groups: BTreeMap<Vec<Rational>, Vec<&Vec<Rational>>> = BTreeMap::new();
    for s in &prev_set {
        let key = prev.restrict(s, m)?.1;
        groups.entry(key).or_default().push(s);
    }
    let mut out = Vec::new();
    for members in groups.values() {
        for s in members {
            for t in members {
                let cand = extend(prev, s, t);
                let mut ok = true;
                for i in 1..=family.n() {
                    if !prev_set.contains(&family.restrict(&cand, i)?.1) {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    out.push(Candidate { tuple: cand, tag: "join".into() });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(values(4).len(), 6);
        assert_eq!(tuples_with_denominator(1, 4).len(), 6);
        assert_eq!(tuples_with_denominator(2, 2).len(), 4);
    }

    #[test]
    fn extend_inserts_last_variable() {
        let q = |v: &[i64]| v.iter().map(|&p| rat(p, 7)).collect::<Vec<_>>();
        assert_eq!(extend(Family::FD(2), &q(&[1, 2, 3, 4]), &q(&[1, 2, 5, 4])), q(&[1, 2, 3, 5, 4]));
        assert_eq!(extend(Family::FA(2), &q(&[1, 2, 3, 4, 5]), &q(&[1, 2, 6, 4, 0])), q(&[1, 2, 3, 6, 4, 5, 0]));
        assert_eq!(extend(Family::FB(2), &q(&[1, 2, 3, 4, 5]), &q(&[1, 6, 3, 0, 5])), q(&[1, 2, 6, 3, 4, 0, 5]));
        assert_eq!(extend(Family::FC(2), &q(&[1, 2, 3, 4]), &q(&[1, 2, 3, 6])), q(&[1, 2, 3, 4, 6]));
    }
}
