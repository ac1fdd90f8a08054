//! Algebraic Gauss functions: the Schwarz list, the two classes of
//! algebraic triples, and the classical interlacing test.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apex::{reduce, scaled, units};
use crate::exact::{frac, int, is_integer, rat, Rational};
use crate::orbits::{group_orbit, permutation_group, representatives, Permutation};
use crate::reference::{table, AffineFamily, TableId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchwarzError {
    #[error("(a, b, c) is reducible: one of a, b, c-a, c-b is an integer")]
    Reducible,
}

/// The one-parameter forms of type-1 triples, in matching priority.
pub const TYPE1_FORMS: [&str; 3] = ["(r,-r,1/2)", "(r,r+1/2,1/2)", "(r,r+1/2,2r)"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaussClass {
    /// `form` indexes [`TYPE1_FORMS`].
    Type1 {
        form: usize,
        #[serde(with = "crate::exact::serde_rational")]
        r: Rational,
    },
    Type2,
    NotAlgebraic,
    Reducible,
}

impl GaussClass {
    pub fn is_algebraic(&self) -> bool {
        matches!(self, GaussClass::Type1 { .. } | GaussClass::Type2)
    }
}

impl fmt::Display for GaussClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaussClass::Type1 { form, r } => write!(f, "type 1 {} with r = {}", TYPE1_FORMS[*form], crate::exact::fmt_rational(r)),
            GaussClass::Type2 => f.write_str("type 2"),
            GaussClass::NotAlgebraic => f.write_str("not algebraic"),
            GaussClass::Reducible => f.write_str("reducible"),
        }
    }
}

/// `(a, b, c) -> (b, a, c)`.
pub fn swap_ab() -> Vec<Permutation> {
    permutation_group(3, &[vec![1, 0, 2]])
}

/// The fourteen sporadic `(lambda, mu, nu)` and the family `(1/2, 1/2, s)`.
pub fn lambda_mu_nu() -> (Vec<AffineFamily>, Vec<Vec<Rational>>) {
    let t = table(TableId::Table1);
    (t.families.clone(), t.printed())
}

fn triple_from_lmn(l: &Rational, m: &Rational, n: &Rational) -> Vec<Rational> {
    let half = rat(1, 2);
    let one = int(1);
    let a = (&one - l - m - n) * &half;
    let b = (&one - l - m + n) * &half;
    let c = &one - l;
    vec![frac(&a), frac(&b), frac(&c)]
}

/// The type-2 triples: all permutations and sign changes of the sporadic
/// `(lambda, mu, nu)`, mapped to `(a, b, c)` and reduced mod 1.
pub fn type2_triples() -> &'static BTreeSet<Vec<Rational>> {
    static SET: OnceLock<BTreeSet<Vec<Rational>>> = OnceLock::new();
    SET.get_or_init(|| {
        let (_, rows) = lambda_mu_nu();
        let perms = permutation_group(3, &[vec![1, 0, 2], vec![1, 2, 0]]);
        let mut out = BTreeSet::new();
        for row in rows {
            for p in &perms {
                for signs in 0..8u32 {
                    let v: Vec<Rational> = (0..3)
                        .map(|i| {
                            let x = row[p[i]].clone();
                            if signs >> i & 1 == 1 {
                                -x
                            } else {
                                x
                            }
                        })
                        .collect();
                    out.insert(triple_from_lmn(&v[0], &v[1], &v[2]));
                }
            }
        }
        out
    })
}

/// One representative per pair of orbits `{t, swap(t)}`, sorted.
pub fn type2_representatives() -> Vec<Vec<Rational>> {
    representatives(type2_triples().iter(), &swap_ab())
}

/// Size of the union of the orbits of `t` and of its swap.
pub fn orbit_pair_size(t: &[Rational]) -> usize {
    group_orbit(t, &swap_ab()).len()
}

pub fn is_irreducible(a: &Rational, b: &Rational, c: &Rational) -> bool {
    !(is_integer(a) || is_integer(b) || is_integer(&(c - a)) || is_integer(&(c - b)))
}

/// Matches `(x, y, z)` against the type-1 forms with `r = x`.
fn match_type1(x: &Rational, y: &Rational, z: &Rational) -> Option<usize> {
    let half = rat(1, 2);
    if x == &Rational::from_integer(0.into()) || x == &half {
        return None;
    }
    if *y == frac(&-x) && *z == half {
        return Some(0);
    }
    if *y == frac(&(x + &half)) && *z == half {
        return Some(1);
    }
    if *y == frac(&(x + &half)) && *z == frac(&(x * int(2))) {
        return Some(2);
    }
    None
}

/// Classifies `(a, b, c)` mod 1. Type 1 takes precedence; `r` is read off
/// from `a` when `(a, b, c)` matches and from `b` otherwise.
pub fn gauss_triple_classify(a: &Rational, b: &Rational, c: &Rational) -> GaussClass {
    let t = reduce(&[a.clone(), b.clone(), c.clone()]);
    if !is_irreducible(&t[0], &t[1], &t[2]) {
        return GaussClass::Reducible;
    }
    for (x, y) in [(&t[0], &t[1]), (&t[1], &t[0])] {
        if let Some(form) = match_type1(x, y, &t[2]) {
            return GaussClass::Type1 { form, r: x.clone() };
        }
    }
    if type2_triples().contains(&t) {
        GaussClass::Type2
    } else {
        GaussClass::NotAlgebraic
    }
}

/// Which list a Gauss triple comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GaussType {
    One,
    Two,
}

impl GaussType {
    pub fn digit(self) -> char {
        match self {
            GaussType::One => '1',
            GaussType::Two => '2',
        }
    }
}

/// Type of a Gauss triple, `None` if it is not one.
pub fn gauss_type(t: &[Rational]) -> Option<GaussType> {
    match gauss_triple_classify(&t[0], &t[1], &t[2]) {
        GaussClass::Type1 { .. } => Some(GaussType::One),
        GaussClass::Type2 => Some(GaussType::Two),
        _ => None,
    }
}

fn type2_by_first() -> &'static HashMap<Rational, Vec<Vec<Rational>>> {
    static MAP: OnceLock<HashMap<Rational, Vec<Vec<Rational>>>> = OnceLock::new();
    MAP.get_or_init(|| {
        let mut m: HashMap<Rational, Vec<Vec<Rational>>> = HashMap::new();
        for t in type2_triples() {
            m.entry(t[0].clone()).or_default().push(t.clone());
        }
        m
    })
}

/// Every Gauss triple `(a, b, c)` mod 1 with the given first coordinate.
///
/// With `a` fixed, the type-1 forms leave only `(a, -a, 1/2)`,
/// `(a, a+1/2, 1/2)` and `(a, a+1/2, 2a)` (for `a` not in `{0, 1/2}`), so
/// the list is finite and exact.
pub fn triples_with_first(a: &Rational) -> Vec<(Vec<Rational>, GaussType)> {
    let a = frac(a);
    let half = rat(1, 2);
    let mut out: Vec<(Vec<Rational>, GaussType)> = Vec::new();
    if a != Rational::from_integer(0.into()) && a != half {
        let shifted = frac(&(&a + &half));
        for t in [
            vec![a.clone(), frac(&-&a), half.clone()],
            vec![a.clone(), shifted.clone(), half.clone()],
            vec![a.clone(), shifted, frac(&(&a * int(2)))],
        ] {
            if !out.iter().any(|(u, _)| *u == t) {
                out.push((t, GaussType::One));
            }
        }
    }
    if let Some(list) = type2_by_first().get(&a) {
        out.extend(list.iter().map(|t| (t.clone(), GaussType::Two)));
    }
    out
}

/// Whether `(a, b, c)` is a Gauss triple (irreducible and algebraic).
pub fn is_gauss_triple(a: &Rational, b: &Rational, c: &Rational) -> bool {
    gauss_is_algebraic(a, b, c).unwrap_or(false)
}

/// Interlacing test: for every unit `k` of the common denominator, either
/// `{ka} <= {kc} < {kb}` or `{kb} <= {kc} < {ka}`.
pub fn gauss_is_algebraic(a: &Rational, b: &Rational, c: &Rational) -> Result<bool, SchwarzError> {
    if !is_irreducible(a, b, c) {
        return Err(SchwarzError::Reducible);
    }
    let (nums, den) = scaled(&[a.clone(), b.clone(), c.clone()]);
    Ok(units(den as u64).into_iter().all(|k| {
        let k = k as i64;
        let [ka, kb, kc] = [0, 1, 2].map(|i| (nums[i] * k).rem_euclid(den));
        (ka <= kc && kc < kb) || (kb <= kc && kc < ka)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> [Rational; 3] {
        [rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1)]
    }

    #[test]
    fn classify_examples() {
        let [a, b, c] = t((1, 4), (3, 4), (1, 2));
        assert_eq!(gauss_triple_classify(&a, &b, &c), GaussClass::Type1 { form: 0, r: rat(1, 4) });
        let [a, b, c] = t((1, 2), (1, 6), (1, 3));
        assert_eq!(gauss_triple_classify(&a, &b, &c), GaussClass::Type2);
        let [a, b, c] = t((1, 3), (1, 3), (2, 3));
        assert_eq!(gauss_triple_classify(&a, &b, &c), GaussClass::NotAlgebraic);
    }

    #[test]
    fn interlacing_examples() {
        let [a, b, c] = t((1, 2), (1, 6), (1, 3));
        assert_eq!(gauss_is_algebraic(&a, &b, &c), Ok(true));
        let [a, b, c] = t((1, 3), (2, 3), (1, 2));
        assert_eq!(gauss_is_algebraic(&a, &b, &c), Ok(true));
        let [a, b, c] = t((1, 3), (1, 3), (2, 3));
        assert_eq!(gauss_is_algebraic(&a, &b, &c), Ok(false));
        let [a, b, c] = t((1, 3), (1, 2), (1, 3));
        assert_eq!(gauss_is_algebraic(&a, &b, &c), Err(SchwarzError::Reducible));
    }

    #[test]
    fn type2_basics() {
        let set = type2_triples();
        assert_eq!(set.len(), 408);
        assert!(set.contains(&vec![rat(1, 2), rat(1, 6), rat(1, 3)]));
        assert_eq!(type2_representatives().len(), 40);
    }

    #[test]
    fn type1_and_type2_are_disjoint() {
        for t in type2_triples() {
            assert!(!triples_with_first(&t[0]).iter().any(|(u, k)| u == t && *k == GaussType::One));
        }
    }

    #[test]
    fn first_coordinate_lookup_is_complete() {
        // Every algebraic triple with denominators up to 12 is found by lookup.
        let vals: Vec<Rational> = (1..=12).flat_map(|q| (0..q).map(move |p| rat(p, q))).collect();
        for a in &vals {
            let listed: BTreeSet<Vec<Rational>> = triples_with_first(a).into_iter().map(|(t, _)| t).collect();
            for b in &vals {
                for c in &vals {
                    let alg = is_gauss_triple(a, b, c);
                    assert_eq!(alg, listed.contains(&vec![a.clone(), b.clone(), c.clone()]), "{a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn representatives_match_table() {
        assert_eq!(type2_representatives(), table(TableId::Table2).printed());
    }
}
