//! Conjugation orbits, coordinate symmetries and the ordering used to pick
//! orbit representatives.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::apex::{conjugate, denominator, reduce, units};
use crate::exact::Rational;

/// A coordinate permutation: `apply(t, p)[i] = t[p[i]]`.
pub type Permutation = Vec<usize>;

/// Order on `[0,1)`: `p/q < u/v` if `q < v`, or `q = v` and `p < u`.
pub fn value_cmp(x: &Rational, y: &Rational) -> Ordering {
    x.denom().cmp(y.denom()).then_with(|| x.numer().cmp(y.numer()))
}

/// Lexicographic extension of [`value_cmp`].
pub fn tuple_cmp(s: &[Rational], t: &[Rational]) -> Ordering {
    for (x, y) in s.iter().zip(t) {
        match value_cmp(x, y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    s.len().cmp(&t.len())
}

pub fn apply(t: &[Rational], p: &[usize]) -> Vec<Rational> {
    p.iter().map(|&i| t[i].clone()).collect()
}

/// All permutations generated by `gens` (always includes the identity).
pub fn permutation_group(len: usize, gens: &[Permutation]) -> Vec<Permutation> {
    let id: Permutation = (0..len).collect();
    let mut group: BTreeSet<Permutation> = BTreeSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q: Permutation = g.iter().map(|&i| p[i]).collect();
            if group.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    group.into_iter().collect()
}

/// Conjugates `{k t}` for all units `k` of the common denominator, sorted and
/// deduplicated.
pub fn orbit(t: &[Rational]) -> Vec<Vec<Rational>> {
    let t = reduce(t);
    let d = denominator(&t);
    let set: BTreeSet<Vec<Rational>> = units(d).into_iter().map(|k| conjugate(&t, k as i64)).collect();
    set.into_iter().collect()
}

/// Orbit of `t` under conjugation and the given coordinate permutations.
pub fn group_orbit(t: &[Rational], group: &[Permutation]) -> BTreeSet<Vec<Rational>> {
    let mut out = BTreeSet::new();
    for p in group {
        out.extend(orbit(&apply(t, p)));
    }
    if group.is_empty() {
        out.extend(orbit(t));
    }
    out
}

/// Smallest element of the group orbit in the representative order.
pub fn representative(t: &[Rational], group: &[Permutation]) -> Vec<Rational> {
    group_orbit(t, group).into_iter().min_by(|a, b| tuple_cmp(a, b)).expect("orbit is nonempty")
}

/// Union of the group orbits of every element.
pub fn closure<'a, I>(tuples: I, group: &[Permutation]) -> BTreeSet<Vec<Rational>>
where
    I: IntoIterator<Item = &'a Vec<Rational>>,
{
    let mut out = BTreeSet::new();
    for t in tuples {
        if !out.contains(&reduce(t)) {
            out.extend(group_orbit(t, group));
        }
    }
    out
}

/// One representative per group orbit, sorted in the representative order.
pub fn representatives<'a, I>(tuples: I, group: &[Permutation]) -> Vec<Vec<Rational>>
where
    I: IntoIterator<Item = &'a Vec<Rational>>,
{
    let set: BTreeSet<Vec<Rational>> = tuples.into_iter().map(|t| representative(t, group)).collect();
    let mut out: Vec<Vec<Rational>> = set.into_iter().collect();
    out.sort_by(|a, b| tuple_cmp(a, b));
    out
}

/// `(x_1, ..., x_n) -> (-x_1, ..., -x_n)` reduced mod 1.
pub fn negate(t: &[Rational]) -> Vec<Rational> {
    reduce(&t.iter().map(|x| -x).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn ordering() {
        assert_eq!(value_cmp(&rat(1, 2), &rat(1, 3)), Ordering::Less);
        assert_eq!(value_cmp(&rat(2, 3), &rat(1, 4)), Ordering::Less);
        assert_eq!(value_cmp(&rat(1, 6), &rat(5, 6)), Ordering::Less);
    }

    #[test]
    fn orbit_sizes() {
        let o = orbit(&[rat(1, 6), rat(5, 6), rat(1, 3)]);
        assert_eq!(o, vec![vec![rat(1, 6), rat(5, 6), rat(1, 3)], vec![rat(5, 6), rat(1, 6), rat(2, 3)]]);
        assert_eq!(orbit(&[rat(1, 2), rat(1, 6), rat(1, 3)]).len(), 2);
        assert_eq!(orbit(&[rat(1, 60), rat(31, 60), rat(1, 3)]).len(), 16);
    }

    #[test]
    fn groups() {
        assert_eq!(permutation_group(3, &[vec![1, 0, 2]]).len(), 2);
        assert_eq!(permutation_group(4, &[vec![1, 0, 2, 3], vec![0, 1, 3, 2]]).len(), 4);
        let rep = representative(&[rat(5, 6), rat(1, 2), rat(2, 3)], &permutation_group(3, &[vec![1, 0, 2]]));
        assert_eq!(rep, vec![rat(1, 2), rat(1, 6), rat(1, 3)]);
    }
}
